// Catalytic covariant protocol: a ladder ancilla lends coherence to a
// sequence of qubits without changing its shift moments.

use skew_info::aberg::{catalytic_check, reduced_channel, run_protocol, two_qubit_closed_form, AbergConfig};
use skew_info::qmat::{max_abs, SubsystemLayout};
use skew_info::skew::superadditivity_gap;
use skew_info::{MonotoneFunction, Observable};

pub fn run_example() -> skew_info::Result<()> {
    let cfg = AbergConfig::hadamard(3, 4)?;
    let run = run_protocol(&cfg)?;
    println!("window of {} ladder levels, {} steps", cfg.window(), run.steps.len());
    for step in &run.steps {
        println!(
            "step {}: norm {:.15}, guard mass {:.1e}",
            step.step, step.norm, step.guard_mass
        );
    }
    let cat = catalytic_check(&cfg)?;
    println!("largest change of a shift moment: {:.2e}", cat.max_diff);

    let predicted = reduced_channel(cfg.u(), &run.initial_moments)?.ground_output()?;
    for (k, marginal) in run.marginals.iter().enumerate() {
        let diff = max_abs(&(marginal.matrix() - predicted.matrix()));
        println!("qubit {k}: distance to the reduced channel output {diff:.1e}");
    }

    let f = MonotoneFunction::wigner_yanase();
    let rho = two_qubit_closed_form(4)?;
    let gap = superadditivity_gap(
        &rho,
        &[Observable::number(2), Observable::number(2)],
        &SubsystemLayout::uniform(2, 2)?,
        &f,
    )?;
    println!(
        "two qubits, M = 4: global {:.12}, locals {:?}, gap {:.12}",
        gap.global_value, gap.local_values, gap.gap
    );
    assert!(gap.gap < 0.0 && gap.weak_bound_satisfied);
    Ok(())
}

fn main() -> skew_info::Result<()> {
    run_example()
}
