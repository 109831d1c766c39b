// With enough protocol steps the marginals jointly report more skew
// information than the ancilla ever held.

use skew_info::aberg::{hadamard, multipartite_violation};
use skew_info::MonotoneFunction;

pub fn run_example() -> skew_info::Result<()> {
    let f = MonotoneFunction::wigner_yanase();
    let report = multipartite_violation(&hadamard(), 8, &f, 48)?;
    println!("I of the ancilla: {:.12}", report.i_ancilla);
    println!("I of one marginal: {:.12}", report.i_local);
    println!("first N with N I_local > I_ancilla: {:?}", report.n_star);
    for p in report.curve.iter().filter(|p| p.n.is_power_of_two() || Some(p.n) == report.n_star) {
        println!(
            "N = {:>2}: sum of locals {:.6}, global {:.6}",
            p.n, p.local_sum, p.global
        );
    }
    println!("largest global value seen: {:.6}", report.max_global);
    Ok(())
}

fn main() -> skew_info::Result<()> {
    run_example()
}
