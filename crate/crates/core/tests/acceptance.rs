//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Lines are written straight to stderr so they show up in a plain
//! `cargo test` run without `--nocapture`.

use std::io::Write;

use skew_info::aberg::{
    fig1_sweep, hadamard, multipartite_violation, run_protocol, strongest_violation, AbergConfig,
};
use skew_info::clocknet::{self, Rule, ScenarioFile};
use skew_info::qmat::CVector;
use skew_info::verify::{self, CheckReport, CHANNEL_DIMS, ORACLE_DIMS};
use skew_info::{skew_info, DensityMatrix, MonotoneFunction, Observable, C64};

const SEED: u64 = 20_240_607;
const COUNT: usize = 200;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn report(id: u32, title: &str, outcome: &Outcome) {
    let status = if outcome.passed { "PASS" } else { "FAIL" };
    let line = format!("[{status}] criterion {id:>2} {title}: {}\n", outcome.detail);
    let _ = std::io::stderr().lock().write_all(line.as_bytes());
}

fn from_checks(checks: &[CheckReport]) -> Outcome {
    let passed = checks.iter().all(|c| c.passed);
    let detail = checks
        .iter()
        .map(|c| {
            format!(
                "{} {}/{} ok (max {:.1e})",
                c.name,
                c.instances - c.violations,
                c.instances,
                c.max_violation
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    Outcome { passed, detail }
}

fn criterion_1() -> Outcome {
    from_checks(&[verify::oracle_equivalence(SEED, COUNT, &ORACLE_DIMS).unwrap()])
}

fn criterion_2() -> Outcome {
    let s = 0.5f64.sqrt();
    let plus = DensityMatrix::pure(&CVector::from_vec(vec![C64::new(s, 0.0); 2])).unwrap();
    let value = skew_info(&plus, &Observable::number(2), &MonotoneFunction::wigner_yanase())
        .unwrap()
        .value;
    Outcome {
        passed: (value - 0.25).abs() <= 1e-12,
        detail: format!("I^WY = {value:.15}"),
    }
}

fn criterion_3() -> Outcome {
    from_checks(&[verify::pure_state_variance(SEED, COUNT).unwrap()])
}

fn criterion_4() -> Outcome {
    from_checks(&[
        verify::symmetric_vanishing(SEED, COUNT).unwrap(),
        verify::product_additivity(SEED, COUNT).unwrap(),
        verify::register_identity(SEED, COUNT).unwrap(),
        verify::convexity(SEED, COUNT).unwrap(),
        verify::partial_trace_monotonicity(SEED, COUNT).unwrap(),
        verify::commuting_unitary_invariance(SEED, COUNT).unwrap(),
    ])
}

fn criterion_5() -> Outcome {
    from_checks(&[
        verify::non_covariant_fixture_rejected().unwrap(),
        verify::channel_monotonicity(SEED, COUNT, &CHANNEL_DIMS).unwrap(),
        verify::selective_monotonicity(SEED, COUNT, &CHANNEL_DIMS).unwrap(),
    ])
}

fn criterion_6() -> Outcome {
    let checks: Vec<CheckReport> = [2, 3, 4]
        .into_iter()
        .map(|k| verify::weak_superadditivity(SEED, COUNT, k).unwrap())
        .collect();
    from_checks(&checks)
}

fn criterion_7() -> Outcome {
    from_checks(&[
        verify::energy_conservation(SEED).unwrap(),
        verify::catalytic_moments().unwrap(),
        verify::reduced_channel_agreement(SEED).unwrap(),
        verify::two_qubit_closed_form(1..=50).unwrap(),
    ])
}

fn criterion_8() -> Outcome {
    let f = MonotoneFunction::wigner_yanase();
    let rows = fig1_sweep(1..=50, &f).unwrap();
    let gap = |m: usize| rows[m - 1].gap;
    let far = fig1_sweep(200..=200, &f).unwrap()[0].gap;
    let all_negative = rows.iter().skip(1).all(|r| r.gap < 0.0);
    let gap1_zero = gap(1).abs() <= 1e-10;
    let peak = gap(4).abs() > gap(2).abs() && gap(4).abs() > gap(20).abs();
    let decays = far.abs() < gap(4).abs() / 10.0;
    let argmax = strongest_violation(&rows[1..]).map(|r| r.m);
    let agrees = argmax == Some(4);
    Outcome {
        passed: all_negative && gap1_zero && peak && decays && agrees,
        detail: format!(
            "gap<0 on [2,50]: {all_negative}; gap(1) = {:.1e}; gap(2) = {:.12}, gap(4) = {:.12}, \
             gap(20) = {:.12}, gap(200) = {far:.12}; argmax over [2,50] = {argmax:?} ({})",
            gap(1),
            gap(2),
            gap(4),
            gap(20),
            if agrees { "matches M = 4" } else { "DISCREPANCY with M = 4" }
        ),
    }
}

fn criterion_9() -> Outcome {
    let f = MonotoneFunction::wigner_yanase();
    let report = multipartite_violation(&hadamard(), 8, &f, 48).unwrap();
    let ancilla_ok = (report.i_ancilla - 5.25).abs() <= 1e-10;
    let n_star_ok = report
        .n_star
        .is_some_and(|n| n as f64 * report.i_local > 5.25);

    // sums of marginals of dense simulations, N = 1..8
    let sums: Vec<f64> = (1..=8)
        .map(|n| {
            let run = run_protocol(&AbergConfig::hadamard(n, 8).unwrap()).unwrap();
            run.marginals
                .iter()
                .map(|r| skew_info(r, &Observable::number(2), &f).unwrap().value)
                .sum()
        })
        .collect();
    let increments: Vec<f64> = sums.windows(2).map(|w| w[1] - w[0]).collect();
    let spread = increments
        .iter()
        .map(|d| (d - report.i_local).abs())
        .fold((sums[0] - report.i_local).abs(), f64::max);
    let linear_ok = spread <= 1e-9 && (report.slope - report.i_local).abs() <= 1e-9;

    let max_global_32 = report
        .curve
        .iter()
        .filter(|p| p.n <= 32)
        .map(|p| p.global)
        .fold(0.0, f64::max);
    let bounded = max_global_32 <= 5.25 + 1e-9;
    Outcome {
        passed: ancilla_ok && n_star_ok && linear_ok && bounded,
        detail: format!(
            "I_ancilla = {:.12}; I_local = {:.12}; N_star = {:?}; increment spread {spread:.1e}; \
             max global for N <= 32 = {max_global_32:.6}",
            report.i_ancilla, report.i_local, report.n_star
        ),
    }
}

fn criterion_10() -> Outcome {
    let mut checks = vec![verify::conservative_soundness(SEED, COUNT).unwrap()];
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/aberg_m4.json");
    let bundled = ScenarioFile::parse(&std::fs::read_to_string(path).unwrap())
        .unwrap()
        .scenario()
        .unwrap();
    let naive = clocknet::evaluate_decision(&bundled, Rule::Naive).unwrap();
    let naive_ok = naive.decision && !naive.sound;
    checks.push(verify::scaled_rule_witness(1.2).unwrap());
    checks.push(verify::scaled_rule_witness(2.0).unwrap());
    let mut outcome = from_checks(&checks);
    outcome.passed &= naive_ok;
    outcome.detail = format!(
        "{}; bundled M=4 scenario naive request unsound: {naive_ok}",
        outcome.detail
    );
    outcome
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 10] = [
        ("oracle equivalence", criterion_1),
        ("exact |+> value", criterion_2),
        ("pure-state variance identity", criterion_3),
        ("symmetric/additive/register/convex/partial-trace/commuting-unitary", criterion_4),
        ("deterministic and selective monotonicity", criterion_5),
        ("weak superadditivity", criterion_6),
        ("catalytic protocol simulation", criterion_7),
        ("two-qubit gap curve", criterion_8),
        ("multipartite construction", criterion_9),
        ("clock harness", criterion_10),
    ];
    let mut failed = Vec::new();
    for (i, (title, check)) in criteria.iter().enumerate() {
        let outcome = check();
        report(i as u32 + 1, title, &outcome);
        if !outcome.passed {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
