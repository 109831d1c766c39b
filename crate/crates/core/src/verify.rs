//! Randomized property suites.
//!
//! Every check draws `count` instances from a ChaCha stream seeded by
//! `(seed, check name, instance index)`, so results do not depend on the
//! number of worker threads. Differences are measured against
//! `max(1, |reference|)` so that large observables do not inflate the
//! tolerance budget.

use rayon::prelude::*;
use serde::Serialize;

use crate::aberg::{
    aberg_unitary, catalytic_check, fig1_sweep, reduced_channel, run_protocol, two_qubit_family, AbergConfig,
    LadderAncilla,
};
use crate::clocknet::{self, Rule};
use crate::covariant::{is_covariant, selective_monotonicity_check, QuantumChannel};
use crate::error::{Error, Result};
use crate::monotone::{log_grid, MonotoneFunction};
use crate::qmat::{
    commutator, embed_local_observables, identity, max_abs, partial_trace, real_diagonal, tensor, DensityMatrix,
    Observable, SubsystemLayout,
};
use crate::random::{self, EnergyFrame, TestRng};
use crate::skew::{mixture, register_identity_check, skew_info, variance, wy_direct, wyd_direct};

pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_COUNT: usize = 200;
pub const PROPERTY_TOLERANCE: f64 = 1e-9;
pub const WEAK_TOLERANCE: f64 = 1e-10;
pub const ORACLE_ALPHAS: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 0.9];
pub const ORACLE_DIMS: [usize; 5] = [2, 3, 4, 6, 8];
pub const CHANNEL_DIMS: [usize; 4] = [2, 3, 4, 6];

pub const SUITES: [&str; 7] = [
    "axioms",
    "monotonicity",
    "convexity",
    "additivity",
    "weak-superadditivity",
    "aberg",
    "clocks",
];

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub instances: usize,
    pub violations: usize,
    pub max_violation: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckReport {
    fn from_violations(name: &str, tolerance: f64, values: &[f64]) -> Self {
        let violations = values.iter().filter(|&&v| !(v <= tolerance)).count();
        let max_violation = values.iter().copied().fold(0.0, f64::max);
        Self {
            name: name.into(),
            instances: values.len(),
            violations,
            max_violation,
            tolerance,
            passed: violations == 0 && !values.is_empty(),
            note: None,
        }
    }

    fn flag(name: &str, ok: bool, note: String) -> Self {
        Self {
            name: name.into(),
            instances: 1,
            violations: usize::from(!ok),
            max_violation: 0.0,
            tolerance: 0.0,
            passed: ok,
            note: Some(note),
        }
    }

    fn with_note(mut self, note: String) -> Self {
        self.note = Some(note);
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub count: usize,
    pub checks: Vec<CheckReport>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub count: usize,
    pub suites: Vec<SuiteReport>,
    pub passed: bool,
}

/// Runs one suite by name, or every suite for `all`.
pub fn run(suite: &str, seed: u64, count: usize) -> Result<VerifyReport> {
    let names: Vec<&str> = match suite {
        "all" => SUITES.to_vec(),
        s if SUITES.contains(&s) => vec![s],
        other => return Err(Error::InvalidParameter(format!("unknown suite `{other}`"))),
    };
    if count == 0 {
        return Err(Error::InvalidParameter("count must be positive".into()));
    }
    let suites = names
        .into_iter()
        .map(|name| run_suite(name, seed, count))
        .collect::<Result<Vec<_>>>()?;
    let passed = suites.iter().all(|s| s.passed);
    Ok(VerifyReport {
        seed,
        count,
        suites,
        passed,
    })
}

fn run_suite(name: &str, seed: u64, count: usize) -> Result<SuiteReport> {
    let checks = match name {
        "axioms" => vec![
            standard_axioms(),
            kernel_symmetry(seed, count),
            oracle_equivalence(seed, count, &ORACLE_DIMS)?,
            pure_state_variance(seed, count)?,
            symmetric_vanishing(seed, count)?,
            commuting_unitary_invariance(seed, count)?,
        ],
        "monotonicity" => vec![
            non_covariant_fixture_rejected()?,
            partial_trace_monotonicity(seed, count)?,
            channel_monotonicity(seed, count, &CHANNEL_DIMS)?,
            selective_monotonicity(seed, count, &CHANNEL_DIMS)?,
        ],
        "convexity" => vec![convexity(seed, count)?],
        "additivity" => vec![product_additivity(seed, count)?, register_identity(seed, count)?],
        "weak-superadditivity" => [2, 3, 4]
            .into_iter()
            .map(|k| weak_superadditivity(seed, count, k))
            .collect::<Result<Vec<_>>>()?,
        "aberg" => vec![
            energy_conservation(seed)?,
            catalytic_moments()?,
            reduced_channel_agreement(seed)?,
            two_qubit_closed_form(1..=50)?,
            fig1_violation()?,
        ],
        "clocks" => vec![
            conservative_soundness(seed, count)?,
            naive_unsoundness_witness()?,
            scaled_rule_witness(1.2)?,
            scaled_rule_witness(2.0)?,
        ],
        other => return Err(Error::InvalidParameter(format!("unknown suite `{other}`"))),
    };
    let passed = checks.iter().all(|c| c.passed);
    Ok(SuiteReport {
        suite: name.into(),
        seed,
        count,
        checks,
        passed,
    })
}

/// Registered functions exercised by the suites.
pub fn registered_functions() -> Vec<MonotoneFunction> {
    let mut fs = vec![MonotoneFunction::wigner_yanase(), MonotoneFunction::sld()];
    for a in [0.1, 0.25, 0.75, 0.9] {
        fs.push(MonotoneFunction::wyd(a).expect("alpha in (0, 1)"));
    }
    fs
}

/// Independent stream for instance `i` of the named check.
pub fn instance_rng(seed: u64, name: &str, i: usize) -> TestRng {
    let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
    for b in name.bytes().chain((i as u64).to_le_bytes()) {
        h = (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3);
    }
    random::rng(h)
}

fn par_instances<T: Send>(
    seed: u64,
    name: &str,
    count: usize,
    f: impl Fn(&mut TestRng) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    (0..count)
        .into_par_iter()
        .map(|i| f(&mut instance_rng(seed, name, i)))
        .collect()
}

fn scaled(diff: f64, reference: f64) -> f64 {
    diff / reference.abs().max(1.0)
}

pub fn standard_axioms() -> CheckReport {
    let grid = log_grid(1e-6, 1e6, 481);
    let values: Vec<f64> = registered_functions()
        .iter()
        .map(|f| {
            let r = f.validate(&grid);
            r.normalization_error.max(r.symmetry_error).max(r.monotonicity_violation)
        })
        .collect();
    CheckReport::from_violations("standard-axioms", crate::monotone::AXIOM_TOLERANCE, &values)
}

pub fn kernel_symmetry(seed: u64, count: usize) -> CheckReport {
    let fs = registered_functions();
    let values: Vec<f64> = (0..count)
        .into_par_iter()
        .map(|i| {
            use rand::Rng;
            let mut r = instance_rng(seed, "kernel-symmetry", i);
            let (x, y): (f64, f64) = (r.random(), r.random());
            fs.iter()
                .map(|f| {
                    let (a, b) = (f.weight_unchecked(x, y), f.weight_unchecked(y, x));
                    if a < 0.0 || b < 0.0 {
                        f64::INFINITY
                    } else {
                        (a - b).abs()
                    }
                })
                .fold(0.0, f64::max)
        })
        .collect();
    CheckReport::from_violations("kernel-symmetry", 1e-15, &values)
}

/// Spectral formula against the trace oracles, relative difference.
pub fn oracle_equivalence(seed: u64, count: usize, dims: &[usize]) -> Result<CheckReport> {
    let mut values = Vec::new();
    for &d in dims {
        let name = format!("oracle-d{d}");
        let per: Vec<f64> = par_instances(seed, &name, count, |r| {
            let rho = random::density(r, d);
            let h = random::observable(r, d);
            let mut worst: f64 = 0.0;
            let wy = skew_info(&rho, &h, &MonotoneFunction::wigner_yanase())?.value;
            worst = worst.max(relative(wy, wy_direct(&rho, &h)?));
            for a in ORACLE_ALPHAS {
                let spectral = skew_info(&rho, &h, &MonotoneFunction::wyd(a)?)?.value;
                worst = worst.max(relative(spectral, wyd_direct(&rho, &h, a)?));
            }
            Ok(worst)
        })?;
        values.extend(per);
    }
    Ok(CheckReport::from_violations("oracle-equivalence", PROPERTY_TOLERANCE, &values)
        .with_note(format!("dims {dims:?}, {count} pairs each")))
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-12)
}

/// `I^f(|psi><psi|, H) = Var(H)` for every registered `f`.
pub fn pure_state_variance(seed: u64, count: usize) -> Result<CheckReport> {
    let fs = registered_functions();
    let values = par_instances(seed, "pure-variance", count, |r| {
        use rand::Rng;
        let d = r.random_range(2..=6);
        let rho = random::pure(r, d);
        let h = random::observable(r, d);
        let var = variance(&rho, &h)?;
        let mut worst: f64 = 0.0;
        for f in &fs {
            worst = worst.max(scaled((skew_info(&rho, &h, f)?.value - var).abs(), var));
        }
        Ok(worst)
    })?;
    Ok(CheckReport::from_violations("pure-state-variance", PROPERTY_TOLERANCE, &values))
}

fn random_frame_state(r: &mut TestRng, frame: &EnergyFrame) -> DensityMatrix {
    // diagonal in the energy basis, then mixed within degenerate levels
    let p = random::probabilities(r, frame.dim());
    let diag = real_diagonal(&p);
    let w = random::commuting_unitary(r, frame);
    let m = &w * (&frame.basis * diag * frame.basis.adjoint()) * w.adjoint();
    DensityMatrix::new(m).expect("unitary conjugate of a state")
}

/// States commuting with `H` carry no skew information.
pub fn symmetric_vanishing(seed: u64, count: usize) -> Result<CheckReport> {
    let fs = registered_functions();
    let values = par_instances(seed, "symmetric-vanishing", count, |r| {
        use rand::Rng;
        let d = r.random_range(2..=6);
        let frame = EnergyFrame::random(r, d);
        let rho = random_frame_state(r, &frame);
        let h = frame.observable();
        let mut worst: f64 = 0.0;
        for f in &fs {
            worst = worst.max(skew_info(&rho, &h, f)?.value.abs());
        }
        Ok(worst)
    })?;
    Ok(CheckReport::from_violations("symmetric-vanishing", PROPERTY_TOLERANCE, &values))
}

pub fn commuting_unitary_invariance(seed: u64, count: usize) -> Result<CheckReport> {
    let fs = registered_functions();
    let values = par_instances(seed, "commuting-unitary", count, |r| {
        use rand::Rng;
        let d = r.random_range(2..=6);
        let frame = EnergyFrame::random(r, d);
        let h = frame.observable();
        let rho = random::density(r, d);
        let u = random::commuting_unitary(r, &frame);
        let moved = DensityMatrix::new(&u * rho.matrix() * u.adjoint())?;
        let mut worst: f64 = 0.0;
        for f in &fs {
            let a = skew_info(&rho, &h, f)?.value;
            let b = skew_info(&moved, &h, f)?.value;
            worst = worst.max(scaled((a - b).abs(), a));
        }
        Ok(worst)
    })?;
    Ok(CheckReport::from_violations("commuting-unitary-invariance", PROPERTY_TOLERANCE, &values))
}

/// A Hadamard gate does not commute with `diag(0, 1)` dynamics; the
/// covariance gate must refuse it before any monotonicity claim is made.
pub fn non_covariant_fixture_rejected() -> Result<CheckReport> {
    let ch = QuantumChannel::unitary(crate::aberg::hadamard())?;
    let h = Observable::number(2);
    let cov = is_covariant(&ch, &h, &h)?;
    Ok(CheckReport::flag(
        "non-covariant-fixture-rejected",
        !cov.covariant,
        format!("fixture covariance deviation {:e}", cov.max_deviation),
    ))
}

pub fn partial_trace_monotonicity(seed: u64, count: usize) -> Result<CheckReport> {
    let fs = registered_functions();
    let values = par_instances(seed, "partial-trace", count, |r| {
        use rand::Rng;
        let dims = vec![r.random_range(2..=3), r.random_range(2..=3)];
        let layout = SubsystemLayout::new(dims.clone())?;
        let rho = random::density(r, layout.total());
        let h_list = vec![random::observable(r, dims[0]), random::observable(r, dims[1])];
        let total = embed_local_observables(&h_list, &layout)?;
        let marginal = partial_trace(&rho, &layout, &[0])?;
        let mut worst: f64 = 0.0;
        for f in &fs {
            let before = skew_info(&rho, &total, f)?.value;
            let after = skew_info(&marginal, &h_list[0], f)?.value;
            worst = worst.max(scaled(after - before, before));
        }
        Ok(worst)
    })?;
    Ok(CheckReport::from_violations("partial-trace-monotonicity", PROPERTY_TOLERANCE, &values))
}

/// Generated covariant channels between frames of dimensions in `dims`.
pub fn channel_monotonicity(seed: u64, count: usize, dims: &[usize]) -> Result<CheckReport> {
    let fs = registered_functions();
    let mut values = Vec::new();
    let mut rejected = 0;
    for &d in dims {
        let name = format!("channel-d{d}");
        let per = par_instances(seed, &name, count, |r| {
            use rand::Rng;
            let d_out = r.random_range(2..=d.max(2));
            let fin = EnergyFrame::random(r, d);
            let fout = EnergyFrame::random(r, d_out);
            let ch = random::covariant_channel(r, &fin, &fout);
            let (h_in, h_out) = (fin.observable(), fout.observable());
            if !is_covariant(&ch, &h_in, &h_out)?.covariant {
                return Ok(None);
            }
            let rho = random::density(r, d);
            let out = ch.apply(&rho)?;
            let mut worst: f64 = 0.0;
            for f in &fs {
                let before = skew_info(&rho, &h_in, f)?.value;
                let after = skew_info(&out, &h_out, f)?.value;
                worst = worst.max(scaled(after - before, before));
            }
            Ok(Some(worst))
        })?;
        for v in per {
            match v {
                Some(v) => values.push(v),
                None => rejected += 1,
            }
        }
    }
    let mut report = CheckReport::from_violations("channel-monotonicity", PROPERTY_TOLERANCE, &values)
        .with_note(format!("dims {dims:?}, {rejected} generated channels failed the covariance gate"));
    report.passed &= rejected == 0;
    Ok(report)
}

pub fn selective_monotonicity(seed: u64, count: usize, dims: &[usize]) -> Result<CheckReport> {
    let fs = registered_functions();
    let mut values = Vec::new();
    for &d in dims {
        let name = format!("selective-d{d}");
        let per = par_instances(seed, &name, count, |r| {
            use rand::Rng;
            let frame = EnergyFrame::random(r, d);
            let branches = r.random_range(2..=4);
            let inst = random::commuting_instrument(r, &frame, branches)?;
            let rho = random::density(r, d);
            let h = frame.observable();
            let mut worst: f64 = 0.0;
            for f in &fs {
                let c = selective_monotonicity_check(&inst, &rho, &h, f)?;
                worst = worst.max(scaled(c.after_avg - c.before, c.before));
            }
            Ok(worst)
        })?;
        values.extend(per);
    }
    Ok(CheckReport::from_violations("selective-monotonicity", PROPERTY_TOLERANCE, &values)
        .with_note(format!("dims {dims:?}")))
}

pub fn convexity(seed: u64, count: usize) -> Result<CheckReport> {
    let fs = registered_functions();
    let values = par_instances(seed, "convexity", count, |r| {
        use rand::Rng;
        let d = r.random_range(2..=5);
        let k = r.random_range(2..=4);
        let states: Vec<DensityMatrix> = (0..k)
            .map(|_| {
                let rank = r.random_range(1..=d);
                random::density_of_rank(r, d, rank)
            })
            .collect();
        let p = random::probabilities(r, k);
        let h = random::observable(r, d);
        let mix = mixture(&states, &p)?;
        let mut worst: f64 = 0.0;
        for f in &fs {
            let lhs = skew_info(&mix, &h, f)?.value;
            let mut rhs = 0.0;
            for (s, &pk) in states.iter().zip(&p) {
                rhs += pk * skew_info(s, &h, f)?.value;
            }
            worst = worst.max(scaled(lhs - rhs, rhs));
        }
        Ok(worst)
    })?;
    Ok(CheckReport::from_violations("convexity", PROPERTY_TOLERANCE, &values))
}

pub fn product_additivity(seed: u64, count: usize) -> Result<CheckReport> {
    let fs = registered_functions();
    let values = par_instances(seed, "additivity", count, |r| {
        use rand::Rng;
        let (d1, d2) = (r.random_range(2..=3), r.random_range(2..=4));
        let (a, b) = (random::density(r, d1), random::density(r, d2));
        let (ha, hb) = (random::observable(r, d1), random::observable(r, d2));
        let layout = SubsystemLayout::new(vec![d1, d2])?;
        let total = embed_local_observables(&[ha.clone(), hb.clone()], &layout)?;
        let joint = a.tensor(&b)?;
        let mut worst: f64 = 0.0;
        for f in &fs {
            let sum = skew_info(&a, &ha, f)?.value + skew_info(&b, &hb, f)?.value;
            let global = skew_info(&joint, &total, f)?.value;
            worst = worst.max(scaled((global - sum).abs(), sum));
        }
        Ok(worst)
    })?;
    Ok(CheckReport::from_violations("product-additivity", PROPERTY_TOLERANCE, &values))
}

pub fn register_identity(seed: u64, count: usize) -> Result<CheckReport> {
    let fs = registered_functions();
    let values = par_instances(seed, "register", count, |r| {
        use rand::Rng;
        let d = r.random_range(2..=4);
        let k = r.random_range(2..=3);
        let states: Vec<DensityMatrix> = (0..k).map(|_| random::density(r, d)).collect();
        let p = random::probabilities(r, k);
        let h = random::observable(r, d);
        let mut worst: f64 = 0.0;
        for f in &fs {
            let c = register_identity_check(&states, &p, &h, f)?;
            worst = worst.max(scaled(c.difference.abs(), c.rhs));
        }
        Ok(worst)
    })?;
    Ok(CheckReport::from_violations("register-identity", PROPERTY_TOLERANCE, &values))
}

/// `global >= (1/k) sum(locals)` on random `k`-partite states.
pub fn weak_superadditivity(seed: u64, count: usize, k: usize) -> Result<CheckReport> {
    let fs = registered_functions();
    let name = format!("weak-superadditivity-k{k}");
    let values = par_instances(seed, &name, count, |r| {
        use rand::Rng;
        let dims: Vec<usize> = (0..k).map(|_| if k <= 3 { r.random_range(2..=3) } else { 2 }).collect();
        let layout = SubsystemLayout::new(dims.clone())?;
        let rank = r.random_range(1..=layout.total());
        let rho = random::density_of_rank(r, layout.total(), rank);
        let h_list: Vec<Observable> = dims.iter().map(|&d| random::observable(r, d)).collect();
        let mut worst: f64 = 0.0;
        for f in &fs {
            let g = crate::skew::superadditivity_gap(&rho, &h_list, &layout, f)?;
            let mean = g.local_sum() / k as f64;
            worst = worst.max(mean - g.global_value);
        }
        Ok(worst)
    })?;
    Ok(CheckReport::from_violations(&name, WEAK_TOLERANCE, &values))
}

/// `[H_S + H_A, V(U)] = 0` for random targets.
pub fn energy_conservation(seed: u64) -> Result<CheckReport> {
    let mut values = Vec::new();
    for d in [2usize, 3, 4] {
        for i in 0..8 {
            let mut r = instance_rng(seed, &format!("energy-d{d}"), i);
            let u = random::unitary(&mut r, d);
            let window = 2 * (d - 1) + 3 + i;
            let v = aberg_unitary(&u, window)?;
            let anc = LadderAncilla {
                window,
                offset: -(window as i64 / 2),
            };
            let h_total =
                tensor(Observable::number(d).matrix(), &identity(window)) + tensor(&identity(d), anc.hamiltonian().matrix());
            values.push(max_abs(&commutator(&v, &h_total)));
        }
    }
    Ok(CheckReport::from_violations("energy-conservation", 1e-10, &values))
}

pub fn catalytic_moments() -> Result<CheckReport> {
    let mut values = Vec::new();
    for (n, m) in [(1, 1), (2, 3), (3, 4), (4, 2), (5, 6), (6, 8)] {
        values.push(catalytic_check(&AbergConfig::hadamard(n, m)?)?.max_diff);
    }
    let mut r = random::rng(17);
    let u3 = random::unitary(&mut r, 3);
    values.push(catalytic_check(&AbergConfig::new(u3, 3, 5, 1)?)?.max_diff);
    Ok(CheckReport::from_violations("catalytic-moments", 1e-12, &values))
}

/// Every simulated marginal equals the reduced channel applied to `|0><0|`.
pub fn reduced_channel_agreement(seed: u64) -> Result<CheckReport> {
    let mut values = Vec::new();
    for (d, n, m) in [(2usize, 3usize, 4usize), (2, 4, 1), (3, 2, 3), (3, 3, 6), (4, 2, 2)] {
        let mut r = instance_rng(seed, "reduced-channel", values.len());
        let u = random::unitary(&mut r, d);
        let run = run_protocol(&AbergConfig::new(u.clone(), n, m, 0)?)?;
        let predicted = reduced_channel(&u, &run.initial_moments)?.ground_output()?;
        for marginal in &run.marginals {
            values.push(max_abs(&(marginal.matrix() - predicted.matrix())));
        }
    }
    Ok(CheckReport::from_violations("reduced-channel-agreement", 1e-10, &values))
}

pub fn two_qubit_closed_form(ms: std::ops::RangeInclusive<usize>) -> Result<CheckReport> {
    let values = ms
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|m| Ok(two_qubit_family(m)?.max_diff))
        .collect::<Result<Vec<_>>>()?;
    Ok(CheckReport::from_violations("two-qubit-closed-form", 1e-12, &values))
}

/// `gap(M) < 0` for `M` in `2..=50` and `gap(1) = 0` under Wigner-Yanase.
pub fn fig1_violation() -> Result<CheckReport> {
    let rows = fig1_sweep(1..=50, &MonotoneFunction::wigner_yanase())?;
    let bad: Vec<usize> = rows
        .iter()
        .filter(|r| if r.m == 1 { r.gap.abs() > 1e-10 } else { r.gap >= 0.0 })
        .map(|r| r.m)
        .collect();
    Ok(CheckReport {
        instances: rows.len(),
        ..CheckReport::flag("fig1-violation", bad.is_empty(), format!("rows with the wrong sign: {bad:?}"))
    })
}

/// Random correlated scenarios with `k` in `{2, 3, 4}` plus every protocol
/// scenario for `M` in `1..=12`; the mean rule must never request wrongly.
pub fn conservative_soundness(seed: u64, count: usize) -> Result<CheckReport> {
    let f = MonotoneFunction::wigner_yanase();
    let random_count = count.max(1);
    let mut scenarios = Vec::new();
    for k in [2usize, 3, 4] {
        let name = format!("clock-k{k}");
        scenarios.extend(par_instances(seed, &name, random_count, |r| {
            clocknet::random_scenario(r, k, f.clone())
        })?);
    }
    let n_random = scenarios.len();
    scenarios.extend(clocknet::aberg_scenarios(1..=12, &f)?);
    let records = clocknet::evaluate_all(&scenarios, Rule::Conservative)?;
    let values: Vec<f64> = records
        .iter()
        .zip(&scenarios)
        .map(|(rec, s)| if rec.decision { (s.threshold() - rec.actual_global).max(0.0) } else { 0.0 })
        .collect();
    let requests = records.iter().filter(|r| r.decision).count();
    Ok(
        CheckReport::from_violations("conservative-soundness", clocknet::SOUNDNESS_TOLERANCE, &values).with_note(
            format!(
                "{n_random} random and {} protocol scenarios, {requests} requests",
                scenarios.len() - n_random
            ),
        ),
    )
}

pub fn naive_unsoundness_witness() -> Result<CheckReport> {
    let s = clocknet::aberg_two_qubit_scenario(4, 0.15, MonotoneFunction::wigner_yanase())?;
    let rec = clocknet::evaluate_decision(&s, Rule::Naive)?;
    Ok(CheckReport::flag(
        "naive-unsoundness-witness",
        rec.decision && !rec.sound,
        format!(
            "M=4, I_th=0.15: reports {:?}, global {}",
            rec.reports, rec.actual_global
        ),
    ))
}

pub fn scaled_rule_witness(c: f64) -> Result<CheckReport> {
    let f = MonotoneFunction::wigner_yanase();
    let w = clocknet::scaled_rule_witness(c, 2, &[2, 3, 4, 8], 24, &f)?;
    let name = format!("scaled-rule-witness-c{c}");
    Ok(match w {
        Some(w) => CheckReport::flag(
            &name,
            true,
            format!(
                "M={}, {} parties of {} systems, I_th={}, global {}",
                w.m, w.parties, w.block_size, w.threshold, w.record.actual_global
            ),
        ),
        None => CheckReport::flag(&name, false, "no witness found".into()),
    })
}
