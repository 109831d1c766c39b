//! Simulated distributed clock requests.
//!
//! Each party holds one marginal of a shared state and reports the skew
//! information of that marginal. A requester compares the reports with a
//! threshold `I_th` and decides whether to ask for the clock state. The naive
//! rule trusts the sum of reports; the conservative rule uses the mean, which
//! weak superadditivity turns into a guarantee on the global value.
//!
//! Parties are simulated in-process and the classical channel is an
//! append-only [`ReportLog`].

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aberg::{block_output, hadamard, two_qubit_closed_form, EtaState};
use crate::error::{Error, Result};
use crate::io::MatrixFile;
use crate::monotone::{builtin, MonotoneFunction};
use crate::qmat::{embed_local_observables, partial_trace, tensor_all, CMatrix, DensityMatrix, Observable, SubsystemLayout};
use crate::random::{self, TestRng};
use crate::skew::skew_info;

/// Slack granted to the global value when judging a request.
pub const SOUNDNESS_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rule {
    /// Request when `sum >= I_th`.
    Naive,
    /// Request when `sum / k >= I_th`.
    Conservative,
    /// Request when `c sum / k >= I_th`.
    Scaled(f64),
}

impl Rule {
    pub fn factor(&self, k: usize) -> f64 {
        match *self {
            Rule::Naive => 1.0,
            Rule::Conservative => 1.0 / k as f64,
            Rule::Scaled(c) => c / k as f64,
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Naive => f.pad("naive"),
            Rule::Conservative => f.pad("conservative"),
            Rule::Scaled(c) => f.pad(&format!("scaled:{c}")),
        }
    }
}

impl FromStr for Rule {
    type Err = Error;

    /// `naive`, `conservative` or `scaled:<c>`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "naive" => Ok(Rule::Naive),
            "conservative" => Ok(Rule::Conservative),
            other => {
                let c = other
                    .strip_prefix("scaled:")
                    .and_then(|c| c.parse::<f64>().ok())
                    .ok_or_else(|| Error::InvalidParameter(format!("unknown rule `{s}`")))?;
                if !(c > 0.0 && c.is_finite()) {
                    return Err(Error::InvalidParameter(format!("scale {c} must be positive")));
                }
                Ok(Rule::Scaled(c))
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Party {
    pub id: usize,
    pub marginal: DensityMatrix,
    pub local_h: Observable,
    pub reported_value: f64,
}

#[derive(Debug, Clone)]
pub struct ClockScenario {
    global_state: DensityMatrix,
    layout: SubsystemLayout,
    h_list: Vec<Observable>,
    threshold: f64,
    f: MonotoneFunction,
    perturbation: Vec<f64>,
}

impl ClockScenario {
    pub fn new(
        global_state: DensityMatrix,
        layout: SubsystemLayout,
        h_list: Vec<Observable>,
        threshold: f64,
        f: MonotoneFunction,
    ) -> Result<Self> {
        if !(threshold > 0.0 && threshold.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "threshold must be positive, got {threshold}"
            )));
        }
        layout.check(global_state.dim())?;
        // validates count and dimensions of the local observables
        embed_local_observables(&h_list, &layout)?;
        let k = layout.len();
        Ok(Self {
            global_state,
            layout,
            h_list,
            threshold,
            f,
            perturbation: vec![0.0; k],
        })
    }

    /// Adds `delta[j]` to party `j`'s report. All zeros means honest parties.
    pub fn with_perturbation(mut self, delta: Vec<f64>) -> Result<Self> {
        if delta.len() != self.layout.len() {
            return Err(Error::Layout(format!(
                "{} perturbations for {} parties",
                delta.len(),
                self.layout.len()
            )));
        }
        self.perturbation = delta;
        Ok(self)
    }

    pub fn global_state(&self) -> &DensityMatrix {
        &self.global_state
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn h_list(&self) -> &[Observable] {
        &self.h_list
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn f(&self) -> &MonotoneFunction {
        &self.f
    }

    pub fn parties(&self) -> usize {
        self.layout.len()
    }

    /// `I^f` of the global state under the summed observable.
    pub fn actual_global(&self) -> Result<f64> {
        let total = embed_local_observables(&self.h_list, &self.layout)?;
        Ok(skew_info(&self.global_state, &total, &self.f)?.value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReportEntry {
    pub party: usize,
    pub value: f64,
}

/// Ordered record of the messages received by the requester.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ReportLog {
    entries: Vec<ReportEntry>,
}

impl ReportLog {
    pub fn push(&mut self, party: usize, value: f64) {
        self.entries.push(ReportEntry { party, value });
    }

    pub fn entries(&self) -> &[ReportEntry] {
        &self.entries
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.value).collect()
    }
}

pub fn run_reporting(scenario: &ClockScenario) -> Result<Vec<Party>> {
    (0..scenario.parties())
        .map(|j| {
            let marginal = partial_trace(&scenario.global_state, &scenario.layout, &[j])?;
            let local_h = scenario.h_list[j].clone();
            let honest = skew_info(&marginal, &local_h, &scenario.f)?.value;
            Ok(Party {
                id: j,
                marginal,
                local_h,
                reported_value: honest + scenario.perturbation[j],
            })
        })
        .collect()
}

pub fn report_log(parties: &[Party]) -> ReportLog {
    let mut log = ReportLog::default();
    for p in parties {
        log.push(p.id, p.reported_value);
    }
    log
}

pub fn decide(reports: &[f64], threshold: f64, rule: Rule) -> Result<bool> {
    if reports.is_empty() {
        return Err(Error::InvalidParameter("no reports to decide on".into()));
    }
    let sum: f64 = reports.iter().sum();
    Ok(rule.factor(reports.len()) * sum >= threshold)
}

#[derive(Debug, Clone, Serialize)]
pub struct DecisionRecord {
    pub decision: bool,
    pub reports: Vec<f64>,
    pub actual_global: f64,
    /// A declined request is always sound; an accepted one needs
    /// `actual_global >= I_th`.
    pub sound: bool,
}

pub fn evaluate_decision(scenario: &ClockScenario, rule: Rule) -> Result<DecisionRecord> {
    let log = report_log(&run_reporting(scenario)?);
    let reports = log.values();
    let decision = decide(&reports, scenario.threshold, rule)?;
    let actual_global = scenario.actual_global()?;
    Ok(DecisionRecord {
        decision,
        sound: !decision || actual_global >= scenario.threshold - SOUNDNESS_TOLERANCE,
        reports,
        actual_global,
    })
}

/// Evaluates independent scenarios in parallel, keeping input order.
pub fn evaluate_all(scenarios: &[ClockScenario], rule: Rule) -> Result<Vec<DecisionRecord>> {
    scenarios.par_iter().map(|s| evaluate_decision(s, rule)).collect()
}

/// On-disk scenario: `{layout, global_state, h_list, threshold, f_id, alpha?, rule?}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub layout: Vec<usize>,
    pub global_state: MatrixFile,
    pub h_list: Vec<MatrixFile>,
    pub threshold: f64,
    pub f_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_scenario(scenario: &ClockScenario, rule: Option<Rule>) -> Self {
        Self {
            layout: scenario.layout.dims().to_vec(),
            global_state: MatrixFile::from_matrix(scenario.global_state.matrix()),
            h_list: scenario
                .h_list
                .iter()
                .map(|h| MatrixFile::from_matrix(h.matrix()))
                .collect(),
            threshold: scenario.threshold,
            f_id: builtin_id(&scenario.f),
            alpha: scenario.f.alpha().filter(|_| scenario.f.id().starts_with("WYD")),
            rule: rule.map(|r| r.to_string()),
        }
    }

    pub fn scenario(&self) -> Result<ClockScenario> {
        let f = builtin(&self.f_id, self.alpha)?;
        let rho = DensityMatrix::new(self.global_state.to_matrix()?)?;
        let h_list = self
            .h_list
            .iter()
            .map(|m| Observable::new(m.to_matrix()?))
            .collect::<Result<Vec<_>>>()?;
        ClockScenario::new(rho, SubsystemLayout::new(self.layout.clone())?, h_list, self.threshold, f)
    }

    pub fn rule(&self) -> Result<Option<Rule>> {
        self.rule.as_deref().map(str::parse).transpose()
    }
}

fn builtin_id(f: &MonotoneFunction) -> String {
    if f.id().starts_with("WYD") {
        "WYD".into()
    } else {
        f.id().to_string()
    }
}

/// Two-qubit protocol output at ladder width `m` with `H_i = |1><1|`.
pub fn aberg_two_qubit_scenario(m: usize, threshold: f64, f: MonotoneFunction) -> Result<ClockScenario> {
    ClockScenario::new(
        two_qubit_closed_form(m)?,
        SubsystemLayout::uniform(2, 2)?,
        vec![Observable::number(2); 2],
        threshold,
        f,
    )
}

/// Protocol output on `sum(block_sizes)` Hadamard steps, one party per block.
pub fn aberg_block_scenario(
    m: usize,
    block_sizes: &[usize],
    threshold: f64,
    f: MonotoneFunction,
) -> Result<ClockScenario> {
    let n: usize = block_sizes.iter().sum();
    let moments = EtaState::new(m, 0)?.moments(n);
    let block = block_output(&hadamard(), block_sizes, &moments)?;
    ClockScenario::new(block.state, block.layout, block.observables, threshold, f)
}

/// Thresholds probing both sides of the global and summed values.
fn probe_thresholds(global: f64, sum: f64, k: usize) -> Vec<f64> {
    let mean = sum / k as f64;
    let mut t = vec![mean, global, sum, 0.5 * (global + sum), 0.5 * mean, 1.5 * sum];
    t.retain(|&x| x > 0.0);
    t
}

/// Protocol scenarios for `M` in the range: two-qubit outputs and block
/// splits of longer runs, each at several thresholds.
pub fn aberg_scenarios(ms: std::ops::RangeInclusive<usize>, f: &MonotoneFunction) -> Result<Vec<ClockScenario>> {
    let splits: [&[usize]; 4] = [&[1, 1, 1], &[2, 2], &[1, 3], &[2, 2, 2, 2]];
    let mut out = Vec::new();
    for m in ms {
        let base = aberg_two_qubit_scenario(m, 1.0, f.clone())?;
        out.extend(threshold_variants(&base)?);
        for split in splits {
            let base = aberg_block_scenario(m, split, 1.0, f.clone())?;
            out.extend(threshold_variants(&base)?);
        }
    }
    Ok(out)
}

fn threshold_variants(base: &ClockScenario) -> Result<Vec<ClockScenario>> {
    let global = base.actual_global()?;
    let sum: f64 = run_reporting(base)?.iter().map(|p| p.reported_value).sum();
    probe_thresholds(global, sum, base.parties())
        .into_iter()
        .map(|t| {
            let mut s = base.clone();
            s.threshold = t;
            Ok(s)
        })
        .collect()
}

/// Product of independent random states.
pub fn product_scenario(rng: &mut TestRng, dims: &[usize], f: MonotoneFunction) -> Result<ClockScenario> {
    let states: Vec<DensityMatrix> = dims.iter().map(|&d| random::density(rng, d)).collect();
    let matrices: Vec<CMatrix> = states.iter().map(|s| s.matrix().clone()).collect();
    let rho = DensityMatrix::new(tensor_all(&matrices))?;
    let h_list = dims.iter().map(|&d| random::observable(rng, d)).collect();
    with_random_threshold(rng, rho, SubsystemLayout::new(dims.to_vec())?, h_list, f)
}

/// Random correlated state on `k` parties of local dimension 2 or 3.
pub fn random_scenario(rng: &mut TestRng, k: usize, f: MonotoneFunction) -> Result<ClockScenario> {
    let dims: Vec<usize> = (0..k).map(|_| rng.random_range(2..=3)).collect();
    let total: usize = dims.iter().product();
    let rank = rng.random_range(1..=total);
    let rho = random::density_of_rank(rng, total, rank);
    let h_list = dims.iter().map(|&d| random::observable(rng, d)).collect();
    with_random_threshold(rng, rho, SubsystemLayout::new(dims)?, h_list, f)
}

fn with_random_threshold(
    rng: &mut TestRng,
    rho: DensityMatrix,
    layout: SubsystemLayout,
    h_list: Vec<Observable>,
    f: MonotoneFunction,
) -> Result<ClockScenario> {
    let k = layout.len();
    let probe = ClockScenario::new(rho, layout, h_list, 1.0, f)?;
    let sum: f64 = run_reporting(&probe)?.iter().map(|p| p.reported_value).sum();
    // uniform on (0, 2 * mean] so that both decisions occur
    let scale = (2.0 * sum / k as f64).max(1e-6);
    let mut scenario = probe;
    scenario.threshold = scale * (1.0 - rng.random::<f64>());
    Ok(scenario)
}

#[derive(Debug, Clone, Serialize)]
pub struct ScaledWitness {
    pub c: f64,
    pub m: usize,
    pub parties: usize,
    pub block_size: usize,
    pub threshold: f64,
    pub record: DecisionRecord,
}

/// Searches protocol outputs split into `k` equal blocks for a scenario in
/// which the rule `c sum / k >= I_th` requests but the global value falls
/// short. Block sizes up to `max_block` and ladder widths `ms` are tried in
/// order.
pub fn scaled_rule_witness(
    c: f64,
    k: usize,
    ms: &[usize],
    max_block: usize,
    f: &MonotoneFunction,
) -> Result<Option<ScaledWitness>> {
    if k < 2 {
        return Err(Error::InvalidParameter("need at least two parties".into()));
    }
    let rule = Rule::Scaled(c);
    for &m in ms {
        for size in 1..=max_block {
            let base = match aberg_block_scenario(m, &vec![size; k], 1.0, f.clone()) {
                Ok(s) => s,
                Err(Error::InvalidParameter(_)) => break,
                Err(e) => return Err(e),
            };
            let global = base.actual_global()?;
            let sum: f64 = run_reporting(&base)?.iter().map(|p| p.reported_value).sum();
            let scaled = rule.factor(k) * sum;
            if scaled > global + 10.0 * SOUNDNESS_TOLERANCE {
                let mut scenario = base;
                scenario.threshold = 0.5 * (scaled + global);
                let record = evaluate_decision(&scenario, rule)?;
                if record.decision && !record.sound {
                    return Ok(Some(ScaledWitness {
                        c,
                        m,
                        parties: k,
                        block_size: size,
                        threshold: scenario.threshold,
                        record,
                    }));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aberg::two_qubit_family;
    use crate::qmat::{ket_bra, CVector, C64};
    use approx::assert_abs_diff_eq;

    fn wy() -> MonotoneFunction {
        MonotoneFunction::wigner_yanase()
    }

    #[test]
    fn rule_examples() {
        assert!(decide(&[0.3, 0.3], 0.5, Rule::Naive).unwrap());
        assert!(!decide(&[0.3, 0.3], 0.5, Rule::Conservative).unwrap());
        for th in [0.1, 0.3, 0.5] {
            assert_eq!(
                decide(&[0.3], th, Rule::Naive).unwrap(),
                decide(&[0.3], th, Rule::Conservative).unwrap()
            );
        }
        assert!(decide(&[], 0.5, Rule::Naive).is_err());
        assert_eq!("scaled:1.2".parse::<Rule>().unwrap(), Rule::Scaled(1.2));
        assert_eq!("Naive".parse::<Rule>().unwrap(), Rule::Naive);
        assert!("scaled:-1".parse::<Rule>().is_err());
        assert!("bold".parse::<Rule>().is_err());
    }

    #[test]
    fn threshold_must_be_positive() {
        let rho = DensityMatrix::maximally_mixed(4).unwrap();
        let layout = SubsystemLayout::uniform(2, 2).unwrap();
        let h = vec![Observable::number(2); 2];
        assert!(ClockScenario::new(rho.clone(), layout.clone(), h.clone(), 0.0, wy()).is_err());
        assert!(ClockScenario::new(rho.clone(), layout.clone(), h[..1].to_vec(), 0.1, wy()).is_err());
        let wrong = SubsystemLayout::uniform(3, 2).unwrap();
        assert!(ClockScenario::new(rho, wrong, h, 0.1, wy()).is_err());
    }

    #[test]
    fn reporting_examples() {
        let plus = CVector::from_vec(vec![C64::new(0.5f64.sqrt(), 0.0); 2]);
        let q = ket_bra(&plus, &plus);
        let rho = DensityMatrix::new(tensor_all([&q, &q, &q])).unwrap();
        let s = ClockScenario::new(
            rho,
            SubsystemLayout::uniform(2, 3).unwrap(),
            vec![Observable::number(2); 3],
            0.1,
            wy(),
        )
        .unwrap();
        let parties = run_reporting(&s).unwrap();
        for p in &parties {
            assert_abs_diff_eq!(p.reported_value, 0.25, epsilon = 1e-12);
        }

        let mixed = ClockScenario::new(
            DensityMatrix::maximally_mixed(6).unwrap(),
            SubsystemLayout::new(vec![2, 3]).unwrap(),
            vec![Observable::number(2), Observable::number(3)],
            0.1,
            wy(),
        )
        .unwrap();
        let log = report_log(&run_reporting(&mixed).unwrap());
        assert_eq!(log.entries().len(), 2);
        assert!(log.values().iter().all(|&v| v.abs() < 1e-12));

        let s = aberg_block_scenario(5, &[1, 1, 1, 1], 0.1, wy()).unwrap();
        let reports: Vec<f64> = run_reporting(&s).unwrap().iter().map(|p| p.reported_value).collect();
        for r in &reports {
            assert_abs_diff_eq!(*r, reports[0], epsilon = 1e-12);
        }
    }

    #[test]
    fn two_qubit_naive_counterexample() {
        let s = aberg_two_qubit_scenario(4, 0.15, wy()).unwrap();
        let naive = evaluate_decision(&s, Rule::Naive).unwrap();
        assert!(naive.decision);
        assert!(!naive.sound);
        assert_abs_diff_eq!(naive.actual_global, 0.134288654717999, epsilon = 1e-12);
        let cons = evaluate_decision(&s, Rule::Conservative).unwrap();
        assert!(cons.sound);
        assert!(!cons.decision);
    }

    #[test]
    fn honest_reports_match_marginals() {
        let s = aberg_two_qubit_scenario(3, 0.1, wy()).unwrap();
        let fam = two_qubit_family(3).unwrap();
        let layout = SubsystemLayout::uniform(2, 2).unwrap();
        let direct = skew_info(
            &partial_trace(&fam.simulated, &layout, &[1]).unwrap(),
            &Observable::number(2),
            &wy(),
        )
        .unwrap()
        .value;
        let parties = run_reporting(&s).unwrap();
        assert_abs_diff_eq!(parties[1].reported_value, direct, epsilon = 1e-12);

        let shifted = s.with_perturbation(vec![0.1, 0.0]).unwrap();
        let p2 = run_reporting(&shifted).unwrap();
        assert_abs_diff_eq!(p2[0].reported_value, parties[0].reported_value + 0.1, epsilon = 1e-15);
    }

    #[test]
    fn product_scenarios_are_sound_under_both_rules() {
        let mut r = random::rng(4);
        for _ in 0..20 {
            let s = product_scenario(&mut r, &[2, 3], wy()).unwrap();
            for rule in [Rule::Naive, Rule::Conservative] {
                assert!(evaluate_decision(&s, rule).unwrap().sound);
            }
        }
    }

    #[test]
    fn scenario_file_round_trip() {
        let s = aberg_two_qubit_scenario(4, 0.15, wy()).unwrap();
        let file = ScenarioFile::from_scenario(&s, Some(Rule::Naive));
        let text = serde_json::to_string(&file).unwrap();
        let back = ScenarioFile::parse(&text).unwrap();
        assert_eq!(back.rule().unwrap(), Some(Rule::Naive));
        let again = back.scenario().unwrap();
        let a = evaluate_decision(&s, Rule::Naive).unwrap();
        let b = evaluate_decision(&again, Rule::Naive).unwrap();
        assert_eq!(a.reports, b.reports);
        assert!(ScenarioFile::parse("{\"layout\": [2]}").is_err());
    }

    #[test]
    fn scaled_witness_for_c_two() {
        let w = scaled_rule_witness(2.0, 2, &[2, 4, 8], 16, &wy()).unwrap().unwrap();
        assert!(w.record.decision && !w.record.sound);
    }
}
