//! Metric-adjusted skew information and derived quantities.
//!
//! [`skew_info`] evaluates the spectral form for any registered `f`.
//! [`wy_direct`] and [`wyd_direct`] compute the Wigner-Yanase(-Dyson) members
//! through matrix powers and traces instead, and serve as independent checks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::monotone::MonotoneFunction;
use crate::qmat::{
    check_dim, embed_local_observables, matrix_power, partial_trace, tensor, trace, CMatrix,
    DensityMatrix, Observable, SubsystemLayout, C64,
};

pub const WEAK_BOUND_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct SkewResult {
    pub value: f64,
    pub f_id: String,
    /// Number of eigenvalues above the zero threshold.
    pub rank: usize,
    /// Largest eigenvalue that was treated as zero (0 when none were).
    pub largest_discarded: f64,
}

/// `I^f(rho, H) = sum_ij w_f(lambda_i, lambda_j) |<i|H|j>|^2`.
pub fn skew_info(rho: &DensityMatrix, h: &Observable, f: &MonotoneFunction) -> Result<SkewResult> {
    check_dim(rho.dim(), h.dim())?;
    let eig = rho.spectrum();
    let cut = rho.zero_threshold();
    let lambdas: Vec<f64> = eig
        .values
        .iter()
        .map(|&l| if l <= cut { 0.0 } else { l })
        .collect();
    let rank = lambdas.iter().filter(|&&l| l > 0.0).count();
    let largest_discarded = eig
        .values
        .iter()
        .filter(|&&l| l <= cut)
        .fold(0.0f64, |acc, &l| acc.max(l));

    let h_eig = eig.vectors.adjoint() * h.matrix() * &eig.vectors;
    let n = lambdas.len();
    let mut value = 0.0;
    for i in 0..n {
        for j in 0..n {
            let w = f.weight_unchecked(lambdas[i], lambdas[j]);
            if w != 0.0 {
                value += w * h_eig[(i, j)].norm_sqr();
            }
        }
    }
    Ok(SkewResult {
        value: value.max(0.0),
        f_id: f.id().to_string(),
        rank,
        largest_discarded,
    })
}

/// `Tr(rho H^2) - Tr(sqrt(rho) H sqrt(rho) H)`.
pub fn wy_direct(rho: &DensityMatrix, h: &Observable) -> Result<f64> {
    check_dim(rho.dim(), h.dim())?;
    let root = matrix_power(rho, 0.5)?;
    let hm = h.matrix();
    let first = trace(&(rho.matrix() * hm * hm)).re;
    let second = trace(&(&root * hm * &root * hm)).re;
    Ok(first - second)
}

/// `Tr(rho H^2) - Tr(rho^a H rho^(1-a) H)` for `0 < a < 1`.
pub fn wyd_direct(rho: &DensityMatrix, h: &Observable, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "WYD parameter {alpha} outside (0, 1)"
        )));
    }
    check_dim(rho.dim(), h.dim())?;
    let a = matrix_power(rho, alpha)?;
    let b = matrix_power(rho, 1.0 - alpha)?;
    let hm = h.matrix();
    let first = trace(&(rho.matrix() * hm * hm)).re;
    let second = trace(&(&a * hm * &b * hm)).re;
    Ok(first - second)
}

/// `Tr(rho H^2) - Tr(rho H)^2`.
pub fn variance(rho: &DensityMatrix, h: &Observable) -> Result<f64> {
    check_dim(rho.dim(), h.dim())?;
    let hm = h.matrix();
    let mean = trace(&(rho.matrix() * hm)).re;
    let second = trace(&(rho.matrix() * hm * hm)).re;
    Ok(second - mean * mean)
}

#[derive(Debug, Clone, Serialize)]
pub struct GapResult {
    pub global_value: f64,
    pub local_values: Vec<f64>,
    /// `global - sum(locals)`; negative means superadditivity is violated.
    pub gap: f64,
    /// `global >= (1/k) sum(locals)` within [`WEAK_BOUND_TOLERANCE`].
    pub weak_bound_satisfied: bool,
}

impl GapResult {
    pub fn from_values(global_value: f64, local_values: Vec<f64>) -> Self {
        let sum: f64 = local_values.iter().sum();
        let k = local_values.len().max(1) as f64;
        Self {
            global_value,
            gap: global_value - sum,
            weak_bound_satisfied: global_value >= sum / k - WEAK_BOUND_TOLERANCE,
            local_values,
        }
    }

    pub fn local_sum(&self) -> f64 {
        self.local_values.iter().sum()
    }
}

/// Compares `I^f` of the global state under `sum_j H_j` with the sum of the
/// marginal skew informations.
pub fn superadditivity_gap(
    rho: &DensityMatrix,
    h_list: &[Observable],
    layout: &SubsystemLayout,
    f: &MonotoneFunction,
) -> Result<GapResult> {
    let total_h = embed_local_observables(h_list, layout)?;
    let global = skew_info(rho, &total_h, f)?.value;
    let mut locals = Vec::with_capacity(h_list.len());
    for (j, h) in h_list.iter().enumerate() {
        let marginal = partial_trace(rho, layout, &[j])?;
        locals.push(skew_info(&marginal, h, f)?.value);
    }
    Ok(GapResult::from_values(global, locals))
}

#[derive(Debug, Clone, Serialize)]
pub struct RegisterCheck {
    /// `I^f(sum_k p_k rho_k (x) |k><k|, H (x) I)`
    pub lhs: f64,
    /// `sum_k p_k I^f(rho_k, H)`
    pub rhs: f64,
    pub difference: f64,
}

/// Builds the classical-register state `sum_k p_k rho_k (x) |k><k|` and
/// evaluates both sides of the register identity.
pub fn register_identity_check(
    states: &[DensityMatrix],
    probs: &[f64],
    h: &Observable,
    f: &MonotoneFunction,
) -> Result<RegisterCheck> {
    check_probabilities(probs)?;
    if states.len() != probs.len() {
        return Err(Error::DimensionMismatch {
            expected: probs.len(),
            found: states.len(),
        });
    }
    let d = h.dim();
    for s in states {
        check_dim(d, s.dim())?;
    }
    let k = states.len();
    let mut block = CMatrix::zeros(d * k, d * k);
    let mut rhs = 0.0;
    for (idx, (s, &p)) in states.iter().zip(probs).enumerate() {
        let mut proj = CMatrix::zeros(k, k);
        proj[(idx, idx)] = C64::new(1.0, 0.0);
        block += tensor(s.matrix(), &proj).scale(p);
        rhs += p * skew_info(s, h, f)?.value;
    }
    let register = DensityMatrix::new(block)?;
    let h_ext = Observable::new(tensor(h.matrix(), &CMatrix::identity(k, k)))?;
    let lhs = skew_info(&register, &h_ext, f)?.value;
    Ok(RegisterCheck {
        lhs,
        rhs,
        difference: lhs - rhs,
    })
}

pub(crate) fn check_probabilities(probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::InvalidParameter("empty probability vector".into()));
    }
    if let Some(p) = probs.iter().find(|p| !(**p >= 0.0)) {
        return Err(Error::InvalidParameter(format!("negative probability {p}")));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "probabilities sum to {total}"
        )));
    }
    Ok(())
}

/// Convex mixture `sum_k p_k rho_k`.
pub fn mixture(states: &[DensityMatrix], probs: &[f64]) -> Result<DensityMatrix> {
    check_probabilities(probs)?;
    let d = states
        .first()
        .map(DensityMatrix::dim)
        .ok_or_else(|| Error::InvalidParameter("empty ensemble".into()))?;
    let mut acc = CMatrix::zeros(d, d);
    for (s, &p) in states.iter().zip(probs) {
        check_dim(d, s.dim())?;
        acc += s.matrix().scale(p);
    }
    DensityMatrix::new(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::{real_diagonal, CVector};
    use approx::assert_abs_diff_eq;

    fn plus_state() -> DensityMatrix {
        let v = CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
        DensityMatrix::pure(&v).unwrap()
    }

    fn all_functions() -> Vec<MonotoneFunction> {
        vec![
            MonotoneFunction::wigner_yanase(),
            MonotoneFunction::sld(),
            MonotoneFunction::wyd(0.1).unwrap(),
            MonotoneFunction::wyd(0.3).unwrap(),
        ]
    }

    #[test]
    fn symmetric_state_vanishes() {
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        let h = Observable::number(2);
        for f in all_functions() {
            assert_eq!(skew_info(&rho, &h, &f).unwrap().value, 0.0);
        }
    }

    #[test]
    fn plus_state_wy_is_quarter() {
        let r = skew_info(&plus_state(), &Observable::number(2), &MonotoneFunction::wigner_yanase())
            .unwrap();
        assert_abs_diff_eq!(r.value, 0.25, epsilon = 1e-12);
        assert_eq!(r.rank, 1);
    }

    #[test]
    fn pure_state_gives_variance_for_every_f() {
        let rho = plus_state();
        let h = Observable::number(2);
        let var = variance(&rho, &h).unwrap();
        for f in all_functions() {
            assert_abs_diff_eq!(skew_info(&rho, &h, &f).unwrap().value, var, epsilon = 1e-12);
        }
    }

    #[test]
    fn direct_formulas() {
        let h = Observable::number(2);
        assert_abs_diff_eq!(wy_direct(&plus_state(), &h).unwrap(), 0.25, epsilon = 1e-12);
        let mixed = DensityMatrix::maximally_mixed(3).unwrap();
        assert_abs_diff_eq!(wy_direct(&mixed, &Observable::number(3)).unwrap(), 0.0, epsilon = 1e-14);
        let diag = DensityMatrix::from_diagonal(&[0.2, 0.3, 0.5]).unwrap();
        assert_abs_diff_eq!(
            wyd_direct(&diag, &Observable::number(3), 0.3).unwrap(),
            0.0,
            epsilon = 1e-14
        );
        let rho = DensityMatrix::new(
            CMatrix::from_row_slice(2, 2, &[
                C64::new(0.7, 0.0),
                C64::new(0.2, -0.1),
                C64::new(0.2, 0.1),
                C64::new(0.3, 0.0),
            ])
        )
        .unwrap();
        assert_abs_diff_eq!(
            wyd_direct(&rho, &h, 0.5).unwrap(),
            wy_direct(&rho, &h).unwrap(),
            epsilon = 1e-14
        );
        assert!(wyd_direct(&rho, &h, 1.0).is_err());
    }

    #[test]
    fn variance_examples() {
        let h = Observable::number(2);
        assert_abs_diff_eq!(variance(&plus_state(), &h).unwrap(), 0.25, epsilon = 1e-15);
        let ground = DensityMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(variance(&ground, &h).unwrap(), 0.0, epsilon = 1e-15);
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert_abs_diff_eq!(variance(&mixed, &h).unwrap(), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let rho = plus_state();
        let h = Observable::number(3);
        assert!(matches!(
            skew_info(&rho, &h, &MonotoneFunction::sld()),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(wy_direct(&rho, &h).is_err());
        assert!(variance(&rho, &h).is_err());
    }

    #[test]
    fn product_state_has_zero_gap() {
        let a = DensityMatrix::new(CMatrix::from_row_slice(2, 2, &[
            C64::new(0.6, 0.0),
            C64::new(0.1, 0.2),
            C64::new(0.1, -0.2),
            C64::new(0.4, 0.0),
        ]))
        .unwrap();
        let b = plus_state();
        let rho = a.tensor(&b).unwrap();
        let layout = SubsystemLayout::uniform(2, 2).unwrap();
        let h = vec![Observable::number(2), Observable::number(2)];
        for f in all_functions() {
            let g = superadditivity_gap(&rho, &h, &layout, &f).unwrap();
            assert!(g.gap.abs() <= 1e-9, "{}: {}", f.id(), g.gap);
            assert!(g.weak_bound_satisfied);
        }
    }

    #[test]
    fn trivial_second_factor_gap_nonnegative() {
        let s = 0.5f64.sqrt();
        let bell = CVector::from_vec(vec![
            C64::new(s, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(s, 0.0),
        ]);
        let rho = DensityMatrix::pure(&bell).unwrap();
        let layout = SubsystemLayout::uniform(2, 2).unwrap();
        let h = vec![Observable::number(2), Observable::zero(2)];
        let g = superadditivity_gap(&rho, &h, &layout, &MonotoneFunction::wigner_yanase()).unwrap();
        assert!(g.gap >= -1e-12);
    }

    #[test]
    fn register_identity_examples() {
        let h = Observable::number(2);
        let f = MonotoneFunction::wigner_yanase();
        let single = register_identity_check(&[plus_state()], &[1.0], &h, &f).unwrap();
        assert_abs_diff_eq!(single.lhs, 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(single.rhs, 0.25, epsilon = 1e-12);

        let other = DensityMatrix::pure(&CVector::from_vec(vec![
            C64::new(0.6, 0.0),
            C64::new(0.0, 0.8),
        ]))
        .unwrap();
        let two = register_identity_check(&[plus_state(), other], &[0.5, 0.5], &h, &f).unwrap();
        assert!(two.difference.abs() <= 1e-9);

        let sym = vec![
            DensityMatrix::from_diagonal(&[0.3, 0.7]).unwrap(),
            DensityMatrix::from_diagonal(&[0.9, 0.1]).unwrap(),
        ];
        let z = register_identity_check(&sym, &[0.4, 0.6], &h, &f).unwrap();
        assert!(z.lhs.abs() <= 1e-14 && z.rhs.abs() <= 1e-14);

        assert!(register_identity_check(&sym, &[0.4, 0.4], &h, &f).is_err());
        assert!(register_identity_check(&sym, &[1.4, -0.4], &h, &f).is_err());
    }

    #[test]
    fn real_diagonal_observable_is_used_as_given() {
        let h = Observable::new(real_diagonal(&[0.0, 2.0])).unwrap();
        let r = skew_info(&plus_state(), &h, &MonotoneFunction::sld()).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-12);
    }
}
