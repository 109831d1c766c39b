//! Catalytic covariant protocol on a `d`-level system and a ladder ancilla.
//!
//! The joint unitary
//!
//! ```text
//! V(U) = sum_{j,k} |j><j| U |k><k| (x) Delta^(k-j)
//! ```
//!
//! commutes with `H_S (x) I + I (x) H_A`, where `H_S = sum_j j|j><j|`, the
//! ancilla ladder has `H_A = sum_n n|n><n|`, and `Delta` raises the ladder by
//! one level. Tracing out the ancilla gives a covariant channel on the system
//! that depends on the ancilla only through the shift moments
//! `Tr[Delta^a sigma]`, and those moments are left unchanged by every step.
//! Applying the step to `N` fresh systems in `|0>` therefore produces `N`
//! identical marginals while the global state stays bounded by the
//! ancilla's skew information.
//!
//! The infinite ladder is truncated to a finite window with one guard level
//! at each end; any amplitude reaching a guard level is a hard error.
//!
//! For large `N` the system state is evaluated in the energy-sector basis
//! (see [`block_output`]), which is exact for the `|0...0>` initial state.

use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::monotone::MonotoneFunction;
use crate::qmat::{
    check_dim, embed_local_observables, identity, max_abs, partial_trace, CMatrix, CVector,
    DensityMatrix, Observable, SubsystemLayout, C64,
};
use crate::skew::{skew_info, superadditivity_gap, GapResult};

pub const UNITARY_TOLERANCE: f64 = 1e-10;
/// Allowed probability on the guard levels or lost through truncation.
pub const LEAK_TOLERANCE: f64 = 1e-24;
/// Largest system dimension `d^N` simulated with dense state vectors.
pub const MAX_DENSE_SYSTEM_DIM: usize = 4096;
/// Largest `N` handled by the energy-sector evaluation.
pub const MAX_SECTOR_SYSTEMS: usize = 4096;

/// `1/sqrt 2 [[1, 1], [1, -1]]`.
pub fn hadamard() -> CMatrix {
    let s = C64::new(0.5f64.sqrt(), 0.0);
    CMatrix::from_row_slice(2, 2, &[s, s, s, -s])
}

pub fn check_unitary(u: &CMatrix) -> Result<()> {
    if u.nrows() != u.ncols() || u.nrows() == 0 {
        return Err(Error::NotSquare {
            rows: u.nrows(),
            cols: u.ncols(),
        });
    }
    let deviation = max_abs(&(u.adjoint() * u - identity(u.nrows())));
    if deviation > UNITARY_TOLERANCE {
        return Err(Error::InvalidParameter(format!(
            "target operation is not unitary (deviation {deviation:e})"
        )));
    }
    Ok(())
}

/// Finite window of the ladder; level index `i` has energy `offset + i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LadderAncilla {
    pub window: usize,
    pub offset: i64,
}

impl LadderAncilla {
    pub fn hamiltonian(&self) -> Observable {
        let e: Vec<f64> = (0..self.window).map(|i| (self.offset + i as i64) as f64).collect();
        Observable::diagonal(&e)
    }

    pub fn index_of_energy(&self, energy: i64) -> Option<usize> {
        let i = energy - self.offset;
        (0..self.window as i64).contains(&i).then_some(i as usize)
    }
}

/// `|eta_M^l> = M^{-1/2} sum_{i<M} |l + i>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EtaState {
    pub m: usize,
    pub l: i64,
}

impl EtaState {
    pub fn new(m: usize, l: i64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("eta state needs M >= 1".into()));
        }
        Ok(Self { m, l })
    }

    /// Amplitudes in the ancilla window; the support must avoid the guard
    /// levels.
    pub fn vector(&self, ancilla: &LadderAncilla) -> Result<CVector> {
        let first = ancilla.index_of_energy(self.l);
        let last = ancilla.index_of_energy(self.l + self.m as i64 - 1);
        match (first, last) {
            (Some(a), Some(b)) if a >= 1 && b + 2 <= ancilla.window => {
                let amp = C64::new(1.0 / (self.m as f64).sqrt(), 0.0);
                let mut v = CVector::zeros(ancilla.window);
                for i in a..=b {
                    v[i] = amp;
                }
                Ok(v)
            }
            _ => Err(Error::WindowOverflow {
                step: 0,
                leaked: 1.0,
            }),
        }
    }

    /// `<eta|Delta^a|eta> = max(M - |a|, 0)/M`.
    pub fn moment(&self, a: i64) -> f64 {
        (self.m as f64 - a.unsigned_abs() as f64).max(0.0) / self.m as f64
    }

    pub fn moments(&self, max_shift: usize) -> Moments {
        let s = max_shift as i64;
        Moments {
            max_shift,
            values: (-s..=s).map(|a| C64::new(self.moment(a), 0.0)).collect(),
        }
    }

    /// The state as an `M`-level pure state with `H = diag(0..M)`.
    pub fn compact_state(&self) -> (DensityMatrix, Observable) {
        let v = CVector::from_element(self.m, C64::new(1.0, 0.0));
        let rho = DensityMatrix::pure(&v).expect("nonzero vector");
        (rho, Observable::number(self.m))
    }
}

/// Truncated ladder power `Delta^a` on a window of `window` levels.
pub fn shift_operator(window: usize, a: i64) -> Result<CMatrix> {
    if a.unsigned_abs() as usize >= window {
        return Err(Error::InvalidParameter(format!(
            "shift {a} does not fit a window of {window} levels"
        )));
    }
    let mut m = CMatrix::zeros(window, window);
    for j in 0..window as i64 {
        let target = j + a;
        if (0..window as i64).contains(&target) {
            m[(target as usize, j as usize)] = C64::new(1.0, 0.0);
        }
    }
    Ok(m)
}

/// Table of `Tr[Delta^a sigma]` for `|a| <= max_shift`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Moments {
    max_shift: usize,
    values: Vec<C64>,
}

impl Moments {
    pub fn max_shift(&self) -> usize {
        self.max_shift
    }

    pub fn get(&self, a: i64) -> Result<C64> {
        if a.unsigned_abs() as usize > self.max_shift {
            return Err(Error::MissingMoment(a));
        }
        Ok(self.values[(a + self.max_shift as i64) as usize])
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        let s = self.max_shift as i64;
        (-s..=s).zip(self.values.iter().copied())
    }

    pub fn max_abs_diff(&self, other: &Moments) -> f64 {
        let s = self.max_shift.min(other.max_shift) as i64;
        (-s..=s)
            .map(|a| (self.get(a).unwrap() - other.get(a).unwrap()).norm())
            .fold(0.0, f64::max)
    }
}

/// `Tr[Delta^a sigma] = sum_k sigma[k, k + a]` on the window.
pub fn moments(sigma: &CMatrix, max_shift: usize) -> Result<Moments> {
    let window = sigma.nrows();
    check_dim(window, sigma.ncols())?;
    if max_shift >= window {
        return Err(Error::InvalidParameter(format!(
            "moment range {max_shift} exceeds the window of {window} levels"
        )));
    }
    let s = max_shift as i64;
    let values = (-s..=s)
        .map(|a| {
            (0..window as i64)
                .filter(|k| (0..window as i64).contains(&(k + a)))
                .map(|k| sigma[(k as usize, (k + a) as usize)])
                .sum()
        })
        .collect();
    Ok(Moments { max_shift, values })
}

/// `V(U)` on `system (x) window`, system index most significant.
pub fn aberg_unitary(u: &CMatrix, window: usize) -> Result<CMatrix> {
    check_unitary(u)?;
    let d = u.nrows();
    if window < 2 * (d - 1) + 3 {
        return Err(Error::InvalidParameter(format!(
            "window of {window} levels too small for d = {d}"
        )));
    }
    let mut v = CMatrix::zeros(d * window, d * window);
    for j in 0..d {
        for k in 0..d {
            let ujk = u[(j, k)];
            if ujk == C64::new(0.0, 0.0) {
                continue;
            }
            let shift = k as i64 - j as i64;
            for a in 0..window as i64 {
                let b = a + shift;
                if (0..window as i64).contains(&b) {
                    v[(j * window + b as usize, k * window + a as usize)] = ujk;
                }
            }
        }
    }
    Ok(v)
}

/// Protocol parameters: `N` systems of dimension `d`, target `U`, resource
/// `|eta_M^l>` and the ancilla window.
#[derive(Debug, Clone)]
pub struct AbergConfig {
    u: CMatrix,
    n: usize,
    eta: EtaState,
    window: usize,
}

impl AbergConfig {
    /// Window `M + 2N(d-1) + 2` with the resource centered.
    pub fn new(u: CMatrix, n: usize, m: usize, l: i64) -> Result<Self> {
        check_unitary(&u)?;
        if n == 0 {
            return Err(Error::InvalidParameter("protocol needs N >= 1".into()));
        }
        let eta = EtaState::new(m, l)?;
        let d = u.nrows();
        let window = m + 2 * n * (d - 1) + 2;
        Ok(Self { u, n, eta, window })
    }

    pub fn hadamard(n: usize, m: usize) -> Result<Self> {
        Self::new(hadamard(), n, m, 0)
    }

    /// Overrides the window size; undersized windows surface as
    /// [`Error::WindowOverflow`] when the protocol runs.
    pub fn with_window(mut self, window: usize) -> Result<Self> {
        let d = self.d();
        if window < self.eta.m + 2 || window < 2 * (d - 1) + 3 {
            return Err(Error::InvalidParameter(format!(
                "window of {window} levels cannot hold the resource"
            )));
        }
        self.window = window;
        Ok(self)
    }

    pub fn u(&self) -> &CMatrix {
        &self.u
    }

    pub fn d(&self) -> usize {
        self.u.nrows()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eta(&self) -> EtaState {
        self.eta
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn ancilla(&self) -> LadderAncilla {
        let start = (self.window - self.eta.m) / 2;
        LadderAncilla {
            window: self.window,
            offset: self.eta.l - start as i64,
        }
    }

    /// Moment range that determines the reduced channel, `2(d - 1)`.
    pub fn channel_range(&self) -> usize {
        2 * (self.d() - 1)
    }
}

/// Per-step bookkeeping of a protocol run.
#[derive(Debug, Clone, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub norm: f64,
    pub guard_mass: f64,
    pub ancilla_moments: Moments,
}

#[derive(Debug, Clone)]
pub struct ProtocolRun {
    /// Pure joint state on `S_1 ... S_N A`.
    pub joint: CVector,
    /// `[d; N]` followed by the ancilla window.
    pub joint_layout: SubsystemLayout,
    pub system_layout: SubsystemLayout,
    pub system: DensityMatrix,
    pub ancilla: DensityMatrix,
    pub marginals: Vec<DensityMatrix>,
    pub initial_moments: Moments,
    pub steps: Vec<StepRecord>,
}

fn ancilla_matrix(psi: &CVector, sys_dim: usize, window: usize) -> CMatrix {
    // psi viewed as a sys_dim x window matrix (row-major)
    let mut rho = CMatrix::zeros(window, window);
    for s in 0..sys_dim {
        let row = &psi.as_slice()[s * window..(s + 1) * window];
        for a in 0..window {
            if row[a] == C64::new(0.0, 0.0) {
                continue;
            }
            for b in 0..window {
                rho[(a, b)] += row[a] * row[b].conj();
            }
        }
    }
    rho
}

fn system_matrix(psi: &CVector, sys_dim: usize, window: usize) -> CMatrix {
    let psi_mat = CMatrix::from_fn(sys_dim, window, |s, a| psi[s * window + a]);
    &psi_mat * psi_mat.adjoint()
}

/// Runs `V(U)` on `(S_m, A)` for `m = 1..N`, starting from
/// `|0>^N (x) |eta_M^l>`.
pub fn run_protocol(cfg: &AbergConfig) -> Result<ProtocolRun> {
    let d = cfg.d();
    let n = cfg.n;
    let window = cfg.window;
    let sys_dim = d
        .checked_pow(n as u32)
        .filter(|&s| s <= MAX_DENSE_SYSTEM_DIM)
        .ok_or_else(|| {
            Error::InvalidParameter(format!(
                "dense simulation limited to system dimension {MAX_DENSE_SYSTEM_DIM}"
            ))
        })?;
    let ancilla = cfg.ancilla();
    let eta = cfg.eta.vector(&ancilla)?;
    let v = aberg_unitary(&cfg.u, window)?;
    let range = cfg.channel_range();

    let mut psi = CVector::zeros(sys_dim * window);
    for a in 0..window {
        psi[a] = eta[a];
    }
    let initial_moments = moments(&ancilla_matrix(&psi, sys_dim, window), range)?;

    let mut steps = Vec::with_capacity(n);
    let block = d * window;
    let mut x = CVector::zeros(block);
    for m in 0..n {
        let prefix = d.pow(m as u32);
        let suffix = d.pow((n - 1 - m) as u32);
        for p in 0..prefix {
            for q in 0..suffix {
                let base = |s: usize| ((p * d + s) * suffix + q) * window;
                for s in 0..d {
                    let b = base(s);
                    x.rows_mut(s * window, window)
                        .copy_from(&psi.rows(b, window));
                }
                if x.iter().all(|z| *z == C64::new(0.0, 0.0)) {
                    continue;
                }
                let y = &v * &x;
                for s in 0..d {
                    let b = base(s);
                    psi.rows_mut(b, window).copy_from(&y.rows(s * window, window));
                }
            }
        }

        let norm = psi.norm();
        let mut guard_mass = 0.0;
        for s in 0..sys_dim {
            guard_mass += psi[s * window].norm_sqr() + psi[s * window + window - 1].norm_sqr();
        }
        let leaked = guard_mass + (1.0 - norm * norm).abs();
        if leaked > LEAK_TOLERANCE && (guard_mass > LEAK_TOLERANCE || (norm - 1.0).abs() > 1e-12) {
            return Err(Error::WindowOverflow {
                step: m + 1,
                leaked,
            });
        }
        let ancilla_moments = moments(&ancilla_matrix(&psi, sys_dim, window), range)?;
        steps.push(StepRecord {
            step: m + 1,
            norm,
            guard_mass,
            ancilla_moments,
        });
    }

    let system_layout = SubsystemLayout::uniform(d, n)?;
    let mut joint_dims = vec![d; n];
    joint_dims.push(window);
    let joint_layout = SubsystemLayout::new(joint_dims)?;
    let system = DensityMatrix::new(system_matrix(&psi, sys_dim, window))?;
    let ancilla_state = DensityMatrix::new(ancilla_matrix(&psi, sys_dim, window))?;
    let marginals = (0..n)
        .map(|k| partial_trace(&system, &system_layout, &[k]))
        .collect::<Result<Vec<_>>>()?;
    Ok(ProtocolRun {
        joint: psi,
        joint_layout,
        system_layout,
        system,
        ancilla: ancilla_state,
        marginals,
        initial_moments,
        steps,
    })
}

/// System channel of one protocol step, evaluated from the shift moments:
/// `eps(rho)_{jm} = sum_{kl} Tr[Delta^(-l+m+k-j) sigma] U_jk rho_kl conj(U_ml)`.
#[derive(Debug, Clone)]
pub struct ReducedChannel {
    u: CMatrix,
    moments: Moments,
}

pub fn reduced_channel(u: &CMatrix, moments: &Moments) -> Result<ReducedChannel> {
    check_unitary(u)?;
    let need = 2 * (u.nrows() - 1);
    if moments.max_shift() < need {
        return Err(Error::MissingMoment(moments.max_shift() as i64 + 1));
    }
    Ok(ReducedChannel {
        u: u.clone(),
        moments: moments.clone(),
    })
}

impl ReducedChannel {
    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    pub fn apply_matrix(&self, rho: &CMatrix) -> Result<CMatrix> {
        let d = self.dim();
        check_dim(d, rho.nrows())?;
        check_dim(d, rho.ncols())?;
        // T = U rho U^dagger weighted entry-wise before contraction
        let mut out = CMatrix::zeros(d, d);
        for j in 0..d {
            for m in 0..d {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..d {
                    for l in 0..d {
                        let a = -(l as i64) + m as i64 + k as i64 - j as i64;
                        acc += self.moments.get(a)? * self.u[(j, k)] * rho[(k, l)] * self.u[(m, l)].conj();
                    }
                }
                out[(j, m)] = acc;
            }
        }
        Ok(out)
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(self.apply_matrix(rho.matrix())?)
    }

    /// Output on the system ground state `|0><0|`.
    pub fn ground_output(&self) -> Result<DensityMatrix> {
        let mut g = CMatrix::zeros(self.dim(), self.dim());
        g[(0, 0)] = C64::new(1.0, 0.0);
        DensityMatrix::new(self.apply_matrix(&g)?)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalyticReport {
    pub before: Moments,
    pub after: Vec<Moments>,
    pub max_diff: f64,
}

/// Compares the ancilla moments `|a| <= 2(d-1)` after every step with the
/// initial ones.
pub fn catalytic_check(cfg: &AbergConfig) -> Result<CatalyticReport> {
    let run = run_protocol(cfg)?;
    let after: Vec<Moments> = run.steps.iter().map(|s| s.ancilla_moments.clone()).collect();
    let max_diff = after
        .iter()
        .map(|m| m.max_abs_diff(&run.initial_moments))
        .fold(0.0, f64::max);
    Ok(CatalyticReport {
        before: run.initial_moments,
        after,
        max_diff,
    })
}

/// `alpha_i = max(M - i, 0)/M`.
pub fn overlap(m: usize, i: usize) -> f64 {
    (m as f64 - i as f64).max(0.0) / m as f64
}

/// `1/4 [[1, a1, a1, a2], [a1, 1, 1, a1], [a1, 1, 1, a1], [a2, a1, a1, 1]]`.
pub fn two_qubit_closed_form(m: usize) -> Result<DensityMatrix> {
    if m == 0 {
        return Err(Error::InvalidParameter("M must be at least 1".into()));
    }
    let (a1, a2) = (overlap(m, 1), overlap(m, 2));
    let rows = [
        [1.0, a1, a1, a2],
        [a1, 1.0, 1.0, a1],
        [a1, 1.0, 1.0, a1],
        [a2, a1, a1, 1.0],
    ];
    let mat = CMatrix::from_fn(4, 4, |i, j| C64::new(rows[i][j] / 4.0, 0.0));
    DensityMatrix::new(mat)
}

#[derive(Debug, Clone)]
pub struct TwoQubitFamily {
    pub simulated: DensityMatrix,
    pub closed_form: DensityMatrix,
    pub max_diff: f64,
}

/// Two Hadamard steps with `|eta_M^0>`, simulated and in closed form.
pub fn two_qubit_family(m: usize) -> Result<TwoQubitFamily> {
    let run = run_protocol(&AbergConfig::hadamard(2, m)?)?;
    let closed_form = two_qubit_closed_form(m)?;
    let max_diff = max_abs(&(run.system.matrix() - closed_form.matrix()));
    Ok(TwoQubitFamily {
        simulated: run.system,
        closed_form,
        max_diff,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fig1Row {
    pub m: usize,
    pub global: f64,
    pub local_sum: f64,
    pub gap: f64,
}

/// Two-qubit gap `I^f(rho_12) - I^f(rho_1) - I^f(rho_2)` with `H_i = |1><1|`
/// for every `M` in the range, using the closed form.
pub fn fig1_sweep(ms: RangeInclusive<usize>, f: &MonotoneFunction) -> Result<Vec<Fig1Row>> {
    if *ms.start() == 0 || ms.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "M range {}..={} must be nonempty and start at 1 or above",
            ms.start(),
            ms.end()
        )));
    }
    let layout = SubsystemLayout::uniform(2, 2)?;
    let h = [Observable::number(2), Observable::number(2)];
    ms.collect::<Vec<_>>()
        .par_iter()
        .map(|&m| {
            let rho = two_qubit_closed_form(m)?;
            let g = superadditivity_gap(&rho, &h, &layout, f)?;
            Ok(Fig1Row {
                m,
                global: g.global_value,
                local_sum: g.local_sum(),
                gap: g.gap,
            })
        })
        .collect()
}

/// Row with the largest violation (most negative gap).
pub fn strongest_violation(rows: &[Fig1Row]) -> Option<Fig1Row> {
    rows.iter()
        .copied()
        .filter(|r| r.gap < 0.0)
        .min_by(|a, b| a.gap.total_cmp(&b.gap))
}

/// Coefficients of `(sum_j |U_j0|^2 z^j)^n`: the weight of each total
/// energy in a block of `n` systems after the protocol.
fn sector_weights(u: &CMatrix, n: usize) -> Vec<f64> {
    let p: Vec<f64> = (0..u.nrows()).map(|j| u[(j, 0)].norm_sqr()).collect();
    let mut acc = vec![1.0];
    for _ in 0..n {
        let mut next = vec![0.0; acc.len() + p.len() - 1];
        for (i, &a) in acc.iter().enumerate() {
            for (j, &b) in p.iter().enumerate() {
                next[i + j] += a * b;
            }
        }
        acc = next;
    }
    acc
}

/// System state after `sum(block_sizes)` steps, compressed to one energy
/// sector basis per block.
#[derive(Debug, Clone)]
pub struct BlockState {
    pub state: DensityMatrix,
    pub layout: SubsystemLayout,
    /// `diag(0, 1, ..., n_b (d - 1))` for each block.
    pub observables: Vec<Observable>,
    pub block_sizes: Vec<usize>,
}

/// Exact compressed output of the protocol from `|0...0>`.
///
/// After the steps the joint state is `sum_x prod_m U_{x_m 0} |x> Delta^{-E(x)} sigma`
/// with `E(x)` the total system energy. Grouping each block's
/// configurations by energy gives orthogonal vectors `chi_E` that are
/// eigenvectors of the block observable, so the system state lives in
/// `span(chi_{E_1} (x) ... (x) chi_{E_k})`, a subspace invariant under every
/// block observable. In that basis
///
/// ```text
/// rho[(E), (E')] = prod_b sqrt(c_b(E_b) c_b(E'_b)) * Tr[Delta^(sum E' - sum E) sigma]
/// ```
///
/// with `c_b(E) = |chi_E|^2`. The embedding is an isometry commuting with the
/// observables, so every skew information and every block marginal is
/// reproduced exactly.
pub fn block_output(u: &CMatrix, block_sizes: &[usize], moments: &Moments) -> Result<BlockState> {
    check_unitary(u)?;
    let d = u.nrows();
    if block_sizes.is_empty() || block_sizes.contains(&0) {
        return Err(Error::InvalidParameter("blocks must be nonempty".into()));
    }
    let n: usize = block_sizes.iter().sum();
    if n > MAX_SECTOR_SYSTEMS {
        return Err(Error::InvalidParameter(format!(
            "at most {MAX_SECTOR_SYSTEMS} systems supported"
        )));
    }
    if moments.max_shift() < n * (d - 1) {
        return Err(Error::MissingMoment((n * (d - 1)) as i64));
    }
    let weights: Vec<Vec<f64>> = block_sizes.iter().map(|&b| sector_weights(u, b)).collect();
    let dims: Vec<usize> = weights.iter().map(Vec::len).collect();
    let layout = SubsystemLayout::new(dims.clone())?;
    let total = layout.total();
    if total > MAX_DENSE_SYSTEM_DIM {
        return Err(Error::InvalidParameter(format!(
            "compressed dimension {total} exceeds {MAX_DENSE_SYSTEM_DIM}"
        )));
    }

    let mut amp = vec![0.0; total];
    let mut energy = vec![0i64; total];
    for idx in 0..total {
        let digits = layout.digits(idx);
        amp[idx] = digits
            .iter()
            .zip(&weights)
            .map(|(&e, w)| w[e].sqrt())
            .product();
        energy[idx] = digits.iter().sum::<usize>() as i64;
    }
    let mut rho = CMatrix::zeros(total, total);
    for r in 0..total {
        for c in 0..total {
            rho[(r, c)] = moments.get(energy[c] - energy[r])? * (amp[r] * amp[c]);
        }
    }
    let observables = dims.iter().map(|&k| Observable::number(k)).collect();
    Ok(BlockState {
        state: DensityMatrix::new(rho)?,
        layout,
        observables,
        block_sizes: block_sizes.to_vec(),
    })
}

impl BlockState {
    pub fn total_observable(&self) -> Result<Observable> {
        embed_local_observables(&self.observables, &self.layout)
    }

    pub fn global_skew(&self, f: &MonotoneFunction) -> Result<f64> {
        Ok(skew_info(&self.state, &self.total_observable()?, f)?.value)
    }

    pub fn gap(&self, f: &MonotoneFunction) -> Result<GapResult> {
        superadditivity_gap(&self.state, &self.observables, &self.layout, f)
    }
}

/// Isometry from the compressed block basis into the full `d^N` space.
/// Sectors with zero weight map to zero columns.
pub fn block_embedding(u: &CMatrix, block_sizes: &[usize]) -> Result<CMatrix> {
    check_unitary(u)?;
    let d = u.nrows();
    let n: usize = block_sizes.iter().sum();
    let full = d
        .checked_pow(n as u32)
        .filter(|&s| s <= MAX_DENSE_SYSTEM_DIM)
        .ok_or_else(|| Error::InvalidParameter("embedding too large".into()))?;
    let full_layout = SubsystemLayout::uniform(d, n)?;
    let dims: Vec<usize> = block_sizes.iter().map(|&b| b * (d - 1) + 1).collect();
    let block_layout = SubsystemLayout::new(dims)?;
    let weights: Vec<Vec<f64>> = block_sizes.iter().map(|&b| sector_weights(u, b)).collect();

    let mut w = CMatrix::zeros(full, block_layout.total());
    for x in 0..full {
        let digits = full_layout.digits(x);
        let mut sectors = Vec::with_capacity(block_sizes.len());
        let mut start = 0;
        let mut coeff = C64::new(1.0, 0.0);
        for (b, &size) in block_sizes.iter().enumerate() {
            let part = &digits[start..start + size];
            let e: usize = part.iter().sum();
            let norm = weights[b][e].sqrt();
            for &s in part {
                coeff *= u[(s, 0)];
            }
            coeff = if norm > 0.0 { coeff / norm } else { C64::new(0.0, 0.0) };
            sectors.push(e);
            start += size;
        }
        w[(x, block_layout.flat(&sectors))] = coeff;
    }
    Ok(w)
}

#[derive(Debug, Clone, Serialize)]
pub struct CurvePoint {
    pub n: usize,
    pub local_sum: f64,
    pub global: f64,
    /// `local_sum / I_ancilla`
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MultipartiteReport {
    pub m: usize,
    pub f_id: String,
    pub i_ancilla: f64,
    pub i_local: f64,
    /// Smallest `N` with `N I_local > I_ancilla`.
    pub n_star: Option<usize>,
    pub curve: Vec<CurvePoint>,
    pub max_global: f64,
    /// Least-squares slope of `local_sum` against `N`.
    pub slope: f64,
}

fn eta_skew(m: usize, f: &MonotoneFunction) -> Result<f64> {
    let (rho, h) = EtaState::new(m, 0)?.compact_state();
    Ok(skew_info(&rho, &h, f)?.value)
}

/// Single-subsystem output of one step from `|0>`; identical for every step.
pub fn single_step_marginal(u: &CMatrix, m: usize) -> Result<DensityMatrix> {
    let eta = EtaState::new(m, 0)?;
    reduced_channel(u, &eta.moments(2 * (u.nrows() - 1)))?.ground_output()
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Sum of marginal skew informations against the global one for
/// `N = 1..=n_max` protocol outputs.
pub fn multipartite_violation(
    u: &CMatrix,
    m: usize,
    f: &MonotoneFunction,
    n_max: usize,
) -> Result<MultipartiteReport> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    let d = u.nrows();
    let i_ancilla = eta_skew(m, f)?;
    let marginal = single_step_marginal(u, m)?;
    let i_local = skew_info(&marginal, &Observable::number(d), f)?.value;
    let moments = EtaState::new(m, 0)?.moments(n_max * (d - 1));
    let curve = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let global = block_output(u, &[n], &moments)?.global_skew(f)?;
            let local_sum = n as f64 * i_local;
            Ok(CurvePoint {
                n,
                local_sum,
                global,
                ratio: local_sum / i_ancilla,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let n_star = if i_local > 0.0 {
        curve
            .iter()
            .find(|p| p.local_sum > i_ancilla)
            .map(|p| p.n)
    } else {
        None
    };
    let max_global = curve.iter().map(|p| p.global).fold(0.0, f64::max);
    let pts: Vec<(f64, f64)> = curve.iter().map(|p| (p.n as f64, p.local_sum)).collect();
    Ok(MultipartiteReport {
        m,
        f_id: f.id().to_string(),
        i_ancilla,
        i_local,
        n_star,
        slope: slope(&pts),
        curve,
        max_global,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelReport {
    pub blocks: usize,
    pub block_size: usize,
    pub block_value: f64,
    pub level_sum: f64,
    /// `parent >= (1/k) sum(children)` against the next finer level.
    pub weak_bound_holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimalityReport {
    pub k: usize,
    pub depth: u32,
    pub n: usize,
    pub m: usize,
    pub i_ancilla: f64,
    pub i_local: f64,
    pub global: f64,
    pub unit_sum: f64,
    /// `unit_sum / global`
    pub ratio_to_global: f64,
    /// `unit_sum / I_ancilla`
    pub ratio_to_ancilla: f64,
    /// Largest `beta` with `global >= beta^depth unit_sum`; any `beta` above
    /// this fails on this instance.
    pub max_admissible_beta: Option<f64>,
    /// Growth rate of the unit-level sum per subsystem.
    pub slope: f64,
    pub levels: Vec<LevelReport>,
}

/// Evaluates the protocol output on `N = k^depth` systems at every level of
/// the `k`-ary block hierarchy.
pub fn optimality_witness(
    u: &CMatrix,
    k: usize,
    depth: u32,
    m: usize,
    f: &MonotoneFunction,
) -> Result<OptimalityReport> {
    if k < 2 {
        return Err(Error::InvalidParameter("k must be at least 2".into()));
    }
    let n = k
        .checked_pow(depth)
        .filter(|&n| n <= MAX_SECTOR_SYSTEMS)
        .ok_or_else(|| Error::InvalidParameter(format!("k^depth exceeds {MAX_SECTOR_SYSTEMS}")))?;
    let d = u.nrows();
    let i_ancilla = eta_skew(m, f)?;
    let moments = EtaState::new(m, 0)?.moments(n * (d - 1));
    let mut values = Vec::with_capacity(depth as usize + 1);
    for t in 0..=depth {
        let size = k.pow(depth - t);
        let value = block_output(u, &[size], &moments)?.global_skew(f)?;
        values.push((k.pow(t), size, value));
    }
    let levels: Vec<LevelReport> = values
        .iter()
        .enumerate()
        .map(|(t, &(blocks, block_size, block_value))| {
            let weak_bound_holds = match values.get(t + 1) {
                Some(&(_, _, child)) => block_value >= (k as f64 * child) / k as f64 - 1e-10,
                None => true,
            };
            LevelReport {
                blocks,
                block_size,
                block_value,
                level_sum: blocks as f64 * block_value,
                weak_bound_holds,
            }
        })
        .collect();
    let global = values[0].2;
    let i_local = values[depth as usize].2;
    let unit_sum = n as f64 * i_local;
    let max_admissible_beta = (depth > 0 && unit_sum > 0.0)
        .then(|| (global / unit_sum).powf(1.0 / depth as f64));
    Ok(OptimalityReport {
        k,
        depth,
        n,
        m,
        i_ancilla,
        i_local,
        global,
        unit_sum,
        ratio_to_global: if global > 0.0 { unit_sum / global } else { 0.0 },
        ratio_to_ancilla: unit_sum / i_ancilla,
        max_admissible_beta,
        slope: i_local,
        levels,
    })
}
