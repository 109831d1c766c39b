//! Channels in operator-sum form, covariance with respect to U(1) actions,
//! and selective monotonicity of the skew information under instruments.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::monotone::MonotoneFunction;
use crate::qmat::{
    check_dim, commutator, eig_hermitian, identity, max_abs, trace, CMatrix, DensityMatrix,
    Observable, SubsystemLayout, C64,
};
use crate::skew::skew_info;

pub const TRACE_PRESERVING_TOLERANCE: f64 = 1e-10;
pub const COVARIANCE_TOLERANCE: f64 = 1e-9;
/// Branches with probability at or below this are left out of the average.
pub const BRANCH_CUTOFF: f64 = 1e-12;

/// Completely positive map `rho -> sum_j K_j rho K_j^dagger`.
#[derive(Debug, Clone)]
pub struct QuantumChannel {
    kraus: Vec<CMatrix>,
    dim_in: usize,
    dim_out: usize,
}

fn kraus_shape(kraus: &[CMatrix]) -> Result<(usize, usize)> {
    let first = kraus
        .first()
        .ok_or_else(|| Error::InvalidParameter("channel needs at least one Kraus operator".into()))?;
    let (dim_out, dim_in) = first.shape();
    for k in kraus {
        if k.shape() != (dim_out, dim_in) {
            return Err(Error::DimensionMismatch {
                expected: dim_out * dim_in,
                found: k.nrows() * k.ncols(),
            });
        }
    }
    Ok((dim_in, dim_out))
}

fn kraus_sum(kraus: &[CMatrix], dim_in: usize) -> CMatrix {
    kraus
        .iter()
        .fold(CMatrix::zeros(dim_in, dim_in), |acc, k| acc + k.adjoint() * k)
}

impl QuantumChannel {
    /// Trace-preserving channel: `sum_j K_j^dagger K_j = I` within tolerance.
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let (dim_in, dim_out) = kraus_shape(&kraus)?;
        let deviation = max_abs(&(kraus_sum(&kraus, dim_in) - identity(dim_in)));
        if deviation > TRACE_PRESERVING_TOLERANCE {
            return Err(Error::NotTracePreserving { deviation });
        }
        Ok(Self {
            kraus,
            dim_in,
            dim_out,
        })
    }

    /// Trace non-increasing map: `sum_j K_j^dagger K_j <= I`.
    pub fn trace_nonincreasing(kraus: Vec<CMatrix>) -> Result<Self> {
        let (dim_in, dim_out) = kraus_shape(&kraus)?;
        let slack = identity(dim_in) - kraus_sum(&kraus, dim_in);
        let min = eig_hermitian(&slack)?.values[0];
        if min < -TRACE_PRESERVING_TOLERANCE {
            return Err(Error::NotTracePreserving { deviation: -min });
        }
        Ok(Self {
            kraus,
            dim_in,
            dim_out,
        })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            kraus: vec![identity(d)],
            dim_in: d,
            dim_out: d,
        }
    }

    /// Conjugation by a unitary.
    pub fn unitary(u: CMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    /// Projective measurement onto the eigenspaces of `h` with the outcome
    /// discarded. Eigenvalues closer than `1e-9` share an eigenspace.
    pub fn dephasing(h: &Observable) -> Result<Self> {
        Self::new(eigenspace_projectors(h)?)
    }

    /// Partial trace as a channel, Kraus operators `<t|` on the traced factors.
    pub fn partial_trace(layout: &SubsystemLayout, keep: &[usize]) -> Result<Self> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.is_empty() || keep.iter().any(|&k| k >= layout.len()) {
            return Err(Error::Layout(format!("invalid keep set {keep:?}")));
        }
        let traced: Vec<usize> = (0..layout.len()).filter(|k| !keep.contains(k)).collect();
        let dims = layout.dims();
        let kept_dim: usize = keep.iter().map(|&k| dims[k]).product();
        let traced_dim: usize = traced.iter().map(|&k| dims[k]).product();
        let total = layout.total();
        let mut kraus = vec![CMatrix::zeros(kept_dim, total); traced_dim];
        for idx in 0..total {
            let digits = layout.digits(idx);
            let a = keep.iter().fold(0, |acc, &s| acc * dims[s] + digits[s]);
            let t = traced.iter().fold(0, |acc, &s| acc * dims[s] + digits[s]);
            kraus[t][(a, idx)] = C64::new(1.0, 0.0);
        }
        Self::new(kraus)
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    /// `sum_j K_j X K_j^dagger` on an arbitrary operator.
    pub fn apply_matrix(&self, x: &CMatrix) -> Result<CMatrix> {
        check_dim(self.dim_in, x.nrows())?;
        check_dim(self.dim_in, x.ncols())?;
        Ok(self
            .kraus
            .iter()
            .fold(CMatrix::zeros(self.dim_out, self.dim_out), |acc, k| {
                acc + k * x * k.adjoint()
            }))
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(self.apply_matrix(rho.matrix())?)
    }

    /// `eps2 o eps1`.
    pub fn then(&self, next: &QuantumChannel) -> Result<QuantumChannel> {
        check_dim(self.dim_out, next.dim_in)?;
        let mut kraus = Vec::with_capacity(self.kraus.len() * next.kraus.len());
        for b in &next.kraus {
            for a in &self.kraus {
                kraus.push(b * a);
            }
        }
        Ok(Self {
            kraus,
            dim_in: self.dim_in,
            dim_out: next.dim_out,
        })
    }
}

fn eigenspace_projectors(h: &Observable) -> Result<Vec<CMatrix>> {
    let eig = eig_hermitian(h.matrix())?;
    let n = eig.values.len();
    let mut projectors = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (eig.values[end] - eig.values[start]).abs() <= 1e-9 {
            end += 1;
        }
        let block = eig.vectors.columns(start, end - start);
        projectors.push(block * block.adjoint());
        start = end;
    }
    Ok(projectors)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Covariance {
    pub covariant: bool,
    pub max_deviation: f64,
}

/// Generator-level covariance test: `eps([H_in, B]) = [H_out, eps(B)]` for
/// every matrix unit `B = |a><b|`.
pub fn is_covariant(ch: &QuantumChannel, h_in: &Observable, h_out: &Observable) -> Result<Covariance> {
    check_dim(ch.dim_out, h_out.dim())?;
    map_covariance(|x| ch.apply_matrix(x), ch.dim_in, h_in, h_out)
}

/// [`is_covariant`] for any linear map given as a closure.
pub fn map_covariance(
    map: impl Fn(&CMatrix) -> Result<CMatrix>,
    dim_in: usize,
    h_in: &Observable,
    h_out: &Observable,
) -> Result<Covariance> {
    check_dim(dim_in, h_in.dim())?;
    let mut max_deviation: f64 = 0.0;
    for a in 0..dim_in {
        for b in 0..dim_in {
            let mut unit = CMatrix::zeros(dim_in, dim_in);
            unit[(a, b)] = C64::new(1.0, 0.0);
            let lhs = map(&commutator(h_in.matrix(), &unit))?;
            let image = map(&unit)?;
            check_dim(h_out.dim(), image.nrows())?;
            let rhs = commutator(h_out.matrix(), &image);
            max_deviation = max_deviation.max(max_abs(&(lhs - rhs)));
        }
    }
    Ok(Covariance {
        covariant: max_deviation <= COVARIANCE_TOLERANCE,
        max_deviation,
    })
}

/// Collection of trace non-increasing branches summing to a channel.
#[derive(Debug, Clone)]
pub struct Instrument {
    branches: Vec<QuantumChannel>,
}

impl Instrument {
    pub fn new(branches: Vec<QuantumChannel>) -> Result<Self> {
        let first = branches
            .first()
            .ok_or_else(|| Error::InvalidParameter("instrument has no branches".into()))?;
        let (dim_in, dim_out) = (first.dim_in, first.dim_out);
        for b in &branches {
            check_dim(dim_in, b.dim_in)?;
            check_dim(dim_out, b.dim_out)?;
        }
        let all: Vec<CMatrix> = branches.iter().flat_map(|b| b.kraus.iter().cloned()).collect();
        QuantumChannel::new(all)?;
        Ok(Self { branches })
    }

    pub fn branches(&self) -> &[QuantumChannel] {
        &self.branches
    }

    /// The non-selective channel `sum_j eps_j`.
    pub fn total_channel(&self) -> QuantumChannel {
        let kraus: Vec<CMatrix> = self
            .branches
            .iter()
            .flat_map(|b| b.kraus.iter().cloned())
            .collect();
        QuantumChannel {
            dim_in: self.branches[0].dim_in,
            dim_out: self.branches[0].dim_out,
            kraus,
        }
    }
}

/// Instrument with branches `E_j . E_j^dagger` where every `E_j` commutes
/// with `h`.
pub fn commuting_measurement(ops: Vec<CMatrix>, h: &Observable) -> Result<Instrument> {
    for (index, e) in ops.iter().enumerate() {
        check_dim(h.dim(), e.nrows())?;
        check_dim(h.dim(), e.ncols())?;
        let deviation = max_abs(&commutator(e, h.matrix()));
        if deviation > COVARIANCE_TOLERANCE {
            return Err(Error::NonCovariant { index, deviation });
        }
    }
    let branches = ops
        .into_iter()
        .map(|e| QuantumChannel::trace_nonincreasing(vec![e]))
        .collect::<Result<Vec<_>>>()?;
    Instrument::new(branches)
}

#[derive(Debug, Clone, Serialize)]
pub struct SelectiveCheck {
    pub before: f64,
    pub after_avg: f64,
    pub ok: bool,
}

/// `I^f(rho) >= sum_k p_k I^f(sigma_k)` with `p_k = Tr eps_k(rho)` and
/// `sigma_k = eps_k(rho)/p_k`.
pub fn selective_monotonicity_check(
    inst: &Instrument,
    rho: &DensityMatrix,
    h: &Observable,
    f: &MonotoneFunction,
) -> Result<SelectiveCheck> {
    for (index, branch) in inst.branches.iter().enumerate() {
        let cov = is_covariant(branch, h, h)?;
        if !cov.covariant {
            return Err(Error::NonCovariant {
                index,
                deviation: cov.max_deviation,
            });
        }
    }
    let before = skew_info(rho, h, f)?.value;
    let mut after_avg = 0.0;
    for branch in &inst.branches {
        let out = branch.apply_matrix(rho.matrix())?;
        let p = trace(&out).re;
        if p <= BRANCH_CUTOFF {
            continue;
        }
        let sigma = DensityMatrix::new(out.unscale(p))?;
        after_avg += p * skew_info(&sigma, h, f)?.value;
    }
    Ok(SelectiveCheck {
        before,
        after_avg,
        ok: after_avg <= before + 1e-9,
    })
}
