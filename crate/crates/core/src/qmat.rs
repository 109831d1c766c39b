//! Dense complex Hermitian linear algebra.
//!
//! Tensor products follow the ket ordering `|s_0 s_1 ... s_{k-1}>`: factor 0
//! is the most significant index, which is also how
//! [`nalgebra::Matrix::kronecker`] lays out its result.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Eigenvalues in `[-PSD_TOLERANCE, 0)` are treated as rounding noise.
pub const PSD_TOLERANCE: f64 = 1e-10;
/// Relative Hermiticity tolerance, scaled by `max(1, max|A|)`.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;
pub const TRACE_TOLERANCE: f64 = 1e-9;
/// Eigenvalues at or below `ZERO_EIGENVALUE * lambda_max` count as exact zeros
/// in spectral functions.
pub const ZERO_EIGENVALUE: f64 = 1e-12;

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: CMatrix,
}

impl Eigen {
    pub fn reconstruct(&self) -> CMatrix {
        let diag = DVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|&v| C64::new(v, 0.0)),
        );
        &self.vectors * DMatrix::from_diagonal(&diag) * self.vectors.adjoint()
    }

    /// `sum_i g(lambda_i) |i><i|`.
    pub fn map_spectrum(&self, g: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &v) in self.values.iter().enumerate() {
            let gv = g(v);
            for i in 0..n {
                scaled[(i, j)] *= gv;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn real_diagonal(values: &[f64]) -> CMatrix {
    let diag = DVector::from_iterator(values.len(), values.iter().map(|&v| C64::new(v, 0.0)));
    DMatrix::from_diagonal(&diag)
}

/// `|psi><phi|`.
pub fn ket_bra(psi: &CVector, phi: &CVector) -> CMatrix {
    psi * phi.adjoint()
}

fn ensure_square(a: &CMatrix) -> Result<usize> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(a.nrows())
}

fn ensure_hermitian(a: &CMatrix) -> Result<()> {
    ensure_square(a)?;
    let deviation = hermitian_deviation(a);
    if deviation > HERMITIAN_TOLERANCE * max_abs(a).max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()).scale(0.5)
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues come back ascending. Each eigenvector is normalized so that
/// its largest-magnitude component (first one on ties) is real positive.
pub fn eig_hermitian(a: &CMatrix) -> Result<Eigen> {
    ensure_hermitian(a)?;
    let n = a.nrows();
    let eig = hermitian_part(a).symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let mut vectors = CMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (col, &src) in order.iter().enumerate() {
        values.push(eig.eigenvalues[src]);
        let v = eig.eigenvectors.column(src);
        let mut pivot = 0;
        let mut best = -1.0;
        for (i, z) in v.iter().enumerate() {
            let m = z.norm();
            if m > best * (1.0 + 1e-12) {
                best = m;
                pivot = i;
            }
        }
        let phase = if best > 0.0 {
            v[pivot].conj() / best
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..n {
            vectors[(i, col)] = v[i] * phase;
        }
    }
    Ok(Eigen { values, vectors })
}

/// Ordered local dimensions of a multipartite Hilbert space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemLayout {
    dims: Vec<usize>,
}

impl SubsystemLayout {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Layout("layout has no subsystems".into()));
        }
        if let Some(pos) = dims.iter().position(|&d| d == 0) {
            return Err(Error::Layout(format!("subsystem {pos} has dimension 0")));
        }
        Ok(Self { dims })
    }

    /// `n` copies of a `d`-level system.
    pub fn uniform(d: usize, n: usize) -> Result<Self> {
        Self::new(vec![d; n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Multi-index of a flat index, factor 0 most significant.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    pub fn flat(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&x, &d)| acc * d + x)
    }

    pub fn restrict(&self, keep: &[usize]) -> Result<Self> {
        Self::new(keep.iter().map(|&k| self.dims[k]).collect())
    }

    pub(crate) fn check(&self, dim: usize) -> Result<()> {
        if self.total() != dim {
            return Err(Error::Layout(format!(
                "layout {:?} has total dimension {}, state has {}",
                self.dims,
                self.total(),
                dim
            )));
        }
        Ok(())
    }

    fn normalize_keep(&self, keep: &[usize]) -> Result<Vec<usize>> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.is_empty() {
            return Err(Error::Layout("keep set is empty".into()));
        }
        if let Some(&bad) = keep.iter().find(|&&k| k >= self.dims.len()) {
            return Err(Error::Layout(format!(
                "subsystem {bad} out of range for {} factors",
                self.dims.len()
            )));
        }
        Ok(keep)
    }
}

/// Validated density matrix with a cached eigendecomposition.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: CMatrix,
    spectrum: OnceLock<Eigen>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    ///
    /// Eigenvalues in `[-PSD_TOLERANCE, 0)` are clamped to zero and the state
    /// renormalized; anything more negative is rejected.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        ensure_hermitian(&matrix)?;
        let tr = trace(&matrix);
        if (tr.re - 1.0).abs() > TRACE_TOLERANCE || tr.im.abs() > TRACE_TOLERANCE {
            return Err(Error::BadTrace { trace: tr.re });
        }
        let matrix = hermitian_part(&matrix);
        let mut eig = eig_hermitian(&matrix)?;
        let min = eig.values.first().copied().unwrap_or(0.0);
        if min < -PSD_TOLERANCE {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        let state = if min < 0.0 {
            for v in eig.values.iter_mut() {
                *v = v.max(0.0);
            }
            let total: f64 = eig.values.iter().sum();
            for v in eig.values.iter_mut() {
                *v /= total;
            }
            let matrix = hermitian_part(&eig.reconstruct());
            Self {
                matrix,
                spectrum: OnceLock::from(eig),
            }
        } else {
            Self {
                matrix,
                spectrum: OnceLock::from(eig),
            }
        };
        Ok(state)
    }

    /// `rho = M / Tr M` for a positive semidefinite `M`.
    pub fn from_unnormalized(matrix: CMatrix) -> Result<Self> {
        let tr = trace(&matrix).re;
        if !(tr > 0.0) {
            return Err(Error::BadTrace { trace: tr });
        }
        Self::new(matrix.unscale(tr))
    }

    pub fn pure(psi: &CVector) -> Result<Self> {
        let norm = psi.norm();
        if !(norm > 0.0) {
            return Err(Error::InvalidParameter("zero state vector".into()));
        }
        let psi = psi.unscale(norm);
        Self::new(ket_bra(&psi, &psi))
    }

    pub fn maximally_mixed(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::NotSquare { rows: 0, cols: 0 });
        }
        Self::new(identity(d).unscale(d as f64))
    }

    pub fn from_diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(real_diagonal(probs))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn spectrum(&self) -> &Eigen {
        self.spectrum.get_or_init(|| {
            eig_hermitian(&self.matrix).expect("validated density matrix is Hermitian")
        })
    }

    /// Largest eigenvalue threshold below which eigenvalues count as zero.
    pub fn zero_threshold(&self) -> f64 {
        let lmax = self.spectrum().values.last().copied().unwrap_or(0.0);
        ZERO_EIGENVALUE * lmax
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(tensor(&self.matrix, &other.matrix))
    }

    pub fn expectation(&self, h: &Observable) -> Result<f64> {
        check_dim(self.dim(), h.dim())?;
        Ok(trace(&(&self.matrix * h.matrix())).re)
    }
}

/// Hermitian observable, the generator of the U(1) action.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    matrix: CMatrix,
}

impl Observable {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        ensure_hermitian(&matrix)?;
        Ok(Self {
            matrix: hermitian_part(&matrix),
        })
    }

    pub fn diagonal(energies: &[f64]) -> Self {
        Self {
            matrix: real_diagonal(energies),
        }
    }

    /// `sum_j j |j><j|` on `d` levels.
    pub fn number(d: usize) -> Self {
        let energies: Vec<f64> = (0..d).map(|j| j as f64).collect();
        Self::diagonal(&energies)
    }

    pub fn zero(d: usize) -> Self {
        Self {
            matrix: CMatrix::zeros(d, d),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Kronecker product `A (x) B`.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn tensor_all<'a>(factors: impl IntoIterator<Item = &'a CMatrix>) -> CMatrix {
    factors
        .into_iter()
        .fold(CMatrix::identity(1, 1), |acc, m| tensor(&acc, m))
}

/// Partial trace of an arbitrary square matrix, keeping the listed factors
/// (0-based, kept in layout order).
pub fn partial_trace_matrix(m: &CMatrix, layout: &SubsystemLayout, keep: &[usize]) -> Result<CMatrix> {
    let dim = ensure_square(m)?;
    layout.check(dim)?;
    let keep = layout.normalize_keep(keep)?;
    let traced: Vec<usize> = (0..layout.len()).filter(|k| !keep.contains(k)).collect();
    let kept_dim: usize = keep.iter().map(|&k| layout.dims[k]).product();
    let traced_dim: usize = traced.iter().map(|&k| layout.dims[k]).product();

    // full index for every (kept, traced) pair
    let mut full = vec![0usize; kept_dim * traced_dim];
    for idx in 0..dim {
        let digits = layout.digits(idx);
        let k = keep.iter().fold(0, |acc, &s| acc * layout.dims[s] + digits[s]);
        let t = traced
            .iter()
            .fold(0, |acc, &s| acc * layout.dims[s] + digits[s]);
        full[k * traced_dim + t] = idx;
    }

    let mut out = CMatrix::zeros(kept_dim, kept_dim);
    for a in 0..kept_dim {
        for b in 0..kept_dim {
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..traced_dim {
                acc += m[(full[a * traced_dim + t], full[b * traced_dim + t])];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(out)
}

/// Reduced state on the kept factors.
pub fn partial_trace(rho: &DensityMatrix, layout: &SubsystemLayout, keep: &[usize]) -> Result<DensityMatrix> {
    DensityMatrix::new(partial_trace_matrix(rho.matrix(), layout, keep)?)
}

/// `sum_j I (x) ... (x) H_j (x) ... (x) I`.
pub fn embed_local_observables(h_list: &[Observable], layout: &SubsystemLayout) -> Result<Observable> {
    if h_list.len() != layout.len() {
        return Err(Error::Layout(format!(
            "{} local observables for {} subsystems",
            h_list.len(),
            layout.len()
        )));
    }
    for (h, &d) in h_list.iter().zip(layout.dims()) {
        check_dim(d, h.dim())?;
    }
    let total = layout.total();
    let mut out = CMatrix::zeros(total, total);
    for (j, h) in h_list.iter().enumerate() {
        let left: usize = layout.dims()[..j].iter().product();
        let right: usize = layout.dims()[j + 1..].iter().product();
        out += tensor(&tensor(&identity(left), h.matrix()), &identity(right));
    }
    Ok(Observable { matrix: out })
}

/// `rho^alpha = sum_i lambda_i^alpha |i><i|` for `alpha` in `(0, 1]`.
///
/// Eigenvalues at or below the zero threshold map to exactly 0.
pub fn matrix_power(rho: &DensityMatrix, alpha: f64) -> Result<CMatrix> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "matrix power exponent {alpha} outside (0, 1]"
        )));
    }
    let cut = rho.zero_threshold();
    Ok(rho
        .spectrum()
        .map_spectrum(|l| if l <= cut { 0.0 } else { l.powf(alpha) }))
}
