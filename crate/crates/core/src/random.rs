//! Seeded random instances for property suites.
//!
//! States are `G G^dagger / Tr(G G^dagger)` with `G` a complex Ginibre matrix;
//! observables are Hermitized Ginibre matrices. Covariant maps are generated
//! in an energy eigenbasis where each Kraus operator only connects levels
//! with one fixed energy difference.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::covariant::{Instrument, QuantumChannel};
use crate::error::Result;
use crate::qmat::{eig_hermitian, real_diagonal, CMatrix, CVector, DensityMatrix, Observable, C64};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut TestRng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

pub fn ginibre(rng: &mut TestRng, rows: usize, cols: usize) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Full-rank random state.
pub fn density(rng: &mut TestRng, d: usize) -> DensityMatrix {
    density_of_rank(rng, d, d)
}

pub fn density_of_rank(rng: &mut TestRng, d: usize, rank: usize) -> DensityMatrix {
    let g = ginibre(rng, d, rank);
    DensityMatrix::from_unnormalized(&g * g.adjoint()).expect("Wishart matrix is a valid state")
}

pub fn pure_vector(rng: &mut TestRng, d: usize) -> CVector {
    let v = CVector::from_fn(d, |_, _| gaussian(rng));
    let n = v.norm();
    v.unscale(n)
}

pub fn pure(rng: &mut TestRng, d: usize) -> DensityMatrix {
    DensityMatrix::pure(&pure_vector(rng, d)).expect("normalized vector")
}

pub fn observable(rng: &mut TestRng, d: usize) -> Observable {
    let g = ginibre(rng, d, d);
    Observable::new((&g + g.adjoint()).scale(0.5)).expect("Hermitized matrix")
}

/// Haar-random unitary via QR with the phase correction on `R`'s diagonal.
pub fn unitary(rng: &mut TestRng, d: usize) -> CMatrix {
    let qr = ginibre(rng, d, d).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Probability vector from normalized exponential draws.
pub fn probabilities(rng: &mut TestRng, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Observable `W diag(E) W^dagger` with small integer energies, so that
/// degeneracies and repeated gaps occur.
#[derive(Debug, Clone)]
pub struct EnergyFrame {
    pub energies: Vec<i64>,
    pub basis: CMatrix,
}

impl EnergyFrame {
    pub fn random(rng: &mut TestRng, d: usize) -> Self {
        let top = (d as i64).max(2);
        let energies = (0..d).map(|_| rng.random_range(0..top)).collect();
        Self {
            energies,
            basis: unitary(rng, d),
        }
    }

    pub fn diagonal(energies: Vec<i64>) -> Self {
        let d = energies.len();
        Self {
            energies,
            basis: CMatrix::identity(d, d),
        }
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn observable(&self) -> Observable {
        let e: Vec<f64> = self.energies.iter().map(|&x| x as f64).collect();
        let m = &self.basis * real_diagonal(&e) * self.basis.adjoint();
        Observable::new(m).expect("unitary conjugate of a real diagonal")
    }

    fn to_lab(&self, out: &EnergyFrame, m: &CMatrix) -> CMatrix {
        &out.basis * m * self.basis.adjoint()
    }
}

/// `K S^{-1/2}` normalization; `S` commutes with the input energies, so the
/// energy-shift pattern of each operator survives.
fn normalize_kraus(ops: Vec<CMatrix>) -> Vec<CMatrix> {
    let d = ops[0].ncols();
    let s = ops
        .iter()
        .fold(CMatrix::zeros(d, d), |acc, k| acc + k.adjoint() * k);
    let eig = eig_hermitian(&s).expect("Hermitian");
    let inv_sqrt = eig.map_spectrum(|l| 1.0 / l.sqrt());
    ops.into_iter().map(|k| k * &inv_sqrt).collect()
}

/// Random covariant channel from `input` to `output` frames: for each
/// distinct energy transfer, `input.dim()` random Kraus operators, enough for
/// `sum K^dagger K` to be invertible on degenerate input levels.
pub fn covariant_channel(rng: &mut TestRng, input: &EnergyFrame, output: &EnergyFrame) -> QuantumChannel {
    let mut by_shift: BTreeMap<i64, Vec<(usize, usize)>> = BTreeMap::new();
    for (a, ea) in output.energies.iter().enumerate() {
        for (b, eb) in input.energies.iter().enumerate() {
            by_shift.entry(ea - eb).or_default().push((a, b));
        }
    }
    let mut ops = Vec::new();
    for cells in by_shift.values() {
        for _ in 0..input.dim() {
            let mut k = CMatrix::zeros(output.dim(), input.dim());
            for &(a, b) in cells {
                k[(a, b)] = gaussian(rng);
            }
            ops.push(k);
        }
    }
    let ops = normalize_kraus(ops)
        .into_iter()
        .map(|k| input.to_lab(output, &k))
        .collect();
    QuantumChannel::new(ops).expect("normalized Kraus set")
}

/// Kraus operators commuting with the frame observable: block diagonal on
/// each energy eigenspace.
pub fn commuting_kraus(rng: &mut TestRng, frame: &EnergyFrame, count: usize) -> Vec<CMatrix> {
    let d = frame.dim();
    let ops: Vec<CMatrix> = (0..count)
        .map(|_| {
            CMatrix::from_fn(d, d, |a, b| {
                if frame.energies[a] == frame.energies[b] {
                    gaussian(rng)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
        })
        .collect();
    normalize_kraus(ops)
        .into_iter()
        .map(|k| frame.to_lab(frame, &k))
        .collect()
}

pub fn commuting_instrument(rng: &mut TestRng, frame: &EnergyFrame, count: usize) -> Result<Instrument> {
    crate::covariant::commuting_measurement(commuting_kraus(rng, frame, count), &frame.observable())
}

/// Unitary commuting with the frame observable.
pub fn commuting_unitary(rng: &mut TestRng, frame: &EnergyFrame) -> CMatrix {
    let d = frame.dim();
    let mut u = CMatrix::zeros(d, d);
    let mut levels: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, &e) in frame.energies.iter().enumerate() {
        levels.entry(e).or_default().push(i);
    }
    for idx in levels.values() {
        let block = unitary(rng, idx.len());
        for (r, &i) in idx.iter().enumerate() {
            for (c, &j) in idx.iter().enumerate() {
                u[(i, j)] = block[(r, c)];
            }
        }
    }
    frame.to_lab(frame, &u)
}
