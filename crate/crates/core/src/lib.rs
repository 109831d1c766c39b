//! # skew-info
//!
//! Metric-adjusted skew informations as asymmetry monotones for a U(1)
//! symmetry generated by a conserved observable `H`.
//!
//! The crate covers:
//!
//! - dense Hermitian linear algebra on density matrices ([`qmat`]),
//! - the registry of standard operator monotone functions and the
//!   Morozova-Chentsov weight kernel ([`monotone`]),
//! - the spectral skew information `I^f(rho, H)` together with direct trace
//!   oracles for the Wigner-Yanase(-Dyson) members ([`skew`]),
//! - covariant channels and instruments ([`covariant`]),
//! - the catalytic covariant protocol on a system plus ladder ancilla, which
//!   produces states whose marginals carry more total skew information than
//!   the global state ([`aberg`]),
//! - a simulated distributed-clock decision harness ([`clocknet`]),
//! - randomized property suites and the command line front end ([`verify`],
//!   [`cli`]).
//!
//! Conventions: subsystem 0 is the most significant tensor factor, all
//! matrices are `nalgebra::DMatrix<Complex<f64>>`, and a superadditivity gap
//! is `global - sum(locals)` (negative means violation).

// `!(x > 0.0)` style guards also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aberg;
pub mod cli;
pub mod clocknet;
pub mod covariant;
pub mod error;
pub mod io;
pub mod monotone;
pub mod qmat;
pub mod random;
pub mod skew;
pub mod verify;

pub use error::{Error, Result};
pub use monotone::MonotoneFunction;
pub use qmat::{CMatrix, DensityMatrix, Observable, SubsystemLayout, C64};
pub use skew::{skew_info, GapResult, SkewResult};
