use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max |A - A^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("state is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("state trace is {trace}, expected 1")]
    BadTrace { trace: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid subsystem layout: {0}")]
    Layout(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("monotone function `{id}` is not regular (f(0) = {f0})")]
    NonRegular { id: String, f0: f64 },

    #[error("function `{id}` fails the standard monotone axioms: {detail}")]
    NotStandard { id: String, detail: String },

    #[error("operator {index} is not covariant (deviation {deviation:e})")]
    NonCovariant { index: usize, deviation: f64 },

    #[error("Kraus operators are not trace preserving (deviation {deviation:e})")]
    NotTracePreserving { deviation: f64 },

    #[error("ancilla window overflow: amplitude {leaked:e} reached the guard levels at step {step}")]
    WindowOverflow { step: usize, leaked: f64 },

    #[error("missing shift moment for a = {0}")]
    MissingMoment(i64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
