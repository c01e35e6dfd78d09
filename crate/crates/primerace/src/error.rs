//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RaceError {
    #[error("invalid modulus: q = {0} (need q >= 3)")]
    InvalidModulus(u64),

    #[error("invalid residue class: {a} mod {q} (need gcd(a, q) = 1)")]
    InvalidClass { a: u64, q: u64 },

    #[error("invalid race spec: {0}")]
    InvalidSpec(String),

    #[error("character must be primitive (conductor {conductor} != modulus {modulus})")]
    MustBePrimitive { conductor: u64, modulus: u64 },

    #[error("unsupported conductor {0} (above configured ceiling {1})")]
    UnsupportedConductor(u64, u64),

    #[error("precision failure: {0}")]
    PrecisionFailure(String),

    #[error("parse error at line {line}: {msg}")]
    ParseError { line: usize, msg: String },

    #[error("validation error: {0}")]
    ValidationError(String),

    #[error("incomplete zero data: missing {0:?}")]
    IncompleteZeroData(Vec<String>),

    #[error("invalid pair: a = b = {0}; use the variance instead")]
    InvalidPair(u64),

    #[error("matrix is singular to machine precision")]
    SingularMatrix,

    #[error("covariance/correlation matrix is not positive semi-definite (min eigenvalue {0:.3e})")]
    InvalidCovariance(f64),

    #[error("invalid scale: kappa = {0} (need kappa > -1)")]
    InvalidScale(f64),

    #[error("mismatched specs: {0}")]
    InvalidComparison(String),

    #[error("q too small: contestant floor s = {s} < 2 at q = {q}")]
    QTooSmall { q: u64, s: u64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
