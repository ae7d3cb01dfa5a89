//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coefficient ring mismatch: {0} vs {1}")]
    RingMismatch(&'static str, &'static str),
    #[error("series constant term must be 1, found {0}")]
    NonUnitConstant(String),
    #[error("series constant term must be 0, found {0}")]
    NonZeroConstant(String),
    #[error("series constant term is not invertible")]
    NonInvertibleConstant,
    #[error("coefficient list has length {got}, expected {want}")]
    CoeffLength { got: usize, want: usize },
    #[error("Adams index {0} out of range 1..={1}")]
    AdamsOutOfRange(usize, usize),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("enumeration cap exceeded: {needed} tuples > cap {cap} (set MOTENT_ENUM_CAP to raise)")]
    CapExceeded { needed: u128, cap: u128 },
    #[error("projective variety polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("measure cannot evaluate atom: {0}")]
    MeasureAtom(String),
    #[error("unknown finite-field variety '{0}' (register it with --fq name=path)")]
    UnknownVariety(String),
    #[error("closed-point inversion produced invalid a_{r} = {value}")]
    BadClosedPoints { r: usize, value: String },
    #[error("evaluation point s = {s} is at or below the abscissa {abscissa}")]
    Abscissa { s: f64, abscissa: f64 },
    #[error("flat descriptors have different degrees: {0} vs {1}")]
    DegreeMismatch(u64, u64),
    #[error("Euler characteristics violate the Riemann-Hurwitz relation")]
    RiemannHurwitz,
    #[error("ring homomorphism cannot be applied: {0}")]
    HomDomain(String),
    #[error("invalid JSON payload: {0}")]
    Json(String),
    #[error("KL oracle evaluation point t0 = {0} is outside the convergence radius")]
    OutsideRadius(String),
    #[error("variety definition error: {0}")]
    VarietyDef(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
