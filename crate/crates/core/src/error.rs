use crate::C64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {0} is not inside the open unit disk")]
    OutsideDisk(C64),
    #[error("point {0} is not inside the closed unit disk")]
    OutsideClosedDisk(C64),
    #[error("dilation parameter {0} is outside the admissible range")]
    DilationRange(f64),
    #[error("denominator vanishes at the origin")]
    DenominatorZeroAtOrigin,
    #[error("denominator has a zero at {root} (modulus {modulus:.12}) in the {region}")]
    PoleInDisk {
        root: C64,
        modulus: f64,
        region: &'static str,
    },
    #[error("grid size {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("pole on the sampling grid near {0}")]
    PoleOnGrid(C64),
    #[error("non-finite integrand value at node {0}")]
    NonFinite(C64),
    #[error("Dirichlet integral of f vanishes; ratio is undefined")]
    ZeroDirichlet,
    #[error("degenerate pair: a(0) = {0}")]
    DegeneratePair(f64),
    #[error("truncation {requested} exceeds the available {available}")]
    Truncation { requested: usize, available: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
