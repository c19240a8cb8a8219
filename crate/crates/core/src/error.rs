use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("enumeration refused: n = {n} exceeds the cap of {cap} (raise it with an explicit cap)")]
    EnumerationCap { n: usize, cap: usize },

    #[error("size-bias transform needs a distribution with positive mean")]
    ZeroMean,

    #[error("quadrature did not reach tolerance {tolerance:e} within depth {max_depth} (best estimate {estimate})")]
    Quadrature {
        estimate: f64,
        tolerance: f64,
        max_depth: usize,
    },

    #[error("mismatched t-grids: {0}")]
    GridMismatch(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
