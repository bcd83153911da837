use alloc::string::String;

/// Errors raised by the forward solvers and the imaging functionals.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("point ({x}, {y}) is not inside the unit disk")]
    OutsideDomain { x: f64, y: f64 },

    #[error("source and observation points coincide")]
    CoincidentPoints,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("boundary integral system is numerically singular (condition estimate {condition:.3e})")]
    SingularSystem { condition: f64 },

    #[error("noise subspace is empty: detected rank {rank} fills the whole basis")]
    EmptyNoiseSubspace { rank: usize },

    #[error("Landweber filter undefined at beta*t^2 = {0} > 1")]
    LandweberUndefined(f64),
}

pub type Result<T> = core::result::Result<T, Error>;
