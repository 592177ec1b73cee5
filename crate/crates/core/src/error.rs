use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is singular (det = {det:e})")]
    SingularMatrix { det: f64 },

    #[error("matrix is not symmetric (off-diagonal mismatch {mismatch:e})")]
    NotSymmetric { mismatch: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("sinr1 = {sinr1} lies outside the feasible interval [{lo}, {hi}]")]
    InfeasibleSinr1 { sinr1: f64, lo: f64, hi: f64 },

    #[error("second derivative of the sum rate at zero SNR is non-negative ({r_ddot})")]
    DegenerateCurvature { r_ddot: f64 },

    #[error("high-SNR power offset is infinite: user {user} is fully jammed")]
    InfiniteOffset { user: u8 },

    #[error("no boundary point improves on the threat point")]
    NoImprovingPoint,
}

pub type Result<T> = std::result::Result<T, Error>;
