use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("probability vector is empty")]
    EmptyPmf,
    #[error("non-finite mass {value} at index {index}")]
    NonFinite { index: usize, value: f64 },
    #[error("negative mass {value} at index {index}")]
    NegativeMass { index: usize, value: f64 },
    #[error("total mass {sum} differs from 1 by more than {tolerance}")]
    MassDeficit { sum: f64, tolerance: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("sequence lengths differ ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("value exceeded the floating-point range")]
    Overflow,
    #[error("inversion produced mass {value} at index {index}, which is not a pmf entry")]
    NotAPmf { index: usize, value: f64 },
    #[error("cancellation needs {required_bits} bits but only {available_bits} are available")]
    PrecisionExhausted {
        required_bits: u32,
        available_bits: u32,
    },
    #[error("argument t = {t} is outside the accepted domain t <= 0")]
    DomainError { t: f64 },
    #[error("series appears divergent at t = {t}")]
    Divergent { t: f64 },
    #[error("root finding did not converge for order {order}")]
    ConvergenceFailure { order: usize },
    #[error("eta = 0 is a singular point")]
    EtaZero,
    #[error("evolution step failed at eta = {eta}: mass {value} at index {index}")]
    StepFailure { eta: f64, index: usize, value: f64 },
    #[error("distribution has zero mean")]
    ZeroMean,
    #[error("integral failed to converge (estimated error {error_estimate})")]
    NonIntegrable { error_estimate: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
