use std::io;
use std::path::PathBuf;

use beamsplit_core::Error as CoreError;
use serde::Serialize;
use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const IDENTITY_VIOLATION: u8 = 1;
    pub const INVALID_INPUT: u8 = 2;
    pub const NUMERICAL_FAILURE: u8 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("evolution failed ({source}); last good eta {last_good_eta}")]
    Evolution {
        source: CoreError,
        last_good_eta: f64,
    },
    #[error("{0}")]
    IdentityViolation(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Format { .. } => "format",
            CliError::Invalid(_) => "invalid_input",
            CliError::Core(e) => core_code(e),
            CliError::Evolution { .. } => "step_failure",
            CliError::IdentityViolation(_) => "identity_violation",
            CliError::Numerical(_) => "numerical_failure",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::IdentityViolation(_) => exit::IDENTITY_VIOLATION,
            CliError::Evolution { .. } | CliError::Numerical(_) => exit::NUMERICAL_FAILURE,
            CliError::Core(e) if is_numerical(e) => exit::NUMERICAL_FAILURE,
            _ => exit::INVALID_INPUT,
        }
    }

    /// The message written to standard error. Core parameter errors carry
    /// their text without the generic prefix.
    pub fn message(&self) -> String {
        match self {
            CliError::Core(CoreError::InvalidParameter(m)) => (*m).to_string(),
            other => other.to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Body<'a> {
            error: &'a str,
            message: String,
        }
        serde_json::to_string(&Body {
            error: self.code(),
            message: self.message(),
        })
        .expect("error body serializes")
    }
}

/// Failures of the numerics, as opposed to bad input.
pub fn is_numerical(e: &CoreError) -> bool {
    matches!(
        e,
        CoreError::Overflow
            | CoreError::NotAPmf { .. }
            | CoreError::PrecisionExhausted { .. }
            | CoreError::Divergent { .. }
            | CoreError::ConvergenceFailure { .. }
            | CoreError::StepFailure { .. }
            | CoreError::NonIntegrable { .. }
    )
}

fn core_code(e: &CoreError) -> &'static str {
    match e {
        CoreError::EmptyPmf => "empty_pmf",
        CoreError::NonFinite { .. } => "non_finite",
        CoreError::NegativeMass { .. } => "negative_mass",
        CoreError::MassDeficit { .. } => "mass_deficit",
        CoreError::InvalidParameter(_) => "invalid_parameter",
        CoreError::LengthMismatch { .. } => "length_mismatch",
        CoreError::Overflow => "overflow",
        CoreError::NotAPmf { .. } => "not_a_pmf",
        CoreError::PrecisionExhausted { .. } => "precision_exhausted",
        CoreError::DomainError { .. } => "domain_error",
        CoreError::Divergent { .. } => "divergent",
        CoreError::ConvergenceFailure { .. } => "convergence_failure",
        CoreError::EtaZero => "eta_zero",
        CoreError::StepFailure { .. } => "step_failure",
        CoreError::ZeroMean => "zero_mean",
        CoreError::NonIntegrable { .. } => "non_integrable",
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
