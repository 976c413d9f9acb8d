use thiserror::Error;

/// Every failure the library reports.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("SNR² stays below 1 up to τ·Γ_mech = {tau_max:e}")]
    NoCrossing { tau_max: f64 },

    #[error("adaptive quadrature stopped at estimated error {estimate:e} (requested {requested:e})")]
    Quadrature { estimate: f64, requested: f64 },

    #[error("ODE integration failed: {0}")]
    Integration(String),

    #[error("eigenvector labeling is ambiguous: {0}")]
    LabelAmbiguity(String),

    #[error("{}", config_location(*.line, .message))]
    Config { line: Option<usize>, message: String },
}

fn config_location(line: Option<usize>, message: &str) -> String {
    match line {
        Some(n) => format!("config line {n}: {message}"),
        None => format!("config: {message}"),
    }
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam { name, reason: reason.into() }
    }

    pub(crate) fn config(line: Option<usize>, message: impl Into<String>) -> Self {
        Error::Config { line, message: message.into() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
