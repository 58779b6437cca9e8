use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A state left the region where the model is defined (K ≤ 0 or E ≤ 0).
    #[error("domain error: {0}")]
    Domain(String),

    /// A vector field failed during integration; `t` is the last accepted time.
    #[error("at t = {t}: {source}")]
    AtTime { t: f64, source: Box<Error> },

    #[error("step limit of {max_steps} exceeded at t = {t}")]
    StepLimitExceeded { t: f64, max_steps: usize },

    #[error("non-finite state produced at t = {t}")]
    NonFiniteState { t: f64 },

    #[error("alpha + beta = {sum} is structurally unstable: no isolated positive equilibrium")]
    StructurallyUnstable { sum: f64 },

    #[error("no positive equilibrium: {0}")]
    NoEquilibrium(String),

    #[error("invalid consumption target p = {p}: implied s_r = {s_r} must be positive")]
    InvalidTarget { p: f64, s_r: f64 },

    #[error(
        "no sign change of output growth on [{p_low}, {p_high}] ({growth_low}, {growth_high})"
    )]
    NoSignChange {
        p_low: f64,
        p_high: f64,
        growth_low: f64,
        growth_high: f64,
    },

    #[error("nothing to plot: empty series")]
    EmptySeries,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid {field}: {reason}")]
    Validation { field: String, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub(crate) fn validation(field: &str, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.to_string(),
            reason: reason.into(),
        }
    }

    /// Strips any [`Error::AtTime`] wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtTime { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self.root(),
            Error::Domain(_)
                | Error::StepLimitExceeded { .. }
                | Error::NonFiniteState { .. }
                | Error::StructurallyUnstable { .. }
                | Error::NoEquilibrium(_)
                | Error::InvalidTarget { .. }
                | Error::NoSignChange { .. }
        )
    }
}
