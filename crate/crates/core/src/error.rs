use thiserror::Error;

/// Errors raised by the representation-theoretic operations.
///
/// Every variant carries a stable machine-readable code (see [`Error::code`]),
/// which the command-line front end reports verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("representations live over different quivers")]
    QuiverMismatch,
    #[error("morphisms are not composable: {0}")]
    NotComposable(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("quiver has an oriented cycle, so finite-dimensional projectives do not exist")]
    NonAcyclicQuiver,
    #[error("subobject closure violated: {0}")]
    SubobjectClosureViolation(String),
    #[error("enumeration budget exceeded: {what} needs {needed}, budget is {budget}")]
    BudgetExceeded {
        what: String,
        needed: u128,
        budget: u128,
    },
    #[error("exhaustive subspace search is unavailable over the rationals")]
    RationalFieldUnsupported,
    #[error("Ext^1 obstruction: {0}")]
    ExtObstruction(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("every loop of the truncated quiver acts nontrivially")]
    NoFreeLoop,
    #[error("certificate invalid: {0}")]
    CertificateInvalid(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::FieldMismatch(..) => "FieldMismatch",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::QuiverMismatch => "QuiverMismatch",
            Error::NotComposable(_) => "NotComposable",
            Error::InvalidField(_) => "InvalidField",
            Error::InvalidInput(_) => "InvalidInput",
            Error::NonAcyclicQuiver => "NonAcyclicQuiver",
            Error::SubobjectClosureViolation(_) => "SubobjectClosureViolation",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::RationalFieldUnsupported => "RationalFieldUnsupported",
            Error::ExtObstruction(_) => "ExtObstruction",
            Error::HypothesisViolation(_) => "HypothesisViolation",
            Error::NoFreeLoop => "NoFreeLoop",
            Error::CertificateInvalid(_) => "CertificateInvalid",
        }
    }

    /// Whether the error stems from malformed input, as opposed to a budget or
    /// a violated mathematical hypothesis.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::FieldMismatch(..)
                | Error::DimensionMismatch(_)
                | Error::QuiverMismatch
                | Error::NotComposable(_)
                | Error::InvalidField(_)
                | Error::InvalidInput(_)
                | Error::CertificateInvalid(_)
        )
    }

    pub(crate) fn budget(what: impl Into<String>, needed: u128, budget: u128) -> Self {
        Error::BudgetExceeded {
            what: what.into(),
            needed,
            budget,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
