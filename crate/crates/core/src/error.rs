use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;

use crate::smooth::SmoothModel;
use crate::svr::SvrFit;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two vectors that must share a dimension do not.
    DimensionMismatch { expected: usize, found: usize },
    /// A parameter lies outside its documented domain.
    InvalidParameter(String),
    /// An input contains NaN or an infinity.
    NonFinite(&'static str),
    /// A series is too short for the requested lag.
    InsufficientData { needed: usize, found: usize },
    /// The SVR dual solver hit its iteration cap. Carries the best iterate.
    SvrNotConverged(Box<SvrFit>),
    /// The smoothing-model solver hit its iteration cap. Carries the best iterate.
    SmoothNotConverged(Box<SmoothModel>),
    /// Every bandwidth candidate produced a non-finite cross-validation score.
    BandwidthSelection,
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for errors caused by the caller breaking an operation's contract.
    pub fn is_contract_violation(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch { .. } | Error::InvalidParameter(_) | Error::NonFinite(_)
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::NonFinite(what) => write!(f, "non-finite value in {what}"),
            Error::InsufficientData { needed, found } => {
                write!(f, "insufficient data: need at least {needed} points, got {found}")
            }
            Error::SvrNotConverged(fit) => write!(
                f,
                "SVR dual solver stopped after {} iterations with KKT violation {:e}",
                fit.diagnostics.iterations, fit.diagnostics.max_kkt_violation
            ),
            Error::SmoothNotConverged(model) => write!(
                f,
                "smooth-model solver stopped after {} iterations with KKT violation {:e}",
                model.diagnostics.iterations, model.diagnostics.max_kkt_violation
            ),
            Error::BandwidthSelection => {
                f.write_str("bandwidth selection failed: no finite cross-validation score")
            }
        }
    }
}

impl core::error::Error for Error {}
