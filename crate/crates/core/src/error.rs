use thiserror::Error;

use crate::channel::Endpoint;
use crate::layout::UeId;

/// Errors raised by the simulator library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A link was evaluated that the coupling table never built. Always a
    /// construction bug in the caller.
    #[error("no coupling entry from UE {tx} to {rx}")]
    MissingCoupling { tx: UeId, rx: Endpoint },

    #[error("statistic requested over an empty sample set")]
    EmptySamples,
}

impl SimError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        SimError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;
