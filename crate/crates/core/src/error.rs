use std::sync::Arc;
use std::time::Duration;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors surfaced by suspensions, streams, polynomial arithmetic and the
/// benchmark harness.
///
/// Errors are cheap to clone: a failed suspension memoizes its error and hands
/// out the same value on every force.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("timed out after {0:?} waiting for a suspended value")]
    Timeout(Duration),
    #[error("suspended computation failed: {0}")]
    Failed(Arc<str>),
    #[error("suspended computation panicked: {0}")]
    Panicked(Arc<str>),
    #[error("scheduler has been shut down")]
    SchedulerShutdown,
    #[error("head or tail of an empty stream")]
    EmptyStream,
    #[error("ring mismatch: {0}")]
    Ring(Arc<str>),
    #[error("domain error: {0}")]
    Domain(Arc<str>),
    #[error("checksum mismatch for {workload}: {expected} vs {found}")]
    ChecksumMismatch {
        workload: String,
        expected: String,
        found: String,
    },
    #[error("invalid configuration: {0}")]
    Config(Arc<str>),
}

impl Error {
    /// A user-level failure raised from inside a thunk.
    pub fn failed(msg: impl Into<String>) -> Self {
        Error::Failed(msg.into().into())
    }

    pub(crate) fn ring(msg: impl Into<String>) -> Self {
        Error::Ring(msg.into().into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into().into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into().into())
    }
}
