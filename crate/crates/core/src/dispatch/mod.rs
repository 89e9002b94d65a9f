//! Job dispatch: sessions, per-turn jobs with exclusive leases, submission
//! validation, probe injection, an append-only event log and the HTTP API.

mod config;
mod http;
mod service;
mod state;
mod store;

use thiserror::Error;

pub use config::{ConfigError, DispatchConfig};
pub use http::{router, serve, unix_millis};
pub use service::{
    Dispatcher, ExportRecord, JobView, NewSession, SessionView, Submission, SubmitOutcome, TurnView, SYNTHETIC_AUTHOR,
};
pub use state::{replay, DispatchState, Event, EventKind, Job, JobState, Lease, ReplayError, SessionRecord};
pub use store::{EventStore, EVENT_LOG, SNAPSHOT};

#[derive(Debug, Error)]
pub enum DispatchError {
    #[error("unknown session {0}")]
    UnknownSession(String),
    #[error("unknown job {0}")]
    UnknownJob(String),
    #[error("unknown worker {0}")]
    UnknownWorker(String),
    #[error("not-lease-holder")]
    NotLeaseHolder,
    #[error("lease-expired")]
    LeaseExpired,
    #[error("invalid request: {0}")]
    Invalid(String),
    #[error(transparent)]
    Replay(#[from] ReplayError),
    #[error("corrupt store: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl DispatchError {
    /// Stable machine-readable code for API clients.
    pub fn code(&self) -> &'static str {
        match self {
            DispatchError::UnknownSession(_) | DispatchError::UnknownJob(_) | DispatchError::UnknownWorker(_) => "not-found",
            DispatchError::NotLeaseHolder => "not-lease-holder",
            DispatchError::LeaseExpired => "lease-expired",
            DispatchError::Invalid(_) => "invalid-request",
            DispatchError::Replay(_) | DispatchError::Corrupt(_) | DispatchError::Io(_) => "internal",
        }
    }
}
