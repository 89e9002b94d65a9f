//! Event-sourced dispatcher state. [`DispatchState::apply`] is the only way
//! state changes; [`replay`] folds a log from scratch.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::{Probe, ProbeOutcome, WorkerScore};
use crate::dialog::{append_turn, new_session, DialogState, Role, Status, Turn};
use crate::layout::Layout;
use crate::nlu::Verdict;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub seq: u64,
    /// Milliseconds since the Unix epoch.
    pub timestamp: u64,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    SessionCreated { session_id: String, reference: Layout },
    JobOpened { job_id: String, session_id: String, role: Role, turn_index: usize, probe: Option<Probe> },
    JobLeased { job_id: String, worker_id: String, expires_at: u64 },
    TurnSubmitted { job_id: String, worker_id: String },
    TurnValidated {
        job_id: String,
        worker_id: String,
        verdict: Verdict,
        turn: Turn,
        probe_outcome: Option<ProbeOutcome>,
        notes: Vec<String>,
    },
    TurnRejected { job_id: String, worker_id: String, notes: Vec<String> },
    ProbeInjected { session_id: String, probe: Probe, turn: Turn },
    LeaseExpired { job_id: String, worker_id: String },
    SessionCompleted { session_id: String },
    SessionAbandoned { session_id: String, reason: String },
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::SessionCreated { .. } => "session_created",
            EventKind::JobOpened { .. } => "job_opened",
            EventKind::JobLeased { .. } => "job_leased",
            EventKind::TurnSubmitted { .. } => "turn_submitted",
            EventKind::TurnValidated { .. } => "turn_validated",
            EventKind::TurnRejected { .. } => "turn_rejected",
            EventKind::ProbeInjected { .. } => "probe_injected",
            EventKind::LeaseExpired { .. } => "lease_expired",
            EventKind::SessionCompleted { .. } => "session_completed",
            EventKind::SessionAbandoned { .. } => "session_abandoned",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobState {
    Open,
    Leased,
    Submitted,
    Validated,
    Rejected,
    /// Withdrawn because its session was abandoned.
    Cancelled,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lease {
    pub worker_id: String,
    pub expires_at: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Job {
    pub job_id: String,
    pub session_id: String,
    pub role: Role,
    pub turn_index: usize,
    pub state: JobState,
    pub lease: Option<Lease>,
    /// Worker whose submission moved the job past `leased`.
    pub submitted_by: Option<String>,
    pub probe: Option<Probe>,
    pub opened_seq: u64,
}

impl Job {
    pub fn is_pending(&self) -> bool {
        matches!(self.state, JobState::Open | JobState::Leased)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub dialog: DialogState,
    pub probes_injected: u32,
    pub created_at: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DispatchState {
    pub last_seq: u64,
    pub sessions: BTreeMap<String, SessionRecord>,
    pub jobs: BTreeMap<String, Job>,
    pub workers: BTreeMap<String, WorkerScore>,
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("event {seq} ({kind}): {reason}")]
pub struct ReplayError {
    pub seq: u64,
    pub kind: &'static str,
    pub reason: String,
}

impl DispatchState {
    /// Canonical serialization: maps are ordered, so equal states give equal bytes.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("state serializes")
    }

    /// The pending (open or leased) job of a session, if any.
    pub fn pending_job(&self, session_id: &str) -> Option<&Job> {
        self.jobs.values().find(|j| j.session_id == session_id && j.is_pending())
    }

    fn session_mut(&mut self, id: &str) -> Result<&mut SessionRecord, String> {
        self.sessions.get_mut(id).ok_or_else(|| format!("unknown session {id}"))
    }

    fn job_mut(&mut self, id: &str, expected: JobState) -> Result<&mut Job, String> {
        let job = self.jobs.get_mut(id).ok_or_else(|| format!("unknown job {id}"))?;
        if job.state != expected {
            return Err(format!("job {id} is {:?}, expected {expected:?}", job.state));
        }
        Ok(job)
    }

    fn worker_mut(&mut self, id: &str) -> &mut WorkerScore {
        self.workers.entry(id.to_string()).or_insert_with(|| WorkerScore::new(id))
    }

    fn append(&mut self, session_id: &str, turn: &Turn) -> Result<(), String> {
        let record = self.session_mut(session_id)?;
        record.dialog = append_turn(&record.dialog, turn.clone()).map_err(|e| e.to_string())?;
        Ok(())
    }

    /// Applies one event, checking every invariant the live service relies on.
    pub fn apply(&mut self, event: &Event) -> Result<(), ReplayError> {
        let fail = |reason: String| ReplayError { seq: event.seq, kind: event.kind.name(), reason };
        if event.seq != self.last_seq + 1 {
            return Err(fail(format!("expected sequence {}", self.last_seq + 1)));
        }
        self.apply_kind(&event.kind, event.seq, event.timestamp).map_err(fail)?;
        self.last_seq = event.seq;
        Ok(())
    }

    fn apply_kind(&mut self, kind: &EventKind, seq: u64, timestamp: u64) -> Result<(), String> {
        match kind {
            EventKind::SessionCreated { session_id, reference } => {
                if self.sessions.contains_key(session_id) {
                    return Err(format!("session {session_id} already exists"));
                }
                let record =
                    SessionRecord { dialog: new_session(session_id.clone(), reference.clone()), probes_injected: 0, created_at: timestamp };
                self.sessions.insert(session_id.clone(), record);
            }
            EventKind::JobOpened { job_id, session_id, role, turn_index, probe } => {
                if self.jobs.contains_key(job_id) {
                    return Err(format!("job {job_id} already exists"));
                }
                let dialog = &self.sessions.get(session_id).ok_or_else(|| format!("unknown session {session_id}"))?.dialog;
                if dialog.status.awaited_role() != Some(*role) {
                    return Err(format!("session {session_id} is {:?}, not awaiting {role}", dialog.status));
                }
                if *turn_index != dialog.transcript.len() {
                    return Err(format!("turn index {turn_index} but transcript has {}", dialog.transcript.len()));
                }
                if let Some(other) = self.pending_job(session_id) {
                    return Err(format!("session {session_id} already has pending job {}", other.job_id));
                }
                let job = Job {
                    job_id: job_id.clone(),
                    session_id: session_id.clone(),
                    role: *role,
                    turn_index: *turn_index,
                    state: JobState::Open,
                    lease: None,
                    submitted_by: None,
                    probe: probe.clone(),
                    opened_seq: seq,
                };
                self.jobs.insert(job_id.clone(), job);
            }
            EventKind::JobLeased { job_id, worker_id, expires_at } => {
                let job = self.job_mut(job_id, JobState::Open)?;
                job.state = JobState::Leased;
                job.lease = Some(Lease { worker_id: worker_id.clone(), expires_at: *expires_at });
            }
            EventKind::LeaseExpired { job_id, worker_id } => {
                let job = self.job_mut(job_id, JobState::Leased)?;
                if job.lease.as_ref().map(|l| &l.worker_id) != Some(worker_id) {
                    return Err(format!("{worker_id} does not hold {job_id}"));
                }
                job.state = JobState::Open;
                job.lease = None;
            }
            EventKind::TurnSubmitted { job_id, worker_id } => {
                let job = self.job_mut(job_id, JobState::Leased)?;
                if job.lease.as_ref().map(|l| &l.worker_id) != Some(worker_id) {
                    return Err(format!("{worker_id} does not hold {job_id}"));
                }
                job.state = JobState::Submitted;
                job.lease = None;
                job.submitted_by = Some(worker_id.clone());
            }
            EventKind::TurnValidated { job_id, worker_id, verdict, turn, probe_outcome, .. } => {
                let job = self.job_mut(job_id, JobState::Submitted)?;
                if job.submitted_by.as_ref() != Some(worker_id) {
                    return Err(format!("{job_id} was not submitted by {worker_id}"));
                }
                if *verdict == Verdict::Rejected {
                    return Err("rejected submissions are recorded as turn_rejected".into());
                }
                if turn.role != job.role || turn.index != job.turn_index || turn.author != *worker_id {
                    return Err(format!("turn does not belong to {job_id}"));
                }
                job.state = JobState::Validated;
                let session_id = job.session_id.clone();
                self.append(&session_id, turn)?;
                let worker = self.worker_mut(worker_id);
                worker.tasks_contributed += 1;
                if *verdict == Verdict::Flagged {
                    worker.flags += 1;
                }
                if let Some(outcome) = probe_outcome {
                    worker.record_probe(*outcome);
                }
            }
            EventKind::TurnRejected { job_id, worker_id, .. } => {
                let job = self.job_mut(job_id, JobState::Submitted)?;
                if job.submitted_by.as_ref() != Some(worker_id) {
                    return Err(format!("{job_id} was not submitted by {worker_id}"));
                }
                job.state = JobState::Rejected;
                self.worker_mut(worker_id).flags += 1;
            }
            EventKind::ProbeInjected { session_id, turn, .. } => {
                if let Some(job) = self.pending_job(session_id) {
                    return Err(format!("probe injected while {} is pending", job.job_id));
                }
                if turn.role != Role::Director {
                    return Err("probes are director turns".into());
                }
                self.append(session_id, turn)?;
                self.session_mut(session_id)?.probes_injected += 1;
            }
            EventKind::SessionCompleted { session_id } => {
                let record = self.session_mut(session_id)?;
                if record.dialog.status != Status::Completed {
                    return Err(format!("session {session_id} is {:?}", record.dialog.status));
                }
            }
            EventKind::SessionAbandoned { session_id, .. } => {
                let record = self.session_mut(session_id)?;
                if !record.dialog.status.is_active() {
                    return Err(format!("session {session_id} is {:?}", record.dialog.status));
                }
                record.dialog = record.dialog.abandon();
                for job in self.jobs.values_mut().filter(|j| j.session_id == *session_id && j.is_pending()) {
                    job.state = JobState::Cancelled;
                    job.lease = None;
                }
            }
        }
        Ok(())
    }
}

/// Rebuilds state by folding `events` over an empty state.
pub fn replay<'a>(events: impl IntoIterator<Item = &'a Event>) -> Result<DispatchState, ReplayError> {
    let mut state = DispatchState::default();
    for event in events {
        state.apply(event)?;
    }
    Ok(state)
}
