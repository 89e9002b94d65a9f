use std::sync::{Mutex, MutexGuard};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::state::{DispatchState, Event, EventKind, JobState};
use super::store::EventStore;
use super::{DispatchConfig, DispatchError};
use crate::agents::{designer_lexicon, make_probe, Probe, ProbeKind, WorkerScore};
use crate::dialog::{check_termination, legal_acts, DialogAct, MatchNow, Origin, Role, Status, Turn};
use crate::layout::{EditOp, Layout, LayoutKind, Scenario};
use crate::nlu::{validate_submission, Lexicon, Proposal};

/// Author recorded on generator-injected turns.
pub const SYNTHETIC_AUTHOR: &str = "synthetic-generator";

/// A transcript turn as shown to workers: no author, no origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurnView {
    pub index: usize,
    pub role: Role,
    pub act: DialogAct,
    pub utterance: String,
    pub edits: Vec<EditOp>,
    pub canvas_after: Layout,
}

impl From<&Turn> for TurnView {
    fn from(t: &Turn) -> Self {
        TurnView {
            index: t.index,
            role: t.role,
            act: t.act,
            utterance: t.utterance.clone(),
            edits: t.edits.clone(),
            canvas_after: t.canvas_after.clone(),
        }
    }
}

/// Session state filtered for one role. The reference and the match flag
/// are present only for directors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub session_id: String,
    pub scenario: Scenario,
    pub viewer: Role,
    pub status: Status,
    pub canvas: Layout,
    pub transcript: Vec<TurnView>,
    /// Acts the viewer may use now; empty when it is not the viewer's turn.
    pub legal_acts: Vec<DialogAct>,
    /// Expiry of the lease on the viewer's pending job, if leased.
    pub lease_expires_at: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<Layout>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub match_now: Option<MatchNow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobView {
    pub job_id: String,
    pub session_id: String,
    pub role: Role,
    pub turn_index: usize,
    pub lease_expires_at: u64,
    pub context: SessionView,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewSession {
    pub session_id: String,
    pub job_id: String,
}

/// A worker's answer to a leased job.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Submission {
    pub worker_id: String,
    #[serde(default)]
    pub act: Option<DialogAct>,
    #[serde(default)]
    pub utterance: String,
    #[serde(default)]
    pub canvas: Option<Layout>,
}

/// What the submitting worker is told. Flagged turns read as accepted so
/// that probes stay undisclosed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubmitOutcome {
    pub job_id: String,
    pub accepted: bool,
    pub act: Option<DialogAct>,
    pub derived_edits: Vec<EditOp>,
    pub notes: Vec<String>,
    pub session_status: Status,
    pub next_job_id: Option<String>,
}

/// One completed session in the export dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportRecord {
    pub session_id: String,
    pub scenario: Scenario,
    pub reference: Layout,
    pub turns: Vec<Turn>,
}

struct Inner {
    config: DispatchConfig,
    state: DispatchState,
    events: Vec<Event>,
    store: Option<EventStore>,
    lexicon: Lexicon,
}

/// The job dispatcher. Every mutation takes one lock and is recorded as
/// events before the call returns. Times are caller-supplied milliseconds.
pub struct Dispatcher {
    inner: Mutex<Inner>,
}

fn mix_seed(seed: u64, session_id: &str, turn_index: usize) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in session_id.bytes() {
        h = (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3);
    }
    seed ^ h ^ (turn_index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

impl Inner {
    fn emit(&mut self, now: u64, kind: EventKind) -> Result<(), DispatchError> {
        let event = Event { seq: self.state.last_seq + 1, timestamp: now, kind };
        self.state.apply(&event)?;
        if let Some(store) = &mut self.store {
            store.append(&event)?;
            if event.seq.is_multiple_of(self.config.snapshot_every) {
                store.snapshot(&self.state)?;
            }
        }
        self.events.push(event);
        Ok(())
    }

    fn open_next_job(&mut self, session_id: &str, probe: Option<Probe>, now: u64) -> Result<Option<String>, DispatchError> {
        let dialog = &self.state.sessions[session_id].dialog;
        let Some(role) = dialog.status.awaited_role() else {
            return Ok(None);
        };
        let job_id = format!("j-{:06}", self.state.jobs.len() + 1);
        let kind = EventKind::JobOpened {
            job_id: job_id.clone(),
            session_id: session_id.to_string(),
            role,
            turn_index: dialog.transcript.len(),
            probe,
        };
        self.emit(now, kind)?;
        Ok(Some(job_id))
    }

    /// Decides whether the director slot that just opened is taken by a probe.
    fn draw_probe(&self, session_id: &str) -> Option<Probe> {
        let record = &self.state.sessions[session_id];
        let dialog = &record.dialog;
        let last = dialog.last_turn()?;
        if last.role != Role::Designer || last.act == DialogAct::Question {
            return None;
        }
        if record.probes_injected >= self.config.probe_max_per_session {
            return None;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(self.config.seed, session_id, dialog.transcript.len()));
        if !rng.gen_bool(self.config.probe_probability) {
            return None;
        }
        let start = rng.gen_range(0..ProbeKind::ALL.len());
        let probe_seed: u64 = rng.gen();
        (0..ProbeKind::ALL.len())
            .map(|i| ProbeKind::ALL[(start + i) % ProbeKind::ALL.len()])
            .find_map(|kind| make_probe(&dialog.canvas, kind, probe_seed).ok())
    }

    fn expire(&mut self, now: u64) -> Result<usize, DispatchError> {
        let expired: Vec<(String, String)> = self
            .state
            .jobs
            .values()
            .filter(|j| j.state == JobState::Leased)
            .filter_map(|j| j.lease.as_ref().filter(|l| l.expires_at < now).map(|l| (j.job_id.clone(), l.worker_id.clone())))
            .collect();
        for (job_id, worker_id) in &expired {
            self.emit(now, EventKind::LeaseExpired { job_id: job_id.clone(), worker_id: worker_id.clone() })?;
        }
        Ok(expired.len())
    }

    fn view(&self, session_id: &str, viewer: Role) -> Result<SessionView, DispatchError> {
        let record = self.state.sessions.get(session_id).ok_or_else(|| DispatchError::UnknownSession(session_id.into()))?;
        let dialog = &record.dialog;
        let legal = if dialog.status.awaited_role() == Some(viewer) {
            legal_acts(dialog).map(|s| s.into_iter().collect()).unwrap_or_default()
        } else {
            Vec::new()
        };
        let lease_expires_at = self
            .state
            .pending_job(session_id)
            .filter(|j| j.role == viewer)
            .and_then(|j| j.lease.as_ref())
            .map(|l| l.expires_at);
        let director = viewer == Role::Director;
        Ok(SessionView {
            session_id: session_id.to_string(),
            scenario: dialog.scenario,
            viewer,
            status: dialog.status,
            canvas: dialog.canvas.clone(),
            transcript: dialog.transcript.iter().map(TurnView::from).collect(),
            legal_acts: legal,
            lease_expires_at,
            reference: director.then(|| dialog.reference.clone()),
            match_now: director.then(|| check_termination(dialog).match_now),
        })
    }

    fn lexicon_for(&self, session_id: &str) -> Lexicon {
        let reference = &self.state.sessions[session_id].dialog.reference;
        match reference.kind() {
            LayoutKind::Coco => self.lexicon.clone().with_classes(&reference.class_labels()),
            LayoutKind::Shape2d => self.lexicon.clone(),
        }
    }
}

impl Dispatcher {
    /// In-memory dispatcher, ignoring `config.data_dir`.
    pub fn new(config: DispatchConfig) -> Self {
        Dispatcher {
            inner: Mutex::new(Inner {
                config,
                state: DispatchState::default(),
                events: Vec::new(),
                store: None,
                lexicon: designer_lexicon(),
            }),
        }
    }

    /// Dispatcher backed by `config.data_dir` when set, recovering any
    /// existing log and snapshot.
    pub fn open(config: DispatchConfig) -> Result<Self, DispatchError> {
        config.validate().map_err(|e| DispatchError::Invalid(e.to_string()))?;
        let Some(dir) = config.data_dir.clone() else {
            return Ok(Dispatcher::new(config));
        };
        let recovered = EventStore::open(&dir)?;
        Ok(Dispatcher {
            inner: Mutex::new(Inner {
                config,
                state: recovered.state,
                events: recovered.events,
                store: Some(recovered.store),
                lexicon: designer_lexicon(),
            }),
        })
    }

    /// Replaces the lexicon used to validate submissions.
    pub fn with_lexicon(self, lexicon: Lexicon) -> Self {
        self.lock().lexicon = lexicon;
        self
    }

    fn lock(&self) -> MutexGuard<'_, Inner> {
        self.inner.lock().expect("dispatcher lock poisoned")
    }

    pub fn config(&self) -> DispatchConfig {
        self.lock().config.clone()
    }

    /// Starts a session on `reference` and opens its first director job.
    pub fn create_session(&self, reference: Layout, now: u64) -> Result<NewSession, DispatchError> {
        if reference.is_empty() {
            return Err(DispatchError::Invalid("reference layout has no objects".into()));
        }
        let mut inner = self.lock();
        let session_id = format!("s-{:06}", inner.state.sessions.len() + 1);
        inner.emit(now, EventKind::SessionCreated { session_id: session_id.clone(), reference })?;
        let job_id = inner.open_next_job(&session_id, None, now)?.expect("new sessions await the director");
        Ok(NewSession { session_id, job_id })
    }

    /// Returns leased jobs whose expiry is before `now` to the open pool.
    pub fn expire_leases(&self, now: u64) -> Result<usize, DispatchError> {
        self.lock().expire(now)
    }

    /// Leases the oldest open job of `role` to `worker_id`. Skips sessions
    /// where the worker wrote the latest human turn of the other role, so a
    /// worker never plays both sides of one exchange.
    pub fn claim(&self, worker_id: &str, role: Role, now: u64) -> Result<Option<JobView>, DispatchError> {
        if worker_id.trim().is_empty() {
            return Err(DispatchError::Invalid("worker_id is empty".into()));
        }
        let mut inner = self.lock();
        inner.expire(now)?;
        let state = &inner.state;
        let candidate = state
            .jobs
            .values()
            .filter(|j| j.state == JobState::Open && j.role == role)
            .filter(|j| {
                let dialog = &state.sessions[&j.session_id].dialog;
                let counterpart = dialog.transcript.iter().rev().find(|t| t.role == role.other() && t.origin == Origin::Human);
                counterpart.is_none_or(|t| t.author != worker_id)
            })
            .min_by_key(|j| j.opened_seq)
            .map(|j| (j.job_id.clone(), j.session_id.clone(), j.turn_index));
        let Some((job_id, session_id, turn_index)) = candidate else {
            return Ok(None);
        };
        let expires_at = now + inner.config.lease_ms();
        inner.emit(now, EventKind::JobLeased { job_id: job_id.clone(), worker_id: worker_id.to_string(), expires_at })?;
        let context = inner.view(&session_id, role)?;
        Ok(Some(JobView { job_id, session_id, role, turn_index, lease_expires_at: expires_at, context }))
    }

    /// Validates a submission for a leased job and advances the session.
    pub fn submit(&self, job_id: &str, submission: Submission, now: u64) -> Result<SubmitOutcome, DispatchError> {
        let mut inner = self.lock();
        let job = inner.state.jobs.get(job_id).ok_or_else(|| DispatchError::UnknownJob(job_id.into()))?.clone();
        let lease = match (&job.state, &job.lease) {
            (JobState::Leased, Some(lease)) if lease.worker_id == submission.worker_id => lease.clone(),
            _ => return Err(DispatchError::NotLeaseHolder),
        };
        if lease.expires_at < now {
            inner.emit(now, EventKind::LeaseExpired { job_id: job_id.into(), worker_id: lease.worker_id })?;
            return Err(DispatchError::LeaseExpired);
        }
        let worker_id = submission.worker_id.clone();
        inner.emit(now, EventKind::TurnSubmitted { job_id: job_id.into(), worker_id: worker_id.clone() })?;

        let proposal = Proposal {
            role: job.role,
            act: submission.act,
            utterance: submission.utterance,
            canvas: submission.canvas,
            author: worker_id.clone(),
            origin: Origin::Human,
            timestamp: now,
        };
        let lexicon = inner.lexicon_for(&job.session_id);
        let validated = validate_submission(&inner.state.sessions[&job.session_id].dialog, &proposal, job.probe.as_ref(), &lexicon);
        let result = validated.result;

        let (accepted, act, next_job_id) = match validated.turn {
            None => {
                inner.emit(now, EventKind::TurnRejected { job_id: job_id.into(), worker_id, notes: result.notes.clone() })?;
                (false, None, inner.open_next_job(&job.session_id, job.probe.clone(), now)?)
            }
            Some(turn) => {
                let act = turn.act;
                inner.emit(
                    now,
                    EventKind::TurnValidated {
                        job_id: job_id.into(),
                        worker_id,
                        verdict: result.verdict,
                        turn,
                        probe_outcome: result.probe_outcome,
                        notes: result.notes.clone(),
                    },
                )?;
                if act == DialogAct::ConfirmDone {
                    inner.emit(now, EventKind::SessionCompleted { session_id: job.session_id.clone() })?;
                    (true, Some(act), None)
                } else {
                    if let Some(mut probe) = inner.draw_probe(&job.session_id) {
                        let dialog = &inner.state.sessions[&job.session_id].dialog;
                        probe.injected_at = Some(dialog.transcript.len());
                        let turn = dialog
                            .compose_turn(Role::Director, DialogAct::Instruct, probe.utterance.clone(), vec![], SYNTHETIC_AUTHOR, Origin::Synthetic, now)
                            .expect("probe turns carry no edits");
                        inner.emit(now, EventKind::ProbeInjected { session_id: job.session_id.clone(), probe: probe.clone(), turn })?;
                        (true, Some(act), inner.open_next_job(&job.session_id, Some(probe), now)?)
                    } else {
                        (true, Some(act), inner.open_next_job(&job.session_id, None, now)?)
                    }
                }
            }
        };
        let session_status = inner.state.sessions[&job.session_id].dialog.status;
        let visible_notes = if accepted { Vec::new() } else { result.notes };
        Ok(SubmitOutcome {
            job_id: job_id.to_string(),
            accepted,
            act,
            derived_edits: result.derived_edits,
            notes: visible_notes,
            session_status,
            next_job_id,
        })
    }

    /// Closes an active session without completion and cancels its pending job.
    pub fn abandon_session(&self, session_id: &str, reason: &str, now: u64) -> Result<(), DispatchError> {
        let mut inner = self.lock();
        let record = inner.state.sessions.get(session_id).ok_or_else(|| DispatchError::UnknownSession(session_id.into()))?;
        if !record.dialog.status.is_active() {
            return Err(DispatchError::Invalid(format!("session {session_id} is {:?}", record.dialog.status)));
        }
        inner.emit(now, EventKind::SessionAbandoned { session_id: session_id.into(), reason: reason.into() })
    }

    pub fn session_view(&self, session_id: &str, viewer: Role) -> Result<SessionView, DispatchError> {
        self.lock().view(session_id, viewer)
    }

    /// Full transcript including authors and origins.
    pub fn transcript(&self, session_id: &str) -> Result<Vec<Turn>, DispatchError> {
        let inner = self.lock();
        let record = inner.state.sessions.get(session_id).ok_or_else(|| DispatchError::UnknownSession(session_id.into()))?;
        Ok(record.dialog.transcript.clone())
    }

    pub fn worker_score(&self, worker_id: &str) -> Result<WorkerScore, DispatchError> {
        self.lock().state.workers.get(worker_id).cloned().ok_or_else(|| DispatchError::UnknownWorker(worker_id.into()))
    }

    /// Completed sessions, in session id order.
    pub fn export(&self) -> Vec<ExportRecord> {
        let inner = self.lock();
        inner
            .state
            .sessions
            .iter()
            .filter(|(_, r)| r.dialog.status == Status::Completed)
            .map(|(id, r)| ExportRecord {
                session_id: id.clone(),
                scenario: r.dialog.scenario,
                reference: r.dialog.reference.clone(),
                turns: r.dialog.transcript.clone(),
            })
            .collect()
    }

    pub fn events(&self) -> Vec<Event> {
        self.lock().events.clone()
    }

    pub fn state(&self) -> DispatchState {
        self.lock().state.clone()
    }

    /// Canonical serialization of the live state.
    pub fn canonical_state(&self) -> String {
        self.lock().state.canonical_json()
    }
}
