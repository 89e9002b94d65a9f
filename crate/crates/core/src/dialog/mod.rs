//! The per-session turn protocol between director and designer.
//!
//! [`DialogState`] is an immutable value; [`append_turn`] returns the next
//! state or the reason the turn was refused. Roles strictly alternate,
//! starting with the director.

mod transcript;

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::layout::{apply_edit, coco_similarity, exact_match, EditError, EditOp, Layout, LayoutKind, Scenario};

pub use transcript::{read_transcript, write_transcript, TranscriptError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Director,
    Designer,
}

impl Role {
    pub fn other(self) -> Role {
        match self {
            Role::Director => Role::Designer,
            Role::Designer => Role::Director,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Director => "director",
            Role::Designer => "designer",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "director" => Ok(Role::Director),
            "designer" => Ok(Role::Designer),
            other => Err(format!("unknown role `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DialogAct {
    Instruct,
    SuggestFix,
    Answer,
    Question,
    Edit,
    ConfirmDone,
    Other,
}

impl DialogAct {
    pub const DIRECTOR: [DialogAct; 4] =
        [DialogAct::Instruct, DialogAct::SuggestFix, DialogAct::Answer, DialogAct::ConfirmDone];
    pub const DESIGNER: [DialogAct; 3] = [DialogAct::Edit, DialogAct::Question, DialogAct::Other];

    pub fn allowed_for(self, role: Role) -> bool {
        match role {
            Role::Director => DialogAct::DIRECTOR.contains(&self),
            Role::Designer => DialogAct::DESIGNER.contains(&self),
        }
    }

    /// INSTRUCT and SUGGEST_FIX open a round.
    pub fn opens_round(self) -> bool {
        matches!(self, DialogAct::Instruct | DialogAct::SuggestFix)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DialogAct::Instruct => "INSTRUCT",
            DialogAct::SuggestFix => "SUGGEST_FIX",
            DialogAct::Answer => "ANSWER",
            DialogAct::Question => "QUESTION",
            DialogAct::Edit => "EDIT",
            DialogAct::ConfirmDone => "CONFIRM_DONE",
            DialogAct::Other => "OTHER",
        }
    }
}

impl fmt::Display for DialogAct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Whether a turn came from a worker or was injected by the synthetic generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Human,
    Synthetic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Turn {
    pub index: usize,
    pub role: Role,
    pub act: DialogAct,
    pub utterance: String,
    pub edits: Vec<EditOp>,
    pub canvas_after: Layout,
    pub author: String,
    pub origin: Origin,
    /// Milliseconds since the Unix epoch, as supplied by the caller.
    pub timestamp: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    AwaitingDirector,
    AwaitingDesigner,
    Completed,
    Abandoned,
}

impl Status {
    pub fn awaited_role(self) -> Option<Role> {
        match self {
            Status::AwaitingDirector => Some(Role::Director),
            Status::AwaitingDesigner => Some(Role::Designer),
            Status::Completed | Status::Abandoned => None,
        }
    }

    pub fn is_active(self) -> bool {
        self.awaited_role().is_some()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DialogError {
    #[error("out-of-turn: expected {expected:?}, got {got}")]
    OutOfTurn { expected: Option<Role>, got: Role },
    #[error("protocol-violation: {0}")]
    ProtocolViolation(String),
    #[error("edit-rejected: {0}")]
    EditRejected(EditError),
    #[error("session is {0:?}")]
    Closed(Status),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DialogState {
    pub session_id: String,
    pub scenario: Scenario,
    pub reference: Layout,
    pub canvas: Layout,
    pub transcript: Vec<Turn>,
    pub status: Status,
    pub round_count: usize,
}

impl DialogState {
    pub fn kind(&self) -> LayoutKind {
        self.reference.kind()
    }

    pub fn last_turn(&self) -> Option<&Turn> {
        self.transcript.last()
    }

    /// The act of the most recent designer turn.
    pub fn last_designer_act(&self) -> Option<DialogAct> {
        self.transcript.iter().rev().find(|t| t.role == Role::Designer).map(|t| t.act)
    }

    /// Folds `edits` over the current canvas.
    pub fn preview(&self, edits: &[EditOp]) -> Result<Layout, EditError> {
        edits
            .iter()
            .try_fold(self.canvas.clone(), |canvas, edit| apply_edit(&canvas, edit).map(|a| a.layout))
    }

    /// Builds the next turn for the awaited role, computing `canvas_after`.
    #[allow(clippy::too_many_arguments)]
    pub fn compose_turn(
        &self,
        role: Role,
        act: DialogAct,
        utterance: impl Into<String>,
        edits: Vec<EditOp>,
        author: impl Into<String>,
        origin: Origin,
        timestamp: u64,
    ) -> Result<Turn, DialogError> {
        let canvas_after = self.preview(&edits).map_err(DialogError::EditRejected)?;
        Ok(Turn {
            index: self.transcript.len(),
            role,
            act,
            utterance: utterance.into(),
            edits,
            canvas_after,
            author: author.into(),
            origin,
            timestamp,
        })
    }

    pub fn abandon(&self) -> DialogState {
        DialogState { status: Status::Abandoned, ..self.clone() }
    }
}

/// A fresh session: empty canvas, director to move.
pub fn new_session(session_id: impl Into<String>, reference: Layout) -> DialogState {
    DialogState {
        session_id: session_id.into(),
        scenario: reference.scenario(),
        canvas: reference.empty_like(),
        reference,
        transcript: Vec::new(),
        status: Status::AwaitingDirector,
        round_count: 0,
    }
}

/// Acts the awaited role may use next.
pub fn legal_acts(state: &DialogState) -> Result<BTreeSet<DialogAct>, DialogError> {
    let mut acts = BTreeSet::new();
    match state.status {
        Status::AwaitingDirector => {
            acts.insert(DialogAct::Instruct);
            let last_designer = state.last_designer_act();
            if last_designer.is_some() {
                acts.insert(DialogAct::SuggestFix);
            }
            if last_designer == Some(DialogAct::Question)
                && state.last_turn().is_some_and(|t| t.role == Role::Designer)
            {
                acts.insert(DialogAct::Answer);
            }
            let confirmable = match state.kind() {
                LayoutKind::Shape2d => exact_match(&state.canvas, &state.reference).unwrap_or(false),
                LayoutKind::Coco => true,
            };
            if confirmable {
                acts.insert(DialogAct::ConfirmDone);
            }
        }
        Status::AwaitingDesigner => acts.extend(DialogAct::DESIGNER),
        status => return Err(DialogError::Closed(status)),
    }
    Ok(acts)
}

/// Applies one turn, returning the next state.
pub fn append_turn(state: &DialogState, turn: Turn) -> Result<DialogState, DialogError> {
    let awaited = state.status.awaited_role();
    if awaited.is_none() {
        return Err(DialogError::Closed(state.status));
    }
    if awaited != Some(turn.role) {
        return Err(DialogError::OutOfTurn { expected: awaited, got: turn.role });
    }
    if turn.index != state.transcript.len() {
        return Err(DialogError::ProtocolViolation(format!(
            "turn index {} but transcript has {} turns",
            turn.index,
            state.transcript.len()
        )));
    }
    let legal = legal_acts(state)?;
    if !legal.contains(&turn.act) {
        return Err(DialogError::ProtocolViolation(format!("{:?} is not legal now; legal: {legal:?}", turn.act)));
    }
    if turn.act != DialogAct::Edit && !turn.edits.is_empty() {
        return Err(DialogError::ProtocolViolation(format!("{:?} turns carry no edits", turn.act)));
    }
    let canvas = state.preview(&turn.edits).map_err(DialogError::EditRejected)?;
    if canvas != turn.canvas_after {
        return Err(DialogError::ProtocolViolation("canvas_after does not match the folded edits".into()));
    }

    let status = if turn.act == DialogAct::ConfirmDone {
        Status::Completed
    } else {
        match turn.role {
            Role::Director => Status::AwaitingDesigner,
            Role::Designer => Status::AwaitingDirector,
        }
    };
    let round_count = state.round_count + usize::from(turn.act.opens_round());
    let mut transcript = state.transcript.clone();
    transcript.push(turn);
    Ok(DialogState {
        session_id: state.session_id.clone(),
        scenario: state.scenario,
        reference: state.reference.clone(),
        canvas,
        transcript,
        status,
        round_count,
    })
}

/// Current canvas/reference agreement: exact match for shapes, similarity for boxes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatchNow {
    Exact(bool),
    Similarity(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Termination {
    pub status: Status,
    pub match_now: MatchNow,
}

/// Reports status plus how well the canvas matches right now. Never completes
/// a session by itself: only a CONFIRM_DONE turn does that.
pub fn check_termination(state: &DialogState) -> Termination {
    let match_now = match state.kind() {
        LayoutKind::Shape2d => MatchNow::Exact(exact_match(&state.canvas, &state.reference).unwrap_or(false)),
        LayoutKind::Coco => MatchNow::Similarity(coco_similarity(&state.canvas, &state.reference).unwrap_or(0.0)),
    };
    Termination { status: state.status, match_now }
}

/// Splits a transcript into sub-dialogs, one per director INSTRUCT or
/// SUGGEST_FIX. Leading turns before any such act form their own segment.
pub fn segment_subdialogs(transcript: &[Turn]) -> Vec<Range<usize>> {
    let mut segments: Vec<Range<usize>> = Vec::new();
    for (i, turn) in transcript.iter().enumerate() {
        let opens = turn.role == Role::Director && turn.act.opens_round();
        match segments.last_mut() {
            Some(seg) if !opens => seg.end = i + 1,
            _ => segments.push(i..i + 1),
        }
    }
    segments
}
