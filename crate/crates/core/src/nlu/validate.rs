use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{classify_dialog_act, extract_mentions, normalize, Lexicon, MentionSet, Region};
use crate::agents::{score_response, Probe, ProbeOutcome};
use crate::dialog::{append_turn, DialogAct, DialogState, Origin, Role, Turn};
use crate::layout::{diff_canvases, EditOp, Layout, LayoutKind};

/// A worker's submission before it becomes a turn. `act` may be omitted and
/// is then derived; `canvas` is the designer's proposed canvas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Proposal {
    pub role: Role,
    pub act: Option<DialogAct>,
    pub utterance: String,
    pub canvas: Option<Layout>,
    pub author: String,
    pub origin: Origin,
    pub timestamp: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Accepted,
    /// Appended, but marked for review.
    Flagged,
    Rejected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationResult {
    pub verdict: Verdict,
    pub derived_edits: Vec<EditOp>,
    pub derived_act: Option<DialogAct>,
    pub probe_outcome: Option<ProbeOutcome>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Validated {
    pub result: ValidationResult,
    /// The turn to append; `None` when rejected.
    pub turn: Option<Turn>,
}

#[derive(Default)]
struct Attributes {
    words: BTreeSet<String>,
}

impl Attributes {
    fn from_mentions(m: &MentionSet) -> Self {
        let mut words = BTreeSet::new();
        words.extend(m.colors.iter().map(|c| format!("color:{c}")));
        words.extend(m.shapes.iter().map(|s| format!("shape:{s}")));
        words.extend(m.classes.iter().map(|c| format!("class:{c}")));
        words.extend(m.cells().iter().map(|c| format!("cell:{}:{}", c.row, c.col)));
        words.extend(m.regions().iter().map(|r| format!("region:{r:?}")));
        Attributes { words }
    }

    /// Attributes of every object that differs between two canvases.
    fn of_change(before: &Layout, after: &Layout) -> Self {
        let mut words = BTreeSet::new();
        match before.kind() {
            LayoutKind::Shape2d => {
                for cell in crate::layout::Cell::all() {
                    let (a, b) = (before.object_at(cell), after.object_at(cell));
                    if a == b {
                        continue;
                    }
                    words.insert(format!("cell:{}:{}", cell.row, cell.col));
                    for o in a.into_iter().chain(b) {
                        words.insert(format!("color:{}", o.color));
                        words.insert(format!("shape:{}", o.shape));
                    }
                }
            }
            LayoutKind::Coco => {
                let ids: BTreeSet<u32> = before.boxes().unwrap_or_default().iter().chain(after.boxes().unwrap_or_default()).map(|o| o.id).collect();
                for id in ids {
                    let (a, b) = (before.object_by_id(id), after.object_by_id(id));
                    if a == b {
                        continue;
                    }
                    for o in a.into_iter().chain(b) {
                        words.insert(format!("class:{}", o.class_label));
                        words.insert(format!("region:{:?}", Region::of_box(&o.bbox)));
                    }
                }
            }
        }
        Attributes { words }
    }
}

fn rejected(notes: Vec<String>, derived_edits: Vec<EditOp>, derived_act: Option<DialogAct>) -> Validated {
    Validated {
        result: ValidationResult { verdict: Verdict::Rejected, derived_edits, derived_act, probe_outcome: None, notes },
        turn: None,
    }
}

/// Checks a submission against the session and turns it into a transcript
/// turn. Designer edits are derived by diffing the proposed canvas against
/// the current one. Structural problems reject the submission; a failed
/// probe or an edit unrelated to the last instruction flags it.
pub fn validate_submission(state: &DialogState, proposal: &Proposal, probe: Option<&Probe>, lexicon: &Lexicon) -> Validated {
    let tokens = normalize(&proposal.utterance);
    let derived_edits = match (proposal.role, &proposal.canvas) {
        (_, None) => Vec::new(),
        (_, Some(c)) if c.kind() != state.kind() => {
            return rejected(vec![format!("canvas kind {:?} does not match session", c.kind())], vec![], None)
        }
        (Role::Director, Some(c)) if *c != state.canvas => {
            return rejected(vec!["directors cannot edit the canvas".into()], vec![], None)
        }
        (_, Some(c)) => diff_canvases(&state.canvas, c),
    };
    let derived_act = if proposal.role == Role::Designer && !derived_edits.is_empty() {
        DialogAct::Edit
    } else {
        classify_dialog_act(&tokens, proposal.role)
    };
    let mut notes = Vec::new();
    let act = match proposal.act {
        Some(act) => {
            if act != derived_act {
                notes.push(format!("declared {act:?}, analyzer derived {derived_act:?}"));
            }
            act
        }
        None => derived_act,
    };
    if act != DialogAct::Edit && !derived_edits.is_empty() {
        notes.push(format!("{act:?} turn changes the canvas"));
        return rejected(notes, derived_edits, Some(derived_act));
    }
    let turn = match state.compose_turn(
        proposal.role,
        act,
        proposal.utterance.clone(),
        derived_edits.clone(),
        proposal.author.clone(),
        proposal.origin,
        proposal.timestamp,
    ) {
        Ok(t) => t,
        Err(e) => {
            notes.push(e.to_string());
            return rejected(notes, derived_edits, Some(derived_act));
        }
    };
    if let Err(e) = append_turn(state, turn.clone()) {
        notes.push(e.to_string());
        return rejected(notes, derived_edits, Some(derived_act));
    }

    let mut verdict = Verdict::Accepted;
    let probe_outcome = match probe {
        Some(p) if proposal.role == Role::Designer => {
            let outcome = score_response(act, &proposal.utterance);
            if outcome == ProbeOutcome::Failed {
                verdict = Verdict::Flagged;
                notes.push(format!("failed probe {}", p.probe_id));
            }
            Some(outcome)
        }
        _ => None,
    };
    if proposal.role == Role::Designer && act == DialogAct::Edit {
        let instruction = state.transcript.iter().rev().find(|t| t.role == Role::Director);
        if let Some(instruction) = instruction {
            let asked = Attributes::from_mentions(&extract_mentions(&normalize(&instruction.utterance), state.kind(), lexicon));
            let done = Attributes::of_change(&state.canvas, &turn.canvas_after);
            if !asked.words.is_empty() && asked.words.is_disjoint(&done.words) {
                verdict = Verdict::Flagged;
                notes.push("edit shares no attribute with the instruction".into());
            }
        }
    }
    Validated {
        result: ValidationResult { verdict, derived_edits, derived_act: Some(derived_act), probe_outcome, notes },
        turn: Some(turn),
    }
}
