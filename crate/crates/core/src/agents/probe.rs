//! Probes: instructions that cannot be executed as stated. A worker who
//! answers one with an edit instead of a clarification fails it.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::designer::{designer_lexicon, ground_instruction};
use super::AgentError;
use crate::dialog::DialogAct;
use crate::layout::{Cell, Color, Layout, LayoutKind, Shape, COCO_CATEGORY_NAMES, GRID_SIZE};
use crate::nlu::{normalize, Region};

/// Minimum probe pass rate for a worker to stay qualified.
pub const QUALIFY_PASS_RATE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    /// Refers to an object that is not on the canvas.
    Nonviable,
    /// Omits the location.
    Ambiguous,
    /// Gives the object two colors (or two classes).
    Contradictory,
}

impl ProbeKind {
    pub const ALL: [ProbeKind; 3] = [ProbeKind::Nonviable, ProbeKind::Ambiguous, ProbeKind::Contradictory];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub probe_id: String,
    pub kind: ProbeKind,
    pub utterance: String,
    /// Transcript index of the injected turn, set once it is appended.
    pub injected_at: Option<usize>,
}

fn random_cell(rng: &mut ChaCha8Rng) -> Cell {
    Cell::new(rng.gen_range(0..GRID_SIZE), rng.gen_range(0..GRID_SIZE)).unwrap()
}

fn shape_probe(canvas: &Layout, kind: ProbeKind, rng: &mut ChaCha8Rng) -> Option<String> {
    let shape = *Shape::ALL.choose(rng).unwrap();
    let color = *Color::ALL.choose(rng).unwrap();
    let cell = random_cell(rng);
    let (row, col) = (cell.row + 1, cell.col + 1);
    match kind {
        ProbeKind::Nonviable => {
            let present = canvas.shapes().unwrap_or_default();
            let absent: Vec<(Color, Shape)> = Color::ALL
                .iter()
                .flat_map(|c| Shape::ALL.iter().map(move |s| (*c, *s)))
                .filter(|(c, s)| !present.iter().any(|o| o.color == *c && o.shape == *s))
                .collect();
            let (c, s) = *absent.choose(rng)?;
            Some(format!("move the {c} {s} to row {row} column {col}"))
        }
        ProbeKind::Ambiguous => Some(format!("add a {color} {shape}")),
        ProbeKind::Contradictory => {
            let mut pair = Color::ALL.to_vec();
            pair.shuffle(rng);
            Some(format!("add a {} and {} {shape} at row {row} column {col}", pair[0], pair[1]))
        }
    }
}

fn box_probe(canvas: &Layout, kind: ProbeKind, rng: &mut ChaCha8Rng) -> Option<String> {
    let region = Region::ALL.choose(rng).unwrap().phrase();
    let class = *COCO_CATEGORY_NAMES.choose(rng).unwrap();
    match kind {
        ProbeKind::Nonviable => {
            let present = canvas.class_labels();
            let absent: Vec<&str> = COCO_CATEGORY_NAMES.iter().copied().filter(|c| !present.iter().any(|p| p == c)).collect();
            Some(format!("move the {} to the {region}", absent.choose(rng)?))
        }
        ProbeKind::Ambiguous => Some(format!("add a {class}")),
        ProbeKind::Contradictory => {
            let other = COCO_CATEGORY_NAMES.iter().copied().filter(|c| *c != class).collect::<Vec<_>>();
            Some(format!("add a {class} and {} at the {region}", other.choose(rng).unwrap()))
        }
    }
}

/// Builds a probe of `kind` for `canvas`. The result is checked against the
/// designer's grounding: it never resolves to an executable edit.
pub fn make_probe(canvas: &Layout, kind: ProbeKind, seed: u64) -> Result<Probe, AgentError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let utterance = match canvas.kind() {
        LayoutKind::Shape2d => shape_probe(canvas, kind, &mut rng),
        LayoutKind::Coco => box_probe(canvas, kind, &mut rng),
    }
    .ok_or(AgentError::ProbeUnavailable(kind))?;
    if ground_instruction(&utterance, canvas, &designer_lexicon()).is_executable() {
        return Err(AgentError::ProbeUnavailable(kind));
    }
    Ok(Probe { probe_id: format!("probe-{seed:016x}"), kind, utterance, injected_at: None })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeOutcome {
    Passed,
    Failed,
}

const OBJECTION_WORDS: [&str; 9] = ["cannot", "can't", "cant", "no", "not", "missing", "unclear", "which", "where"];

/// A probe is passed by asking for clarification, or by a non-edit reply that
/// objects to the instruction. Any edit fails it.
pub fn score_response(act: DialogAct, utterance: &str) -> ProbeOutcome {
    let objects = || normalize(utterance).iter().any(|t| OBJECTION_WORDS.contains(&t.as_str()));
    match act {
        DialogAct::Question => ProbeOutcome::Passed,
        DialogAct::Other if objects() => ProbeOutcome::Passed,
        _ => ProbeOutcome::Failed,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkerScore {
    pub worker_id: String,
    pub probes_seen: u32,
    pub probes_passed: u32,
    pub tasks_contributed: u32,
    pub flags: u32,
    pub qualified: bool,
}

impl WorkerScore {
    pub fn new(worker_id: impl Into<String>) -> Self {
        WorkerScore { worker_id: worker_id.into(), probes_seen: 0, probes_passed: 0, tasks_contributed: 0, flags: 0, qualified: true }
    }

    pub fn pass_rate(&self) -> Option<f64> {
        (self.probes_seen > 0).then(|| f64::from(self.probes_passed) / f64::from(self.probes_seen))
    }

    pub fn record_probe(&mut self, outcome: ProbeOutcome) {
        self.probes_seen += 1;
        if outcome == ProbeOutcome::Passed {
            self.probes_passed += 1;
        }
        self.qualified = self.pass_rate().is_none_or(|r| r >= QUALIFY_PASS_RATE);
    }
}
