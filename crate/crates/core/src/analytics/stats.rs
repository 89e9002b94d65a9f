use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::AnalyticsError;
use crate::dialog::{DialogAct, Origin, Role, Turn};
use crate::dispatch::ExportRecord;
use crate::layout::{Cell, Destination, EditOp, Layout, LayoutKind, NewObject, Scenario, Target};
use crate::nlu::{extract_mentions, normalize, Lexicon};

/// Director INSTRUCT and SUGGEST_FIX turns written by workers (injected
/// probes are not instructions).
pub fn instruction_turns(turns: &[Turn]) -> impl Iterator<Item = &Turn> {
    turns
        .iter()
        .filter(|t| t.role == Role::Director && t.act.opens_round() && t.origin == Origin::Human)
}

/// Words in an instruction: normalized tokens other than punctuation.
pub fn word_count(utterance: &str) -> usize {
    normalize(utterance).iter().filter(|t| t.chars().any(char::is_alphanumeric)).count()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DurationStats {
    pub scenario: Scenario,
    pub sessions: usize,
    pub instructions: usize,
    pub mean_rounds: f64,
    pub mean_words: f64,
    /// Population standard deviation over instructions.
    pub std_words: f64,
}

/// Mean rounds per session and words per instruction, by scenario.
pub fn duration_stats(records: &[ExportRecord]) -> Result<BTreeMap<Scenario, DurationStats>, AnalyticsError> {
    if records.is_empty() {
        return Err(AnalyticsError::Empty("transcripts"));
    }
    let mut by_scenario: BTreeMap<Scenario, Vec<&ExportRecord>> = BTreeMap::new();
    for r in records {
        by_scenario.entry(r.scenario).or_default().push(r);
    }
    let mut out = BTreeMap::new();
    for (scenario, group) in by_scenario {
        let rounds: Vec<usize> = group.iter().map(|r| instruction_turns(&r.turns).count()).collect();
        let words: Vec<u64> =
            group.iter().flat_map(|r| instruction_turns(&r.turns).map(|t| word_count(&t.utterance) as u64)).collect();
        // Integer moments keep the result independent of session order.
        let (n, sum, sum_sq) = (words.len() as u64, words.iter().sum::<u64>(), words.iter().map(|w| w * w).sum::<u64>());
        let (mean_words, std_words) = if n == 0 {
            (0.0, 0.0)
        } else {
            let variance = (n * sum_sq - sum * sum) as f64 / (n * n) as f64;
            (sum as f64 / n as f64, variance.sqrt())
        };
        out.insert(
            scenario,
            DurationStats {
                scenario,
                sessions: group.len(),
                instructions: words.len(),
                mean_rounds: rounds.iter().sum::<usize>() as f64 / group.len() as f64,
                mean_words,
                std_words,
            },
        );
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordUsage {
    pub instructions: usize,
    pub location: f64,
    pub color: f64,
    pub shape: f64,
}

/// Fractions of shape-grid instructions that mention a location, a color
/// and a shape. Box sessions are skipped.
pub fn word_usage(records: &[ExportRecord], lexicon: &Lexicon) -> Result<WordUsage, AnalyticsError> {
    let mut counts = [0usize; 3];
    let mut n = 0usize;
    for r in records.iter().filter(|r| r.scenario.kind() == LayoutKind::Shape2d) {
        for t in instruction_turns(&r.turns) {
            let m = extract_mentions(&normalize(&t.utterance), LayoutKind::Shape2d, lexicon);
            n += 1;
            counts[0] += usize::from(!m.locations.is_empty());
            counts[1] += usize::from(!m.colors.is_empty());
            counts[2] += usize::from(!m.shapes.is_empty());
        }
    }
    if n == 0 {
        return Err(AnalyticsError::Empty("shape-grid instructions"));
    }
    let frac = |c: usize| c as f64 / n as f64;
    Ok(WordUsage { instructions: n, location: frac(counts[0]), color: frac(counts[1]), shape: frac(counts[2]) })
}

/// Distinct objects an edit list touches when applied to `before`. An object
/// keeps its identity across moves; an occupant replaced by an add or a move
/// counts as touched.
pub fn objects_touched(before: &Layout, edits: &[EditOp]) -> usize {
    let mut at_cell: BTreeMap<Cell, String> =
        before.shapes().unwrap_or_default().iter().map(|o| (o.cell, format!("old:{}", o.cell))).collect();
    let mut touched = BTreeSet::new();
    for (i, op) in edits.iter().enumerate() {
        match op {
            EditOp::Add { object: NewObject::Shape(o) } => {
                let new = format!("new:{i}");
                touched.extend(at_cell.insert(o.cell, new.clone()));
                touched.insert(new);
            }
            EditOp::Remove { target: Target::Cell(c) } => touched.extend(at_cell.remove(c)),
            EditOp::Move { target: Target::Cell(from), to: Destination::Cell(to) } => {
                if let Some(id) = at_cell.remove(from) {
                    touched.insert(id.clone());
                    touched.extend(at_cell.insert(*to, id));
                }
            }
            EditOp::Add { object: NewObject::Coco(o) } => {
                touched.insert(format!("id:{}", o.id));
            }
            EditOp::Remove { target: Target::Object { id } }
            | EditOp::Move { target: Target::Object { id }, .. }
            | EditOp::Resize { id, .. }
            | EditOp::Rename { id, .. } => {
                touched.insert(format!("id:{id}"));
            }
            // A cell moved to a point never applies.
            EditOp::Move { .. } => {}
        }
    }
    touched.len()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Efficiency {
    pub edit_turns: usize,
    /// Objects touched -> number of EDIT turns.
    pub histogram: BTreeMap<usize, usize>,
    pub p_more_than_three: f64,
}

/// Objects modified per designer EDIT turn.
pub fn instruction_efficiency(records: &[ExportRecord]) -> Efficiency {
    let mut histogram = BTreeMap::new();
    let mut edit_turns = 0;
    for r in records {
        let mut canvas = r.reference.empty_like();
        for t in &r.turns {
            if t.role == Role::Designer && t.act == DialogAct::Edit {
                edit_turns += 1;
                *histogram.entry(objects_touched(&canvas, &t.edits)).or_insert(0) += 1;
            }
            canvas = t.canvas_after.clone();
        }
    }
    let over: usize = histogram.range(4..).map(|(_, n)| n).sum();
    let p_more_than_three = if edit_turns == 0 { 0.0 } else { over as f64 / edit_turns as f64 };
    Efficiency { edit_turns, histogram, p_more_than_three }
}
