//! Rule-based designer: executes instructions it can ground to exactly one
//! edit, asks a clarification question otherwise.

use serde::{Deserialize, Serialize};

use crate::dialog::{DialogAct, DialogState, Origin, Role, Turn};
use crate::layout::{apply_edit, BBox, Cell, CocoObject, Destination, EditOp, Layout, LayoutKind, ShapeObject, Target};
use crate::nlu::{extract_mentions, normalize, Lexicon, MentionSet, Region};

/// Side of the boxes the designer draws for region-level instructions.
const DRAWN_BOX: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verb {
    Add,
    Remove,
    Move,
}

/// Outcome of grounding an instruction against a canvas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "grounding", rename_all = "snake_case")]
pub enum Grounding {
    Executable { edits: Vec<EditOp> },
    NeedsLocation,
    NeedsTarget { noun: String },
    Unclear,
}

impl Grounding {
    pub fn is_executable(&self) -> bool {
        matches!(self, Grounding::Executable { .. })
    }
}

pub fn verb_of(tokens: &[String]) -> Option<Verb> {
    tokens.iter().find_map(|t| match t.as_str() {
        "add" | "put" | "place" | "draw" => Some(Verb::Add),
        "remove" | "delete" => Some(Verb::Remove),
        "move" => Some(Verb::Move),
        _ => None,
    })
}

fn noun(m: &MentionSet) -> String {
    m.shapes
        .first()
        .map(|s| s.to_string())
        .or_else(|| m.classes.first().cloned())
        .unwrap_or_else(|| "one".to_string())
}

/// Grounds an utterance to a single executable edit on `canvas`, if possible.
pub fn ground_instruction(utterance: &str, canvas: &Layout, lexicon: &Lexicon) -> Grounding {
    let tokens = normalize(utterance);
    let Some(verb) = verb_of(&tokens) else {
        return Grounding::Unclear;
    };
    let mentions = extract_mentions(&tokens, canvas.kind(), lexicon);
    let grounding = match canvas.kind() {
        LayoutKind::Shape2d => ground_shapes(verb, &mentions, canvas),
        LayoutKind::Coco => ground_boxes(verb, &mentions, canvas),
    };
    // Only a single edit that applies cleanly counts as executable.
    match grounding {
        Grounding::Executable { edits } => match apply_edit(canvas, &edits[0]) {
            Ok(applied) if !applied.target_missing && applied.layout != *canvas => Grounding::Executable { edits },
            _ => Grounding::NeedsTarget { noun: noun(&mentions) },
        },
        other => other,
    }
}

fn ground_shapes(verb: Verb, m: &MentionSet, canvas: &Layout) -> Grounding {
    let cells = m.cells();
    if m.colors.len() > 1 || m.shapes.len() > 1 {
        return Grounding::NeedsTarget { noun: noun(m) };
    }
    let matches = |o: &&ShapeObject, at: Option<Cell>| {
        m.colors.first().is_none_or(|c| *c == o.color)
            && m.shapes.first().is_none_or(|s| *s == o.shape)
            && at.is_none_or(|cell| cell == o.cell)
    };
    let candidates = |at: Option<Cell>| -> Vec<&ShapeObject> {
        canvas.shapes().unwrap_or_default().iter().filter(|o| matches(o, at)).collect()
    };
    match verb {
        Verb::Add => {
            if m.colors.len() != 1 || m.shapes.len() != 1 {
                return Grounding::NeedsTarget { noun: noun(m) };
            }
            if cells.len() != 1 {
                return Grounding::NeedsLocation;
            }
            let obj = ShapeObject::new(m.shapes[0], m.colors[0], cells[0]);
            Grounding::Executable { edits: vec![EditOp::add_shape(obj)] }
        }
        Verb::Remove => {
            if cells.len() > 1 {
                return Grounding::NeedsTarget { noun: noun(m) };
            }
            match candidates(cells.first().copied()).as_slice() {
                [one] => Grounding::Executable { edits: vec![EditOp::remove_cell(one.cell)] },
                _ => Grounding::NeedsTarget { noun: noun(m) },
            }
        }
        Verb::Move => {
            let (source, dest) = match cells.as_slice() {
                [dest] => (None, *dest),
                [src, dest] => (Some(*src), *dest),
                [] => return Grounding::NeedsLocation,
                _ => return Grounding::NeedsTarget { noun: noun(m) },
            };
            match candidates(source).as_slice() {
                [one] if one.cell != dest => Grounding::Executable { edits: vec![EditOp::move_cell(one.cell, dest)] },
                [_] => Grounding::NeedsLocation,
                _ => Grounding::NeedsTarget { noun: noun(m) },
            }
        }
    }
}

fn box_at_region(region: Region, w: f64, h: f64) -> (f64, f64) {
    let (cx, cy) = region.center();
    ((cx - w / 2.0).clamp(0.0, 1.0 - w), (cy - h / 2.0).clamp(0.0, 1.0 - h))
}

fn ground_boxes(verb: Verb, m: &MentionSet, canvas: &Layout) -> Grounding {
    if m.classes.len() != 1 {
        return Grounding::NeedsTarget { noun: noun(m) };
    }
    let class = &m.classes[0];
    let regions = m.regions();
    let candidates = |at: Option<Region>| -> Vec<&CocoObject> {
        canvas
            .boxes()
            .unwrap_or_default()
            .iter()
            .filter(|o| &o.class_label == class && at.is_none_or(|r| Region::of_box(&o.bbox) == r))
            .collect()
    };
    match verb {
        Verb::Add => {
            let [region] = regions.as_slice() else {
                return Grounding::NeedsLocation;
            };
            let (x, y) = box_at_region(*region, DRAWN_BOX, DRAWN_BOX);
            let id = canvas.boxes().unwrap_or_default().iter().map(|o| o.id).max().unwrap_or(0) + 1;
            let obj = CocoObject::new(id, class.clone(), BBox::new(x, y, DRAWN_BOX, DRAWN_BOX));
            Grounding::Executable { edits: vec![EditOp::add_box(obj)] }
        }
        Verb::Remove => {
            if regions.len() > 1 {
                return Grounding::NeedsTarget { noun: class.clone() };
            }
            match candidates(regions.first().copied()).as_slice() {
                [one] => Grounding::Executable { edits: vec![EditOp::Remove { target: Target::Object { id: one.id } }] },
                _ => Grounding::NeedsTarget { noun: class.clone() },
            }
        }
        Verb::Move => {
            let (source, dest) = match regions.as_slice() {
                [dest] => (None, *dest),
                [src, dest] => (Some(*src), *dest),
                [] => return Grounding::NeedsLocation,
                _ => return Grounding::NeedsTarget { noun: class.clone() },
            };
            match candidates(source).as_slice() {
                [one] => {
                    let (x, y) = box_at_region(dest, one.bbox.w, one.bbox.h);
                    let to = Destination::Point { x, y };
                    Grounding::Executable { edits: vec![EditOp::Move { target: Target::Object { id: one.id }, to }] }
                }
                _ => Grounding::NeedsTarget { noun: class.clone() },
            }
        }
    }
}

/// What the designer submits: an act, an utterance and the edits it made.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignerMove {
    pub act: DialogAct,
    pub utterance: String,
    pub edits: Vec<EditOp>,
    pub canvas: Layout,
}

const WHERE_QUESTIONS: [&str; 2] = ["where exactly?", "where should it go?"];

/// Responds to the latest director utterance using only what a designer sees.
pub fn respond(instruction: &str, canvas: &Layout, seed: u64, lexicon: &Lexicon) -> DesignerMove {
    let question = |utterance: String| DesignerMove {
        act: DialogAct::Question,
        utterance,
        edits: Vec::new(),
        canvas: canvas.clone(),
    };
    match ground_instruction(instruction, canvas, lexicon) {
        Grounding::Executable { edits } => {
            let after = edits
                .iter()
                .try_fold(canvas.clone(), |c, e| apply_edit(&c, e).map(|a| a.layout))
                .expect("grounded edits apply");
            DesignerMove { act: DialogAct::Edit, utterance: String::new(), edits, canvas: after }
        }
        Grounding::NeedsLocation => question(WHERE_QUESTIONS[(seed % 2) as usize].to_string()),
        Grounding::NeedsTarget { noun } => question(format!("which {noun}?")),
        Grounding::Unclear => question("what should I do?".to_string()),
    }
}

/// Designer lexicon: default colors and shapes plus the COCO category names.
pub fn designer_lexicon() -> Lexicon {
    Lexicon::default().with_classes(&crate::layout::COCO_CATEGORY_NAMES)
}

/// Builds the designer's next turn from the session's visible parts (the
/// transcript and canvas; never the reference).
pub fn designer_policy(state: &DialogState, seed: u64) -> Turn {
    let instruction = state
        .transcript
        .iter()
        .rev()
        .find(|t| t.role == Role::Director)
        .map(|t| t.utterance.as_str())
        .unwrap_or_default();
    let mv = respond(instruction, &state.canvas, seed, &designer_lexicon());
    let timestamp = state.last_turn().map_or(0, |t| t.timestamp);
    Turn {
        index: state.transcript.len(),
        role: Role::Designer,
        act: mv.act,
        utterance: mv.utterance,
        edits: mv.edits,
        canvas_after: mv.canvas,
        author: "designer-policy".to_string(),
        origin: Origin::Synthetic,
        timestamp,
    }
}
