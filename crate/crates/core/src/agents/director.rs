//! Template director: one difference per instruction.

use serde::{Deserialize, Serialize};

use super::templates::{TemplateCatalog, TemplateKey};
use super::AgentError;
use crate::layout::{
    diff_canvases, BBox, Cell, CocoObject, Destination, EditOp, Layout, LayoutKind, NewObject, ShapeObject, Target,
};
use crate::nlu::Region;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instruction {
    pub utterance: String,
    pub gold_edits: Vec<EditOp>,
}

fn cell_values(prefix: &str, cell: Cell) -> [(String, String); 2] {
    [
        (format!("{prefix}row"), (cell.row + 1).to_string()),
        (format!("{prefix}col"), (cell.col + 1).to_string()),
    ]
}

fn render(catalog: &TemplateCatalog, key: TemplateKey, seed: u64, values: Vec<(String, String)>) -> Result<String, AgentError> {
    let pairs: Vec<(&str, String)> = values.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
    Ok(catalog.render(key, seed, &pairs)?)
}

fn attrs(obj: &ShapeObject) -> Vec<(String, String)> {
    vec![("color".into(), obj.color.to_string()), ("shape".into(), obj.shape.to_string())]
}

/// Produces the next instruction toward `reference` and the edits that
/// execute it.
///
/// Shape layouts: the first cell (row-major) where canvas and reference
/// disagree decides the instruction: a move when the needed object can be
/// relocated, otherwise an add or a remove. Box layouts are compared at the
/// granularity the templates can express: same class in the same 3x3 region.
pub fn next_instruction(
    reference: &Layout,
    canvas: &Layout,
    seed: u64,
    catalog: &TemplateCatalog,
) -> Result<Instruction, AgentError> {
    if reference.kind() != canvas.kind() {
        return Err(AgentError::KindMismatch);
    }
    match reference.kind() {
        LayoutKind::Shape2d => next_shape_instruction(reference, canvas, seed, catalog),
        LayoutKind::Coco => next_box_instruction(reference, canvas, seed, catalog),
    }
}

fn next_shape_instruction(
    reference: &Layout,
    canvas: &Layout,
    seed: u64,
    catalog: &TemplateCatalog,
) -> Result<Instruction, AgentError> {
    let first = Cell::all()
        .find(|c| reference.object_at(*c) != canvas.object_at(*c))
        .ok_or(AgentError::NothingToInstruct)?;
    let ops = diff_canvases(canvas, reference);
    let lands_on = |op: &EditOp| match op {
        EditOp::Add { object: NewObject::Shape(o) } => o.cell == first,
        EditOp::Move { to: Destination::Cell(d), .. } => *d == first,
        _ => false,
    };
    let leaves = |op: &EditOp| match op {
        EditOp::Move { target: Target::Cell(s), .. } | EditOp::Remove { target: Target::Cell(s) } => *s == first,
        _ => false,
    };
    let op = ops
        .iter()
        .find(|op| lands_on(op))
        .or_else(|| ops.iter().find(|op| leaves(op)))
        .cloned()
        .expect("a differing cell is touched by the diff");

    let utterance = match &op {
        EditOp::Add { object: NewObject::Shape(o) } => {
            let mut v = attrs(o);
            v.extend(cell_values("", o.cell));
            render(catalog, TemplateKey::Add, seed, v)?
        }
        EditOp::Remove { target: Target::Cell(c) } => {
            let o = canvas.object_at(*c).expect("remove targets an occupied cell");
            let mut v = attrs(o);
            v.extend(cell_values("", *c));
            render(catalog, TemplateKey::Remove, seed, v)?
        }
        EditOp::Move { target: Target::Cell(s), to: Destination::Cell(d) } => {
            let o = canvas.object_at(*s).expect("move source is occupied");
            let mut v = attrs(o);
            v.extend(cell_values("", *s));
            v.extend(cell_values("to_", *d));
            render(catalog, TemplateKey::Move, seed, v)?
        }
        other => unreachable!("shape diff produced {other:?}"),
    };
    Ok(Instruction { utterance, gold_edits: vec![op] })
}

/// Region-level pairing of reference and canvas boxes. Returns the reference
/// objects without a same-class, same-region counterpart and the unmatched
/// canvas objects, both in id order.
pub fn unmatched_boxes<'a>(reference: &'a Layout, canvas: &'a Layout) -> (Vec<&'a CocoObject>, Vec<&'a CocoObject>) {
    let mut free: Vec<&CocoObject> = canvas.boxes().unwrap_or_default().iter().collect();
    let mut missing = Vec::new();
    for r in reference.boxes().unwrap_or_default() {
        let region = Region::of_box(&r.bbox);
        match free.iter().position(|c| c.class_label == r.class_label && Region::of_box(&c.bbox) == region) {
            Some(i) => {
                free.remove(i);
            }
            None => missing.push(r),
        }
    }
    (missing, free)
}

fn next_box_instruction(
    reference: &Layout,
    canvas: &Layout,
    seed: u64,
    catalog: &TemplateCatalog,
) -> Result<Instruction, AgentError> {
    let (missing, surplus) = unmatched_boxes(reference, canvas);
    let region_rank = |b: &BBox| Region::ALL.iter().position(|r| *r == Region::of_box(b)).unwrap();
    let first_missing = missing.iter().min_by_key(|o| (region_rank(&o.bbox), o.id));
    let first_surplus = surplus.iter().min_by_key(|o| (region_rank(&o.bbox), o.id));

    let class = |o: &CocoObject| ("class".to_string(), o.class_label.clone());
    let region = |key: &str, b: &BBox| (key.to_string(), Region::of_box(b).phrase().to_string());

    let take_missing = match (first_missing, first_surplus) {
        (Some(m), Some(s)) => region_rank(&m.bbox) <= region_rank(&s.bbox),
        (Some(_), None) => true,
        (None, Some(_)) => false,
        (None, None) => return Err(AgentError::NothingToInstruct),
    };

    if take_missing {
        let target = first_missing.unwrap();
        // Relocate a same-class surplus box when one exists.
        if let Some(src) = surplus.iter().find(|s| s.class_label == target.class_label) {
            let to = Destination::Point { x: target.bbox.x, y: target.bbox.y };
            let mut ops = vec![EditOp::Move { target: Target::Object { id: src.id }, to }];
            if src.bbox.w != target.bbox.w || src.bbox.h != target.bbox.h {
                ops = vec![EditOp::Resize { id: src.id, bbox: target.bbox }];
            }
            let utterance = render(
                catalog,
                TemplateKey::CocoMove,
                seed,
                vec![class(src), region("region", &src.bbox), region("to_region", &target.bbox)],
            )?;
            return Ok(Instruction { utterance, gold_edits: ops });
        }
        let next_id = canvas.boxes().unwrap_or_default().iter().map(|o| o.id).max().unwrap_or(0) + 1;
        let mut obj = (*target).clone();
        obj.id = next_id;
        obj.name = None;
        let utterance = render(catalog, TemplateKey::CocoAdd, seed, vec![class(target), region("region", &target.bbox)])?;
        return Ok(Instruction { utterance, gold_edits: vec![EditOp::add_box(obj)] });
    }

    let s = first_surplus.unwrap();
    let utterance = render(catalog, TemplateKey::CocoRemove, seed, vec![class(s), region("region", &s.bbox)])?;
    Ok(Instruction { utterance, gold_edits: vec![EditOp::Remove { target: Target::Object { id: s.id } }] })
}
