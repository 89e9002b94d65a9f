use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{BBox, Cell, CocoObject, Layout, LayoutError, LayoutKind, ShapeObject};

/// An atomic canvas mutation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum EditOp {
    Add { object: NewObject },
    Remove { target: Target },
    Move { target: Target, to: Destination },
    Resize { id: u32, bbox: BBox },
    Rename { id: u32, name: Option<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NewObject {
    Shape(ShapeObject),
    Coco(CocoObject),
}

/// Which object an edit addresses: a cell on shape grids, an id on box canvases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Target {
    Cell(Cell),
    Object { id: u32 },
}

/// Where a move sends its target. Box moves keep the box size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Destination {
    Cell(Cell),
    Point { x: f64, y: f64 },
}

impl EditOp {
    pub fn add_shape(object: ShapeObject) -> EditOp {
        EditOp::Add { object: NewObject::Shape(object) }
    }

    pub fn add_box(object: CocoObject) -> EditOp {
        EditOp::Add { object: NewObject::Coco(object) }
    }

    pub fn remove_cell(cell: Cell) -> EditOp {
        EditOp::Remove { target: Target::Cell(cell) }
    }

    pub fn move_cell(from: Cell, to: Cell) -> EditOp {
        EditOp::Move { target: Target::Cell(from), to: Destination::Cell(to) }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EditOp::Add { .. } => "add",
            EditOp::Remove { .. } => "remove",
            EditOp::Move { .. } => "move",
            EditOp::Resize { .. } => "resize",
            EditOp::Rename { .. } => "rename",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EditError {
    #[error("`{op}` cannot be applied to a {kind} canvas")]
    KindMismatch { op: &'static str, kind: LayoutKind },
    #[error("destination {0} is outside the grid")]
    OutOfBounds(Cell),
    #[error("destination box rejected: {0}")]
    BoxOutOfBounds(String),
    #[error(transparent)]
    Invalid(#[from] LayoutError),
}

/// Result of applying an edit. `target_missing` marks a remove/move/resize/rename
/// whose target did not exist; the layout is then unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct Applied {
    pub layout: Layout,
    pub target_missing: bool,
}

impl Applied {
    fn changed(layout: Layout) -> Self {
        Applied { layout, target_missing: false }
    }

    fn missing(layout: &Layout) -> Self {
        Applied { layout: layout.clone(), target_missing: true }
    }
}

/// Applies one edit, returning a new canvas.
pub fn apply_edit(canvas: &Layout, edit: &EditOp) -> Result<Applied, EditError> {
    match canvas.kind() {
        LayoutKind::Shape2d => apply_shape_edit(canvas, edit),
        LayoutKind::Coco => apply_box_edit(canvas, edit),
    }
}

fn mismatch(edit: &EditOp, kind: LayoutKind) -> EditError {
    EditError::KindMismatch { op: edit.name(), kind }
}

fn apply_shape_edit(canvas: &Layout, edit: &EditOp) -> Result<Applied, EditError> {
    let kind = LayoutKind::Shape2d;
    let mut grid = canvas.shape_map();
    match edit {
        EditOp::Add { object: NewObject::Shape(obj) } => {
            if !obj.cell.in_bounds() {
                return Err(EditError::OutOfBounds(obj.cell));
            }
            grid.insert(obj.cell, *obj);
        }
        EditOp::Remove { target: Target::Cell(cell) } => {
            if grid.remove(cell).is_none() {
                return Ok(Applied::missing(canvas));
            }
        }
        EditOp::Move { target: Target::Cell(from), to: Destination::Cell(to) } => {
            if !to.in_bounds() {
                return Err(EditError::OutOfBounds(*to));
            }
            let Some(mut obj) = grid.remove(from) else {
                return Ok(Applied::missing(canvas));
            };
            obj.cell = *to;
            grid.insert(*to, obj);
        }
        _ => return Err(mismatch(edit, kind)),
    }
    let layout = Layout::shape2d(canvas.scenario(), grid.into_values().collect())?;
    Ok(Applied::changed(layout))
}

fn apply_box_edit(canvas: &Layout, edit: &EditOp) -> Result<Applied, EditError> {
    let kind = LayoutKind::Coco;
    let mut boxes: Vec<CocoObject> = canvas.boxes().unwrap_or_default().to_vec();
    let find = |boxes: &[CocoObject], id: u32| boxes.iter().position(|o| o.id == id);
    match edit {
        EditOp::Add { object: NewObject::Coco(obj) } => {
            boxes.push(obj.clone());
        }
        EditOp::Remove { target: Target::Object { id } } => match find(&boxes, *id) {
            Some(i) => {
                boxes.remove(i);
            }
            None => return Ok(Applied::missing(canvas)),
        },
        EditOp::Move { target: Target::Object { id }, to: Destination::Point { x, y } } => {
            let Some(i) = find(&boxes, *id) else {
                return Ok(Applied::missing(canvas));
            };
            let moved = BBox { x: *x, y: *y, ..boxes[i].bbox };
            moved.check().map_err(EditError::BoxOutOfBounds)?;
            boxes[i].bbox = moved;
        }
        EditOp::Resize { id, bbox } => {
            let Some(i) = find(&boxes, *id) else {
                return Ok(Applied::missing(canvas));
            };
            bbox.check().map_err(EditError::BoxOutOfBounds)?;
            boxes[i].bbox = *bbox;
        }
        EditOp::Rename { id, name } => {
            let Some(i) = find(&boxes, *id) else {
                return Ok(Applied::missing(canvas));
            };
            boxes[i].name = name.clone();
        }
        _ => return Err(mismatch(edit, kind)),
    }
    let layout = Layout::coco(canvas.scenario(), boxes)?;
    Ok(Applied::changed(layout))
}

/// Computes an edit list that turns `prev` into `next` when folded with
/// [`apply_edit`]. Returns an empty list when the kinds differ.
pub fn diff_canvases(prev: &Layout, next: &Layout) -> Vec<EditOp> {
    match (prev.kind(), next.kind()) {
        (LayoutKind::Shape2d, LayoutKind::Shape2d) => diff_shapes(prev, next),
        (LayoutKind::Coco, LayoutKind::Coco) => diff_boxes(prev, next),
        _ => Vec::new(),
    }
}

fn diff_shapes(prev: &Layout, next: &Layout) -> Vec<EditOp> {
    let before = prev.shape_map();
    let after = next.shape_map();
    let removed: Vec<ShapeObject> = before.values().filter(|o| after.get(&o.cell) != Some(o)).copied().collect();
    let added: Vec<ShapeObject> = after.values().filter(|o| before.get(&o.cell) != Some(o)).copied().collect();

    // Pair each removed object (row-major) with the first unpaired added object
    // of the same shape and color.
    let mut paired_added = BTreeSet::new();
    let mut moves: Vec<(Cell, Cell)> = Vec::new();
    let mut pure_removed = Vec::new();
    for r in &removed {
        let partner = added
            .iter()
            .find(|a| !paired_added.contains(&a.cell) && a.shape == r.shape && a.color == r.color);
        match partner {
            Some(a) => {
                paired_added.insert(a.cell);
                moves.push((r.cell, a.cell));
            }
            None => pure_removed.push(r.cell),
        }
    }
    let mut pure_added: Vec<ShapeObject> = added.iter().filter(|a| !paired_added.contains(&a.cell)).copied().collect();

    // A cell that receives an object does not need an explicit remove first.
    let destinations: BTreeSet<Cell> = added.iter().map(|a| a.cell).collect();
    let mut ops: Vec<EditOp> = pure_removed
        .iter()
        .filter(|c| !destinations.contains(c))
        .map(|c| EditOp::remove_cell(*c))
        .collect();

    // Emit moves whose destination no longer holds a pending move source.
    // A cycle is broken by dropping one move: its source gets overwritten by
    // the move into it and its object is re-added at the end.
    let mut pending = moves;
    while !pending.is_empty() {
        let sources: BTreeSet<Cell> = pending.iter().map(|(s, _)| *s).collect();
        match pending.iter().position(|(_, d)| !sources.contains(d)) {
            Some(i) => {
                let (s, d) = pending.remove(i);
                ops.push(EditOp::move_cell(s, d));
            }
            None => {
                let targets: BTreeSet<Cell> = pending.iter().map(|(_, d)| *d).collect();
                let i = pending.iter().position(|(s, _)| targets.contains(s)).expect("blocked moves form a cycle");
                let (_, d) = pending.remove(i);
                pure_added.push(after[&d]);
            }
        }
    }

    pure_added.sort_by_key(|o| o.cell);
    ops.extend(pure_added.into_iter().map(EditOp::add_shape));
    ops
}

fn diff_boxes(prev: &Layout, next: &Layout) -> Vec<EditOp> {
    let before: BTreeMap<u32, &CocoObject> = prev.boxes().unwrap_or_default().iter().map(|o| (o.id, o)).collect();
    let after: BTreeMap<u32, &CocoObject> = next.boxes().unwrap_or_default().iter().map(|o| (o.id, o)).collect();
    let mut removals = Vec::new();
    let mut updates = Vec::new();
    let mut additions = Vec::new();

    for (id, old) in &before {
        match after.get(id) {
            None => removals.push(EditOp::Remove { target: Target::Object { id: *id } }),
            Some(new) if new.class_label != old.class_label => {
                removals.push(EditOp::Remove { target: Target::Object { id: *id } });
                additions.push(EditOp::add_box((*new).clone()));
            }
            Some(new) => {
                if new.bbox != old.bbox {
                    if new.bbox.w == old.bbox.w && new.bbox.h == old.bbox.h {
                        updates.push(EditOp::Move {
                            target: Target::Object { id: *id },
                            to: Destination::Point { x: new.bbox.x, y: new.bbox.y },
                        });
                    } else {
                        updates.push(EditOp::Resize { id: *id, bbox: new.bbox });
                    }
                }
                if new.name != old.name {
                    updates.push(EditOp::Rename { id: *id, name: new.name.clone() });
                }
            }
        }
    }
    for (id, new) in &after {
        if !before.contains_key(id) {
            additions.push(EditOp::add_box((*new).clone()));
        }
    }
    removals.into_iter().chain(updates).chain(additions).collect()
}
