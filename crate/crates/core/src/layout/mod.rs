//! Layouts, canvases and the edit operations that transform them.
//!
//! A [`Layout`] is either a 5x5 grid of colored shapes (`shape2d`) or a set of
//! class-labeled boxes on a normalized canvas (`coco`). The hidden reference a
//! director sees and the canvas a designer edits share this representation.
//!
//! Objects are kept in canonical order (row-major cell order for shapes,
//! ascending id for boxes) so that structural equality of two layouts is set
//! equality of their objects.

mod coco;
mod compare;
mod edit;
mod generate;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use coco::{ingest_coco_annotations, COCO_CATEGORY_NAMES, IngestError, IngestReport, IngestedLayout};
pub use compare::{coco_similarity, exact_match, iou, CompareError};
pub use edit::{apply_edit, diff_canvases, Applied, Destination, EditError, EditOp, NewObject, Target};
pub use generate::{generate_pattern_shape_layout, generate_random_shape_layout, PatternRules};

/// Side length of the shape grid.
pub const GRID_SIZE: u8 = 5;
/// Number of cells on the shape grid.
pub const GRID_CELLS: usize = (GRID_SIZE as usize) * (GRID_SIZE as usize);

const BOX_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Circle,
    Square,
    Triangle,
}

impl Shape {
    pub const ALL: [Shape; 3] = [Shape::Circle, Shape::Square, Shape::Triangle];

    pub fn as_str(self) -> &'static str {
        match self {
            Shape::Circle => "circle",
            Shape::Square => "square",
            Shape::Triangle => "triangle",
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Blue,
    Red,
    Green,
}

impl Color {
    pub const ALL: [Color; 3] = [Color::Blue, Color::Red, Color::Green];

    pub fn as_str(self) -> &'static str {
        match self {
            Color::Blue => "blue",
            Color::Red => "red",
            Color::Green => "green",
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A grid cell addressed as (row, col), row 0 at the top.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub row: u8,
    pub col: u8,
}

impl Cell {
    pub fn new(row: u8, col: u8) -> Option<Cell> {
        let cell = Cell { row, col };
        cell.in_bounds().then_some(cell)
    }

    pub fn in_bounds(&self) -> bool {
        self.row < GRID_SIZE && self.col < GRID_SIZE
    }

    /// Row-major index in `0..GRID_CELLS`.
    pub fn index(&self) -> usize {
        self.row as usize * GRID_SIZE as usize + self.col as usize
    }

    pub fn from_index(index: usize) -> Cell {
        assert!(index < GRID_CELLS, "cell index {index} out of range");
        Cell {
            row: (index / GRID_SIZE as usize) as u8,
            col: (index % GRID_SIZE as usize) as u8,
        }
    }

    /// Every cell of the grid in row-major order.
    pub fn all() -> impl Iterator<Item = Cell> {
        (0..GRID_CELLS).map(Cell::from_index)
    }

    /// In-bounds 4-adjacent neighbors (up, down, left, right).
    pub fn neighbors4(&self) -> impl Iterator<Item = Cell> {
        let (r, c) = (self.row as i16, self.col as i16);
        [(r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)]
            .into_iter()
            .filter(|&(r, c)| (0..GRID_SIZE as i16).contains(&r) && (0..GRID_SIZE as i16).contains(&c))
            .map(|(r, c)| Cell { row: r as u8, col: c as u8 })
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

/// A colored shape pinned to a grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ShapeObject {
    pub shape: Shape,
    pub color: Color,
    #[serde(flatten)]
    pub cell: Cell,
}

impl ShapeObject {
    pub fn new(shape: Shape, color: Color, cell: Cell) -> Self {
        ShapeObject { shape, color, cell }
    }
}

/// Axis-aligned box in normalized canvas units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BBox {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        BBox { x, y, w, h }
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x + self.w / 2.0, self.y + self.h / 2.0)
    }

    /// Checks `w > 0`, `h > 0`, `x, y >= 0`, `x + w <= 1` and `y + h <= 1`.
    pub fn check(&self) -> Result<(), String> {
        let finite = [self.x, self.y, self.w, self.h].iter().all(|v| v.is_finite());
        if !finite {
            return Err("non-finite coordinate".into());
        }
        if self.w <= 0.0 || self.h <= 0.0 {
            return Err(format!("non-positive size {}x{}", self.w, self.h));
        }
        if self.x < -BOX_EPS || self.y < -BOX_EPS {
            return Err(format!("negative origin ({}, {})", self.x, self.y));
        }
        if self.x + self.w > 1.0 + BOX_EPS || self.y + self.h > 1.0 + BOX_EPS {
            return Err(format!(
                "box [{}, {}, {}, {}] exceeds the unit canvas",
                self.x, self.y, self.w, self.h
            ));
        }
        Ok(())
    }
}

/// A class-labeled box with an optional user-assigned name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocoObject {
    pub id: u32,
    pub class_label: String,
    #[serde(flatten)]
    pub bbox: BBox,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl CocoObject {
    pub fn new(id: u32, class_label: impl Into<String>, bbox: BBox) -> Self {
        CocoObject { id, class_label: class_label.into(), bbox, name: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayoutKind {
    Shape2d,
    Coco,
}

impl fmt::Display for LayoutKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LayoutKind::Shape2d => "shape2d",
            LayoutKind::Coco => "coco",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Scenario {
    #[serde(rename = "2d-shape-random")]
    ShapeRandom,
    #[serde(rename = "2d-shape-pattern")]
    ShapePattern,
    #[serde(rename = "coco-simple")]
    CocoSimple,
    #[serde(rename = "coco-complex")]
    CocoComplex,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::ShapeRandom,
        Scenario::ShapePattern,
        Scenario::CocoSimple,
        Scenario::CocoComplex,
    ];

    pub fn kind(self) -> LayoutKind {
        match self {
            Scenario::ShapeRandom | Scenario::ShapePattern => LayoutKind::Shape2d,
            Scenario::CocoSimple | Scenario::CocoComplex => LayoutKind::Coco,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::ShapeRandom => "2d-shape-random",
            Scenario::ShapePattern => "2d-shape-pattern",
            Scenario::CocoSimple => "coco-simple",
            Scenario::CocoComplex => "coco-complex",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.as_str() == s)
            .ok_or_else(|| format!("unknown scenario `{s}`"))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LayoutError {
    #[error("cell {0} is outside the 5x5 grid")]
    OutOfBounds(Cell),
    #[error("more than one object on cell {0}")]
    DuplicateCell(Cell),
    #[error("duplicate object id {0}")]
    DuplicateId(u32),
    #[error("object {id}: {reason}")]
    InvalidBox { id: u32, reason: String },
    #[error("scenario {scenario} does not hold {kind} objects")]
    ScenarioMismatch { scenario: Scenario, kind: LayoutKind },
}

#[derive(Debug, Clone, PartialEq)]
enum Objects {
    Shapes(Vec<ShapeObject>),
    Boxes(Vec<CocoObject>),
}

/// A reference layout or a designer canvas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LayoutRecord", into = "LayoutRecord")]
pub struct Layout {
    scenario: Scenario,
    objects: Objects,
}

/// Wire form of [`Layout`].
#[derive(Serialize, Deserialize)]
#[serde(tag = "kind")]
enum LayoutRecord {
    #[serde(rename = "shape2d")]
    Shape2d { scenario: Scenario, objects: Vec<ShapeObject> },
    #[serde(rename = "coco")]
    Coco { scenario: Scenario, objects: Vec<CocoObject> },
}

impl TryFrom<LayoutRecord> for Layout {
    type Error = LayoutError;

    fn try_from(record: LayoutRecord) -> Result<Self, Self::Error> {
        match record {
            LayoutRecord::Shape2d { scenario, objects } => Layout::shape2d(scenario, objects),
            LayoutRecord::Coco { scenario, objects } => Layout::coco(scenario, objects),
        }
    }
}

impl From<Layout> for LayoutRecord {
    fn from(layout: Layout) -> Self {
        match layout.objects {
            Objects::Shapes(objects) => LayoutRecord::Shape2d { scenario: layout.scenario, objects },
            Objects::Boxes(objects) => LayoutRecord::Coco { scenario: layout.scenario, objects },
        }
    }
}

impl Layout {
    /// Builds a shape layout, sorting objects into row-major order.
    pub fn shape2d(scenario: Scenario, mut objects: Vec<ShapeObject>) -> Result<Layout, LayoutError> {
        if scenario.kind() != LayoutKind::Shape2d {
            return Err(LayoutError::ScenarioMismatch { scenario, kind: LayoutKind::Shape2d });
        }
        objects.sort_by_key(|o| o.cell);
        for (i, obj) in objects.iter().enumerate() {
            if !obj.cell.in_bounds() {
                return Err(LayoutError::OutOfBounds(obj.cell));
            }
            if i > 0 && objects[i - 1].cell == obj.cell {
                return Err(LayoutError::DuplicateCell(obj.cell));
            }
        }
        Ok(Layout { scenario, objects: Objects::Shapes(objects) })
    }

    /// Builds a box layout, sorting objects by id.
    pub fn coco(scenario: Scenario, mut objects: Vec<CocoObject>) -> Result<Layout, LayoutError> {
        if scenario.kind() != LayoutKind::Coco {
            return Err(LayoutError::ScenarioMismatch { scenario, kind: LayoutKind::Coco });
        }
        objects.sort_by_key(|o| o.id);
        for (i, obj) in objects.iter().enumerate() {
            obj.bbox
                .check()
                .map_err(|reason| LayoutError::InvalidBox { id: obj.id, reason })?;
            if i > 0 && objects[i - 1].id == obj.id {
                return Err(LayoutError::DuplicateId(obj.id));
            }
        }
        Ok(Layout { scenario, objects: Objects::Boxes(objects) })
    }

    /// An empty canvas for the given scenario.
    pub fn empty(scenario: Scenario) -> Layout {
        let objects = match scenario.kind() {
            LayoutKind::Shape2d => Objects::Shapes(Vec::new()),
            LayoutKind::Coco => Objects::Boxes(Vec::new()),
        };
        Layout { scenario, objects }
    }

    /// An empty canvas of the same kind and scenario.
    pub fn empty_like(&self) -> Layout {
        Layout::empty(self.scenario)
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn kind(&self) -> LayoutKind {
        match self.objects {
            Objects::Shapes(_) => LayoutKind::Shape2d,
            Objects::Boxes(_) => LayoutKind::Coco,
        }
    }

    pub fn len(&self) -> usize {
        match &self.objects {
            Objects::Shapes(v) => v.len(),
            Objects::Boxes(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn shapes(&self) -> Option<&[ShapeObject]> {
        match &self.objects {
            Objects::Shapes(v) => Some(v),
            Objects::Boxes(_) => None,
        }
    }

    pub fn boxes(&self) -> Option<&[CocoObject]> {
        match &self.objects {
            Objects::Boxes(v) => Some(v),
            Objects::Shapes(_) => None,
        }
    }

    /// The shape occupying `cell`, if any.
    pub fn object_at(&self, cell: Cell) -> Option<&ShapeObject> {
        let shapes = self.shapes()?;
        shapes
            .binary_search_by_key(&cell, |o| o.cell)
            .ok()
            .map(|i| &shapes[i])
    }

    pub fn object_by_id(&self, id: u32) -> Option<&CocoObject> {
        let boxes = self.boxes()?;
        boxes.binary_search_by_key(&id, |o| o.id).ok().map(|i| &boxes[i])
    }

    /// Distinct class labels of a box layout, sorted.
    pub fn class_labels(&self) -> Vec<String> {
        let mut labels: Vec<String> = self
            .boxes()
            .unwrap_or_default()
            .iter()
            .map(|o| o.class_label.clone())
            .collect();
        labels.sort();
        labels.dedup();
        labels
    }

    pub(crate) fn shape_map(&self) -> BTreeMap<Cell, ShapeObject> {
        self.shapes()
            .unwrap_or_default()
            .iter()
            .map(|o| (o.cell, *o))
            .collect()
    }

    /// Fraction of objects with at least one 4-adjacent neighbor.
    pub fn adjacency_fraction(&self) -> f64 {
        let map = self.shape_map();
        if map.is_empty() {
            return 0.0;
        }
        let adjacent = map
            .keys()
            .filter(|c| c.neighbors4().any(|n| map.contains_key(&n)))
            .count();
        adjacent as f64 / map.len() as f64
    }
}
