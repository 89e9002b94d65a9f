//! Mention extraction: object attributes and location expressions.

use serde::{Deserialize, Serialize};

use super::lexicon::{Lexicon, Term};
use crate::layout::{BBox, Cell, Color, LayoutKind, Shape, GRID_SIZE};

/// The 3x3 coarse regions of a canvas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Region {
    #[serde(rename = "top-left")]
    TopLeft,
    #[serde(rename = "top")]
    Top,
    #[serde(rename = "top-right")]
    TopRight,
    #[serde(rename = "left")]
    Left,
    #[serde(rename = "center")]
    Center,
    #[serde(rename = "right")]
    Right,
    #[serde(rename = "bottom-left")]
    BottomLeft,
    #[serde(rename = "bottom")]
    Bottom,
    #[serde(rename = "bottom-right")]
    BottomRight,
}

impl Region {
    /// Row-major over the 3x3 partition.
    pub const ALL: [Region; 9] = [
        Region::TopLeft,
        Region::Top,
        Region::TopRight,
        Region::Left,
        Region::Center,
        Region::Right,
        Region::BottomLeft,
        Region::Bottom,
        Region::BottomRight,
    ];

    /// How the region is said in a sentence ("at the {phrase}").
    pub fn phrase(self) -> &'static str {
        match self {
            Region::TopLeft => "top left",
            Region::Top => "top",
            Region::TopRight => "top right",
            Region::Left => "left",
            Region::Center => "center",
            Region::Right => "right",
            Region::BottomLeft => "bottom left",
            Region::Bottom => "bottom",
            Region::BottomRight => "bottom right",
        }
    }

    fn grid_pos(self) -> (usize, usize) {
        let i = Region::ALL.iter().position(|r| *r == self).unwrap();
        (i / 3, i % 3)
    }

    /// Region containing a point in normalized coordinates.
    pub fn of_point(x: f64, y: f64) -> Region {
        let bucket = |v: f64| ((v * 3.0).floor().clamp(0.0, 2.0)) as usize;
        Region::ALL[bucket(y) * 3 + bucket(x)]
    }

    pub fn of_box(bbox: &BBox) -> Region {
        let (cx, cy) = bbox.center();
        Region::of_point(cx, cy)
    }

    /// Center of the region in normalized coordinates.
    pub fn center(self) -> (f64, f64) {
        let (r, c) = self.grid_pos();
        ((c as f64 + 0.5) / 3.0, (r as f64 + 0.5) / 3.0)
    }

    /// Whether a grid cell falls in this region (rows/cols 0-1, 2, 3-4).
    pub fn contains_cell(self, cell: Cell) -> bool {
        let band = |v: u8| match v {
            0 | 1 => 0,
            2 => 1,
            _ => 2,
        };
        debug_assert!(cell.row < GRID_SIZE && cell.col < GRID_SIZE);
        self.grid_pos() == (band(cell.row), band(cell.col))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    LeftOf,
    RightOf,
    Above,
    Below,
    NextTo,
}

/// A partial object description used as a relation anchor.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectDesc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color: Option<Color>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<Shape>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum LocationExpr {
    AbsoluteCell { cell: Cell },
    Region { region: Region },
    Relative { relation: Relation, anchor: ObjectDesc },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MentionSet {
    pub colors: Vec<Color>,
    pub shapes: Vec<Shape>,
    pub classes: Vec<String>,
    pub locations: Vec<LocationExpr>,
    pub counts: Vec<u32>,
}

impl MentionSet {
    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
            && self.shapes.is_empty()
            && self.classes.is_empty()
            && self.locations.is_empty()
            && self.counts.is_empty()
    }

    pub fn cells(&self) -> Vec<Cell> {
        self.locations
            .iter()
            .filter_map(|l| match l {
                LocationExpr::AbsoluteCell { cell } => Some(*cell),
                _ => None,
            })
            .collect()
    }

    pub fn regions(&self) -> Vec<Region> {
        self.locations
            .iter()
            .filter_map(|l| match l {
                LocationExpr::Region { region } => Some(*region),
                _ => None,
            })
            .collect()
    }
}

const DETERMINERS: [&str; 6] = ["the", "a", "an", "that", "this", "one"];

fn number(tok: Option<&String>) -> Option<u32> {
    tok.and_then(|t| t.parse::<u32>().ok())
}

fn grid_cell(row: u32, col: u32) -> Option<Cell> {
    // surface coordinates are 1-indexed
    let valid = |v: u32| (1..=GRID_SIZE as u32).contains(&v);
    (valid(row) && valid(col)).then(|| Cell { row: row as u8 - 1, col: col as u8 - 1 })
}

fn is_column(tok: Option<&String>) -> bool {
    matches!(tok.map(String::as_str), Some("column" | "col" | "columns"))
}

fn is_row(tok: Option<&String>) -> bool {
    matches!(tok.map(String::as_str), Some("row" | "rows"))
}

/// `row R [and] column C`, `column C [and] row R`, or `( C R )`.
fn match_absolute(tokens: &[String], i: usize) -> Option<(Cell, usize)> {
    let at = |k: usize| tokens.get(i + k);
    let skip_and = |k: usize| usize::from(at(k).is_some_and(|t| t == "and"));
    if is_row(at(0)) {
        let row = number(at(1))?;
        let k = 2 + skip_and(2);
        if is_column(at(k)) {
            let col = number(at(k + 1))?;
            return grid_cell(row, col).map(|c| (c, k + 2));
        }
        return None;
    }
    if is_column(at(0)) {
        let col = number(at(1))?;
        let k = 2 + skip_and(2);
        if is_row(at(k)) {
            let row = number(at(k + 1))?;
            return grid_cell(row, col).map(|c| (c, k + 2));
        }
        return None;
    }
    if at(0).is_some_and(|t| t == "(") && at(3).is_some_and(|t| t == ")") {
        let (col, row) = (number(at(1))?, number(at(2))?);
        return grid_cell(row, col).map(|c| (c, 4));
    }
    None
}

fn match_relation(tokens: &[String], i: usize) -> Option<(Relation, usize)> {
    let w = |k: usize| tokens.get(i + k).map(String::as_str);
    match (w(0), w(1), w(2)) {
        (Some("left"), Some("of"), _) => Some((Relation::LeftOf, 2)),
        (Some("right"), Some("of"), _) => Some((Relation::RightOf, 2)),
        (Some("on"), Some("top"), Some("of")) => Some((Relation::Above, 3)),
        (Some("above" | "over"), _, _) => Some((Relation::Above, 1)),
        (Some("below" | "under" | "beneath" | "underneath"), _, _) => Some((Relation::Below, 1)),
        (Some("next"), Some("to"), _) => Some((Relation::NextTo, 2)),
        (Some("beside"), _, _) => Some((Relation::NextTo, 1)),
        _ => None,
    }
}

fn match_region(tokens: &[String], i: usize) -> Option<(Region, usize)> {
    let w = |k: usize| tokens.get(i + k).map(String::as_str);
    let vertical = match w(0)? {
        "top" | "upper" => Some(Region::Top),
        "bottom" | "lower" => Some(Region::Bottom),
        _ => None,
    };
    if let Some(v) = vertical {
        let corner = match (v, w(1)) {
            (Region::Top, Some("left")) => Some(Region::TopLeft),
            (Region::Top, Some("right")) => Some(Region::TopRight),
            (Region::Bottom, Some("left")) => Some(Region::BottomLeft),
            (Region::Bottom, Some("right")) => Some(Region::BottomRight),
            _ => None,
        };
        return Some(match corner {
            Some(c) => (c, 2),
            None => (v, 1),
        });
    }
    match w(0)? {
        "left" => Some((Region::Left, 1)),
        "right" => Some((Region::Right, 1)),
        "middle" | "center" | "centre" => Some((Region::Center, 1)),
        _ => None,
    }
}

fn term_allowed(term: &Term, kind: LayoutKind) -> bool {
    !matches!((term, kind), (Term::Class(_), LayoutKind::Shape2d))
}

/// Extracts attribute terms and locations from normalized tokens.
///
/// Terms inside a relation's anchor ("left of the green triangle") describe
/// the anchor only and are not counted in the top-level multisets.
pub fn extract_mentions(tokens: &[String], kind: LayoutKind, lexicon: &Lexicon) -> MentionSet {
    let mut out = MentionSet::default();
    let mut i = 0;
    while i < tokens.len() {
        if let Some((relation, len)) = match_relation(tokens, i) {
            i += len;
            while tokens.get(i).is_some_and(|t| DETERMINERS.contains(&t.as_str())) {
                i += 1;
            }
            let mut anchor = ObjectDesc::default();
            while let Some((term, len)) = lexicon.longest_match(tokens, i) {
                if !term_allowed(term, kind) {
                    break;
                }
                match term {
                    Term::Color(c) if anchor.color.is_none() => anchor.color = Some(*c),
                    Term::Shape(s) if anchor.shape.is_none() => anchor.shape = Some(*s),
                    Term::Class(c) if anchor.class.is_none() => anchor.class = Some(c.clone()),
                    _ => break,
                }
                i += len;
            }
            out.locations.push(LocationExpr::Relative { relation, anchor });
            continue;
        }
        if let Some((cell, len)) = match_absolute(tokens, i) {
            out.locations.push(LocationExpr::AbsoluteCell { cell });
            i += len;
            continue;
        }
        if let Some((region, len)) = match_region(tokens, i) {
            out.locations.push(LocationExpr::Region { region });
            i += len;
            continue;
        }
        if let Some(n) = number(tokens.get(i)) {
            out.counts.push(n);
            i += 1;
            continue;
        }
        if let Some((term, len)) = lexicon.longest_match(tokens, i) {
            if term_allowed(term, kind) {
                match term {
                    Term::Color(c) => out.colors.push(*c),
                    Term::Shape(s) => out.shapes.push(*s),
                    Term::Class(c) => out.classes.push(c.clone()),
                }
                i += len;
                continue;
            }
        }
        i += 1;
    }
    out
}
