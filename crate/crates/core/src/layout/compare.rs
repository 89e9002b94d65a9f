use thiserror::Error;

use super::{BBox, Layout, LayoutKind};

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum CompareError {
    #[error("expected two {expected} layouts, got {left} and {right}")]
    WrongKind { expected: LayoutKind, left: LayoutKind, right: LayoutKind },
}

fn require(a: &Layout, b: &Layout, expected: LayoutKind) -> Result<(), CompareError> {
    if a.kind() == expected && b.kind() == expected {
        Ok(())
    } else {
        Err(CompareError::WrongKind { expected, left: a.kind(), right: b.kind() })
    }
}

/// Set equality of (shape, color, cell) triples.
pub fn exact_match(a: &Layout, b: &Layout) -> Result<bool, CompareError> {
    require(a, b, LayoutKind::Shape2d)?;
    // Both object lists are canonical (sorted by cell, one per cell).
    Ok(a.shapes() == b.shapes())
}

/// Intersection over union of two boxes.
pub fn iou(a: &BBox, b: &BBox) -> f64 {
    let ix = (a.x + a.w).min(b.x + b.w) - a.x.max(b.x);
    let iy = (a.y + a.h).min(b.y + b.h) - a.y.max(b.y);
    if ix <= 0.0 || iy <= 0.0 {
        return 0.0;
    }
    let inter = ix * iy;
    inter / (a.area() + b.area() - inter)
}

/// Advisory similarity of two box layouts in `[0, 1]`.
///
/// Same-class pairs are matched greedily by descending IoU; the score is the
/// sum of matched IoUs over the larger object count. Two empty layouts score 1.
pub fn coco_similarity(a: &Layout, b: &Layout) -> Result<f64, CompareError> {
    require(a, b, LayoutKind::Coco)?;
    let (left, right) = (a.boxes().unwrap(), b.boxes().unwrap());
    let denom = left.len().max(right.len());
    if denom == 0 {
        return Ok(1.0);
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, p) in left.iter().enumerate() {
        for (j, q) in right.iter().enumerate() {
            if p.class_label == q.class_label {
                let v = iou(&p.bbox, &q.bbox);
                if v > 0.0 {
                    pairs.push((v, i, j));
                }
            }
        }
    }
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut used_left = vec![false; left.len()];
    let mut used_right = vec![false; right.len()];
    let mut total = 0.0;
    for (v, i, j) in pairs {
        if !used_left[i] && !used_right[j] {
            used_left[i] = true;
            used_right[j] = true;
            total += v;
        }
    }
    Ok((total / denom as f64).clamp(0.0, 1.0))
}
