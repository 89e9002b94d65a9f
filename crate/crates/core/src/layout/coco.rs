//! Ingestion of COCO object-detection annotation files.

use std::collections::{BTreeMap, BTreeSet};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use super::{BBox, CocoObject, Layout, Scenario};

/// The 80 COCO detection category names.
pub const COCO_CATEGORY_NAMES: [&str; 80] = [
    "person",
    "bicycle",
    "car",
    "motorcycle",
    "airplane",
    "bus",
    "train",
    "truck",
    "boat",
    "traffic light",
    "fire hydrant",
    "stop sign",
    "parking meter",
    "bench",
    "bird",
    "cat",
    "dog",
    "horse",
    "sheep",
    "cow",
    "elephant",
    "bear",
    "zebra",
    "giraffe",
    "backpack",
    "umbrella",
    "handbag",
    "tie",
    "suitcase",
    "frisbee",
    "skis",
    "snowboard",
    "sports ball",
    "kite",
    "baseball bat",
    "baseball glove",
    "skateboard",
    "surfboard",
    "tennis racket",
    "bottle",
    "wine glass",
    "cup",
    "fork",
    "knife",
    "spoon",
    "bowl",
    "banana",
    "apple",
    "sandwich",
    "orange",
    "broccoli",
    "carrot",
    "hot dog",
    "pizza",
    "donut",
    "cake",
    "chair",
    "couch",
    "potted plant",
    "bed",
    "dining table",
    "toilet",
    "tv",
    "laptop",
    "mouse",
    "remote",
    "keyboard",
    "cell phone",
    "microwave",
    "oven",
    "toaster",
    "sink",
    "refrigerator",
    "book",
    "clock",
    "vase",
    "scissors",
    "teddy bear",
    "hair drier",
    "toothbrush",
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IngestError {
    #[error("document is not valid JSON: {0}")]
    Json(String),
    #[error("missing top-level array `{0}`")]
    MissingSection(&'static str),
    #[error("{section}[{index}]: {reason}")]
    BadRecord { section: &'static str, index: usize, reason: String },
    #[error("scenario {0} is not a coco scenario")]
    NotCoco(Scenario),
}

#[derive(Debug, Deserialize)]
struct ImageRecord {
    id: u64,
    width: f64,
    height: f64,
}

#[derive(Debug, Deserialize)]
struct AnnotationRecord {
    image_id: u64,
    category_id: u64,
    bbox: [f64; 4],
}

#[derive(Debug, Deserialize)]
struct CategoryRecord {
    id: u64,
    name: String,
}

/// One emitted layout and the image it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestedLayout {
    pub image_id: u64,
    pub layout: Layout,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IngestReport {
    pub layouts: Vec<IngestedLayout>,
    pub warnings: Vec<String>,
}

fn records<T: DeserializeOwned>(doc: &Value, section: &'static str) -> Result<Vec<T>, IngestError> {
    let items = doc
        .get(section)
        .and_then(Value::as_array)
        .ok_or(IngestError::MissingSection(section))?;
    items
        .iter()
        .enumerate()
        .map(|(index, item)| {
            T::deserialize(item).map_err(|e| IngestError::BadRecord { section, index, reason: e.to_string() })
        })
        .collect()
}

fn instance_rule(scenario: Scenario) -> Option<(std::ops::RangeInclusive<usize>, usize)> {
    match scenario {
        Scenario::CocoSimple => Some((3..=4, 3)),
        Scenario::CocoComplex => Some((6..=8, 6)),
        _ => None,
    }
}

/// Parses a COCO annotation document and emits the images that satisfy the
/// scenario's instance-count and distinct-class constraints, with boxes
/// normalized by image size. Boxes leaving the image are clamped with a warning.
pub fn ingest_coco_annotations(document: &str, scenario: Scenario) -> Result<IngestReport, IngestError> {
    let (count_range, classes_required) = instance_rule(scenario).ok_or(IngestError::NotCoco(scenario))?;
    let doc: Value = serde_json::from_str(document).map_err(|e| IngestError::Json(e.to_string()))?;
    let images: Vec<ImageRecord> = records(&doc, "images")?;
    let annotations: Vec<AnnotationRecord> = records(&doc, "annotations")?;
    let categories: Vec<CategoryRecord> = records(&doc, "categories")?;

    let mut dims = BTreeMap::new();
    for (index, img) in images.iter().enumerate() {
        if !(img.width > 0.0 && img.height > 0.0) {
            return Err(IngestError::BadRecord {
                section: "images",
                index,
                reason: format!("non-positive size {}x{}", img.width, img.height),
            });
        }
        dims.insert(img.id, (img.width, img.height));
    }
    let names: BTreeMap<u64, &str> = categories.iter().map(|c| (c.id, c.name.as_str())).collect();

    let mut report = IngestReport::default();
    let mut per_image: BTreeMap<u64, Vec<CocoObject>> = images.iter().map(|i| (i.id, Vec::new())).collect();
    for (index, ann) in annotations.iter().enumerate() {
        let bad = |reason: String| IngestError::BadRecord { section: "annotations", index, reason };
        let &(width, height) = dims
            .get(&ann.image_id)
            .ok_or_else(|| bad(format!("unknown image_id {}", ann.image_id)))?;
        let label = names
            .get(&ann.category_id)
            .ok_or_else(|| bad(format!("unknown category_id {}", ann.category_id)))?;
        let [x, y, w, h] = ann.bbox;
        if ![x, y, w, h].iter().all(|v| v.is_finite()) || w <= 0.0 || h <= 0.0 {
            return Err(bad(format!("degenerate bbox {:?}", ann.bbox)));
        }
        let x0 = (x / width).clamp(0.0, 1.0);
        let y0 = (y / height).clamp(0.0, 1.0);
        let x1 = ((x + w) / width).clamp(0.0, 1.0);
        let y1 = ((y + h) / height).clamp(0.0, 1.0);
        if x < 0.0 || y < 0.0 || x + w > width || y + h > height {
            report
                .warnings
                .push(format!("annotations[{index}]: bbox {:?} exceeds image {}; clamped", ann.bbox, ann.image_id));
        }
        if x1 <= x0 || y1 <= y0 {
            report
                .warnings
                .push(format!("annotations[{index}]: bbox lies outside image {}; dropped", ann.image_id));
            continue;
        }
        let objects = per_image.get_mut(&ann.image_id).expect("image registered above");
        let id = objects.len() as u32 + 1;
        objects.push(CocoObject::new(id, *label, BBox::new(x0, y0, x1 - x0, y1 - y0)));
    }

    for (image_id, objects) in per_image {
        let classes: BTreeSet<&str> = objects.iter().map(|o| o.class_label.as_str()).collect();
        if count_range.contains(&objects.len()) && classes.len() == classes_required {
            let layout = Layout::coco(scenario, objects).expect("boxes clamped to the unit canvas");
            report.layouts.push(IngestedLayout { image_id, layout });
        }
    }
    Ok(report)
}
