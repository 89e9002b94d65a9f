//! Filters a COCO annotation file into simple or complex box layouts.
//!
//! cargo run --example ingest_coco -- [annotations.json] [coco-simple|coco-complex]

use chatcrowd::layout::{ingest_coco_annotations, Scenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let path = args.first().cloned().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/coco_20.json").into());
    let scenario: Scenario = args.get(1).map_or("coco-simple", String::as_str).parse()?;

    let report = ingest_coco_annotations(&std::fs::read_to_string(&path)?, scenario)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    for l in &report.layouts {
        let labels: Vec<&str> = l.layout.boxes().unwrap().iter().map(|b| b.class_label.as_str()).collect();
        println!("image {:>4}: {} boxes [{}]", l.image_id, labels.len(), labels.join(", "));
    }
    println!("{} {scenario} layouts from {path}", report.layouts.len());
    Ok(())
}
