//! Generates a shape layout and prints it as JSON and as a grid.
//!
//! cargo run --example generate_layouts -- [2d-shape-random|2d-shape-pattern] [seed]

use chatcrowd::layout::{generate_pattern_shape_layout, generate_random_shape_layout, Cell, PatternRules, Scenario, GRID_SIZE};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let scenario: Scenario = args.first().map_or("2d-shape-random", String::as_str).parse()?;
    let seed: u64 = args.get(1).map_or(Ok(0), |s| s.parse())?;
    let layout = match scenario {
        Scenario::ShapeRandom => generate_random_shape_layout(seed),
        Scenario::ShapePattern => generate_pattern_shape_layout(seed, &PatternRules::default())?,
        other => return Err(format!("{other} layouts come from COCO annotations; see the ingest_coco example").into()),
    };

    println!("{}", serde_json::to_string_pretty(&layout)?);
    for row in 0..GRID_SIZE {
        let line: Vec<String> = (0..GRID_SIZE)
            .map(|col| match layout.object_at(Cell::new(row, col).unwrap()) {
                Some(o) => format!("{}{}", &o.color.as_str()[..1], &o.shape.as_str()[..1]),
                None => "..".to_string(),
            })
            .collect();
        println!("{}", line.join(" "));
    }
    Ok(())
}
