//! Exports self-play sessions as JSON lines, reads them back and prints the
//! statistics table for each scenario.
//!
//! cargo run --example analytics_report -- [n] [seed]

use std::io::Cursor;

use chatcrowd::agents::designer_lexicon;
use chatcrowd::analytics::{read_export, run_selfplay, stats_report, SelfPlayConfig};
use chatcrowd::layout::Scenario;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(Ok(30), |s| s.parse())?;
    let seed: u64 = args.get(1).map_or(Ok(7), |s| s.parse())?;

    let mut export = Vec::new();
    for scenario in Scenario::ALL {
        for record in run_selfplay(scenario, n, seed, &SelfPlayConfig::default())?.transcripts {
            serde_json::to_writer(&mut export, &record)?;
            export.push(b'\n');
        }
    }
    let records = read_export(Cursor::new(export))?;
    let report = stats_report(&records, None, &designer_lexicon())?;
    print!("{}", report.table());
    for note in &report.notes {
        println!("note: {note}");
    }
    Ok(())
}
