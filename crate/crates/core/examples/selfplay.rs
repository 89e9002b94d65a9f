//! Runs synthetic director/designer sessions through the dispatcher.
//!
//! cargo run --example selfplay -- [scenario] [n] [seed]

use chatcrowd::analytics::{run_selfplay, SelfPlayConfig};
use chatcrowd::layout::Scenario;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let scenario: Scenario = args.first().map_or("2d-shape-random", String::as_str).parse()?;
    let n: usize = args.get(1).map_or(Ok(20), |s| s.parse())?;
    let seed: u64 = args.get(2).map_or(Ok(7), |s| s.parse())?;

    let report = run_selfplay(scenario, n, seed, &SelfPlayConfig::default())?;
    println!("{:<10} {:>7} {:>6} {:>6} {:>7} {:>6}", "session", "objects", "rounds", "turns", "probes", "status");
    for s in &report.sessions {
        println!("{:<10} {:>7} {:>6} {:>6} {:>7} {:>6?}", s.session_id, s.objects, s.rounds, s.turns, s.probes, s.status);
    }
    println!(
        "{} completed, {} abandoned, mean rounds {:.2}, mean objects {:.2}",
        report.completed, report.abandoned, report.mean_rounds, report.mean_objects
    );
    Ok(())
}
