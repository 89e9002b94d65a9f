use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use chatcrowd::agents::{designer_lexicon, TemplateCatalog};
use chatcrowd::analytics::{read_export, run_selfplay, stats_report, SelfPlayConfig};
use chatcrowd::dispatch::DispatchConfig;
use chatcrowd::layout::Scenario;
use chatcrowd::nlu::Lexicon;

#[derive(Parser)]
#[command(name = "analytics", about = "Transcript statistics and self-play runs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Duration, word-usage and efficiency statistics for an export dump.
    Stats {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        scenario: Option<Scenario>,
        /// Lexicon TSV (`surface<TAB>canonical`); built-in lexicon when omitted.
        #[arg(long)]
        lexicon: Option<PathBuf>,
        /// Also write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Synthetic sessions through the dispatcher; writes transcripts, events and a report.
    Selfplay {
        #[arg(long)]
        scenario: Scenario,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Dispatcher config JSON (probe settings).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Instruction template file (`key<TAB>template`).
        #[arg(long)]
        templates: Option<PathBuf>,
    },
}

fn write_json_lines<T: serde::Serialize>(path: PathBuf, items: &[T]) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    match Cli::parse().command {
        Command::Stats { input, scenario, lexicon, json } => {
            let records = read_export(BufReader::new(File::open(&input)?))?;
            let lexicon = match lexicon {
                Some(path) => Lexicon::parse(&fs::read_to_string(path)?)?,
                None => designer_lexicon(),
            };
            let report = stats_report(&records, scenario, &lexicon)?;
            print!("{}", report.table());
            if let Some(path) = json {
                fs::write(path, serde_json::to_string_pretty(&report)?)?;
            }
        }
        Command::Selfplay { scenario, n, seed, out, config, templates } => {
            let mut sp = SelfPlayConfig::default();
            if let Some(path) = config {
                sp.dispatch = DispatchConfig::load(&path)?;
            }
            if let Some(path) = templates {
                sp.templates = TemplateCatalog::parse(&fs::read_to_string(path)?)?;
            }
            let report = run_selfplay(scenario, n, seed, &sp)?;
            fs::create_dir_all(&out)?;
            write_json_lines(out.join("transcripts.jsonl"), &report.transcripts)?;
            write_json_lines(out.join("events.jsonl"), &report.events)?;
            fs::write(out.join("report.json"), serde_json::to_string_pretty(&report)?)?;
            let stats = stats_report(&report.transcripts, None, &designer_lexicon())?;
            print!("{}", stats.table());
            println!(
                "{}/{} completed, {} abandoned; wrote {}",
                report.completed,
                report.n,
                report.abandoned,
                out.display()
            );
            if report.completed != report.n {
                std::process::exit(1);
            }
        }
    }
    Ok(())
}
