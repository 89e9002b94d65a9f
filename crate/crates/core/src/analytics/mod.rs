//! Measurements over exported transcripts, and the self-play driver.

mod report;
mod selfplay;
mod stats;

use std::io::BufRead;

use thiserror::Error;

use crate::dispatch::ExportRecord;

pub use report::{stats_report, ScenarioReport, StatsReport};
pub use selfplay::{random_coco_reference, run_selfplay, SelfPlayConfig, SelfPlayReport, SelfPlaySession, MAX_ROUNDS};
pub use stats::{
    duration_stats, instruction_efficiency, instruction_turns, objects_touched, word_count, word_usage, DurationStats,
    Efficiency, WordUsage,
};

#[derive(Debug, Error)]
pub enum AnalyticsError {
    #[error("no {0} to analyze")]
    Empty(&'static str),
    #[error("line {line}: {reason}")]
    BadRecord { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Dispatch(#[from] crate::dispatch::DispatchError),
    #[error(transparent)]
    Agent(#[from] crate::agents::AgentError),
}

/// Reads an export dump: one JSON session record per line.
pub fn read_export<R: BufRead>(input: R) -> Result<Vec<ExportRecord>, AnalyticsError> {
    let mut records = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| AnalyticsError::BadRecord { line: i + 1, reason: e.to_string() })?;
        records.push(record);
    }
    Ok(records)
}
