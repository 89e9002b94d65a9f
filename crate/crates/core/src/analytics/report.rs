use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{duration_stats, instruction_efficiency, word_usage, AnalyticsError, DurationStats, Efficiency, WordUsage};
use crate::dispatch::ExportRecord;
use crate::layout::{LayoutKind, Scenario};
use crate::nlu::Lexicon;

const NOTES: [&str; 3] = [
    "rounds = director INSTRUCT/SUGGEST_FIX turns per session; injected probes excluded",
    "words = normalized tokens per instruction; std is the population std over instructions",
    "word_usage covers shape-grid instructions only",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub duration: DurationStats,
    pub word_usage: Option<WordUsage>,
    pub efficiency: Efficiency,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub scenarios: Vec<ScenarioReport>,
    pub notes: Vec<String>,
}

/// All measurements, per scenario. `only` restricts the input to one scenario.
pub fn stats_report(records: &[ExportRecord], only: Option<Scenario>, lexicon: &Lexicon) -> Result<StatsReport, AnalyticsError> {
    let selected: Vec<ExportRecord> = records.iter().filter(|r| only.is_none_or(|s| r.scenario == s)).cloned().collect();
    let mut scenarios = Vec::new();
    for (scenario, duration) in duration_stats(&selected)? {
        let group: Vec<ExportRecord> = selected.iter().filter(|r| r.scenario == scenario).cloned().collect();
        let word_usage = match scenario.kind() {
            LayoutKind::Shape2d => word_usage(&group, lexicon).ok(),
            LayoutKind::Coco => None,
        };
        scenarios.push(ScenarioReport { duration, word_usage, efficiency: instruction_efficiency(&group) });
    }
    Ok(StatsReport { scenarios, notes: NOTES.iter().map(|s| s.to_string()).collect() })
}

impl StatsReport {
    /// Fixed-width text table, one row per scenario.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<17} {:>8} {:>7} {:>14} {:>6} {:>6} {:>6} {:>6}",
            "scenario", "sessions", "rounds", "words", "loc", "color", "shape", "P(>3)"
        );
        for s in &self.scenarios {
            let d = &s.duration;
            let usage = |f: fn(&WordUsage) -> f64| s.word_usage.as_ref().map_or("-".to_string(), |u| format!("{:.2}", f(u)));
            let _ = writeln!(
                out,
                "{:<17} {:>8} {:>7.2} {:>14} {:>6} {:>6} {:>6} {:>6.2}",
                d.scenario.as_str(),
                d.sessions,
                d.mean_rounds,
                format!("{:.1}±{:.1}", d.mean_words, d.std_words),
                usage(|u| u.location),
                usage(|u| u.color),
                usage(|u| u.shape),
                s.efficiency.p_more_than_three,
            );
        }
        out
    }
}
