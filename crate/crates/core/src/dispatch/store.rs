//! Append-only JSON-lines event log plus a periodic state snapshot.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::state::{DispatchState, Event};
use super::DispatchError;

pub const EVENT_LOG: &str = "events.jsonl";
pub const SNAPSHOT: &str = "snapshot.json";

#[derive(Serialize, Deserialize)]
struct Snapshot {
    state: DispatchState,
}

#[derive(Debug)]
pub struct EventStore {
    dir: PathBuf,
    log: File,
}

/// What was recovered from disk.
pub struct Recovered {
    pub store: EventStore,
    pub events: Vec<Event>,
    pub state: DispatchState,
}

impl EventStore {
    /// Opens (or creates) the store in `dir`, restoring state from the
    /// snapshot and the log entries after it.
    pub fn open(dir: &Path) -> Result<Recovered, DispatchError> {
        fs::create_dir_all(dir)?;
        let log_path = dir.join(EVENT_LOG);
        let mut events = Vec::new();
        if log_path.exists() {
            for (i, line) in BufReader::new(File::open(&log_path)?).lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let event: Event = serde_json::from_str(&line)
                    .map_err(|e| DispatchError::Corrupt(format!("{}:{}: {e}", log_path.display(), i + 1)))?;
                events.push(event);
            }
        }
        let snapshot_path = dir.join(SNAPSHOT);
        let mut state = if snapshot_path.exists() {
            let text = fs::read_to_string(&snapshot_path)?;
            serde_json::from_str::<Snapshot>(&text)
                .map_err(|e| DispatchError::Corrupt(format!("{}: {e}", snapshot_path.display())))?
                .state
        } else {
            DispatchState::default()
        };
        let restored_seq = state.last_seq;
        for event in events.iter().filter(|e| e.seq > restored_seq) {
            state.apply(event)?;
        }
        if state.last_seq != events.last().map_or(state.last_seq, |e| e.seq) {
            return Err(DispatchError::Corrupt("snapshot is newer than the event log".into()));
        }
        let log = OpenOptions::new().create(true).append(true).open(&log_path)?;
        Ok(Recovered { store: EventStore { dir: dir.to_path_buf(), log }, events, state })
    }

    pub fn append(&mut self, event: &Event) -> Result<(), DispatchError> {
        let line = serde_json::to_string(event).expect("events serialize");
        writeln!(self.log, "{line}")?;
        self.log.flush()?;
        Ok(())
    }

    /// Writes the snapshot through a temporary file so a crash never leaves a torn one.
    pub fn snapshot(&self, state: &DispatchState) -> Result<(), DispatchError> {
        let tmp = self.dir.join(format!("{SNAPSHOT}.tmp"));
        fs::write(&tmp, serde_json::to_vec(&Snapshot { state: state.clone() }).expect("state serializes"))?;
        fs::rename(tmp, self.dir.join(SNAPSHOT))?;
        Ok(())
    }
}
