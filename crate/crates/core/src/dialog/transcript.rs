//! JSON-lines transcript files: one [`Turn`] per line.

use std::io::{BufRead, Write};

use thiserror::Error;

use super::Turn;

#[derive(Debug, Error)]
pub enum TranscriptError {
    #[error("line {line}: {source}")]
    Parse { line: usize, source: serde_json::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn write_transcript<W: Write>(mut out: W, turns: &[Turn]) -> Result<(), TranscriptError> {
    for turn in turns {
        serde_json::to_writer(&mut out, turn).map_err(|e| TranscriptError::Io(e.into()))?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads turns, skipping blank lines. Line numbers in errors are 1-based.
pub fn read_transcript<R: BufRead>(input: R) -> Result<Vec<Turn>, TranscriptError> {
    let mut turns = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        turns.push(serde_json::from_str(&line).map_err(|source| TranscriptError::Parse { line: i + 1, source })?);
    }
    Ok(turns)
}
