//! Per half-turn trace records and their JSON-lines encoding.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::engine::Actor;
use crate::strategy::DecisionCase;

/// One half-turn. Field order is the on-disk order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub step: u64,
    pub actor: Actor,
    pub x: f64,
    pub y: f64,
    /// Pursuer heading; `null` for evader records.
    pub theta: Option<f64>,
    /// Pursuer decision; `null` for evader records.
    pub case: Option<DecisionCase>,
    pub shift: Option<f64>,
    pub v_progress: f64,
    /// Evader-side extent of the arena beyond the guard line, once guarding.
    pub band_height: Option<f64>,
    pub captured: bool,
}

pub const TRACE_FIELDS: [&str; 10] =
    ["step", "actor", "x", "y", "theta", "case", "shift", "v_progress", "band_height", "captured"];

pub fn to_json_line(record: &TraceRecord) -> String {
    serde_json::to_string(record).expect("trace records always serialize")
}

pub fn write_jsonl<W: Write>(mut out: W, records: &[TraceRecord]) -> io::Result<()> {
    for r in records {
        writeln!(out, "{}", to_json_line(r))?;
    }
    out.flush()
}

pub fn read_jsonl<R: BufRead>(input: R) -> io::Result<Vec<TraceRecord>> {
    let mut out = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?);
    }
    Ok(out)
}
