//! Trace events and their JSONL encoding.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::lang::SensorName;

/// Virtual time in nanoseconds. Integer time keeps `busy_until` comparisons
/// exact no matter how many steps have been taken.
pub type Nanos = u64;

pub const NANOS_PER_SEC: f64 = 1e9;

pub fn secs_to_nanos(secs: f64) -> Nanos {
    if secs <= 0.0 || secs.is_nan() {
        0
    } else {
        (secs * NANOS_PER_SEC).round().min(u64::MAX as f64) as Nanos
    }
}

pub fn nanos_to_secs(ns: Nanos) -> f64 {
    ns as f64 / NANOS_PER_SEC
}

/// One line of a trace: `{"t": .., "kind": .., ...payload}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub t: f64,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum EventKind {
    Ack {
        setup: String,
    },
    MotorSet {
        left: f64,
        right: f64,
    },
    SensorSample {
        sensor: SensorName,
        value: f64,
    },
    Beep,
    LoopIter {
        iteration: u64,
        /// `None` for `LOOP(FOREVER)`.
        count: Option<u64>,
    },
    Preempted,
    Error {
        code: String,
        message: String,
        offset: usize,
    },
    Done,
    Warning {
        message: String,
        offset: usize,
    },
    /// Emitted by the simulation driver when the robot body touches an
    /// obstacle.
    Collision {
        x: f64,
        y: f64,
    },
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::Ack { .. } => "Ack",
            EventKind::MotorSet { .. } => "MotorSet",
            EventKind::SensorSample { .. } => "SensorSample",
            EventKind::Beep => "Beep",
            EventKind::LoopIter { .. } => "LoopIter",
            EventKind::Preempted => "Preempted",
            EventKind::Error { .. } => "Error",
            EventKind::Done => "Done",
            EventKind::Warning { .. } => "Warning",
            EventKind::Collision { .. } => "Collision",
        }
    }
}

impl TraceEvent {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("trace events always serialize")
    }
}

pub fn write_jsonl<W: Write>(mut out: W, events: &[TraceEvent]) -> io::Result<()> {
    for event in events {
        writeln!(out, "{}", event.to_json_line())?;
    }
    Ok(())
}

pub fn read_jsonl<R: BufRead>(input: R) -> io::Result<Vec<TraceEvent>> {
    let mut events = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let event = serde_json::from_str(&line).map_err(|e| {
            io::Error::new(io::ErrorKind::InvalidData, format!("line {}: {e}", i + 1))
        })?;
        events.push(event);
    }
    Ok(events)
}

pub fn count_by_kind<'a>(
    events: impl IntoIterator<Item = &'a TraceEvent>,
) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for e in events {
        *counts.entry(e.kind.name().to_string()).or_insert(0) += 1;
    }
    counts
}
