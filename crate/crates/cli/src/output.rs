//! Machine-readable records printed by the CLI.
//!
//! JSON output is one compact object per line. Field order is fixed by
//! these structs, so deserializing a line and serializing it again
//! reproduces it byte for byte.

use std::collections::BTreeMap;

use sandpile_core::{Classification, CycleConfig, Residue, StabilizationOutcome, TraceStep};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulateRecord {
    pub policy: String,
    pub trace: Vec<TraceRow>,
    pub outcome: StabilizationOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRow {
    pub step: usize,
    pub fired: Vec<usize>,
    pub state: CycleConfig,
}

impl TraceRow {
    pub fn from_trace(trace: Vec<TraceStep>) -> Vec<TraceRow> {
        trace
            .into_iter()
            .enumerate()
            .map(|(step, t)| TraceRow {
                step,
                fired: t.fired,
                state: t.state,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyRecord {
    pub config: CycleConfig,
    pub classifications: Vec<Classification>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerateRecord {
    pub config: CycleConfig,
    pub invariant: Residue,
    /// Minimal reverse depth; `None` for configurations outside the
    /// reverse-reachable set.
    pub depth: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<CycleConfig>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramRecord {
    pub n: usize,
    pub k: u32,
    pub residue_histogram: BTreeMap<Residue, u64>,
    /// Residue of the all-ones configuration, reported when `k == n`.
    pub terminal_residue: Option<Residue>,
}
