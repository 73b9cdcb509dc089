//! The JSONL record emitted by every experiment.

use serde::{Deserialize, Serialize};

/// One replayable measurement. The `seed` field holds the replica's root
/// seed: every random stream the replica used is derived from it by a fixed
/// purpose label, so (experiment, parameters, seed) determines `value`
/// bitwise. `elapsed_ms` is informational and excluded from replay checks.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ExperimentRecord {
    pub experiment: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraint: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<String>,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalized: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    pub elapsed_ms: u64,
}

impl ExperimentRecord {
    /// Bare record with every optional parameter unset.
    pub fn new(experiment: &str, seed: u64, value: f64) -> Self {
        ExperimentRecord {
            experiment: experiment.to_owned(),
            ensemble: None,
            n: None,
            gamma: None,
            a: None,
            b: None,
            beta: None,
            t: None,
            seed,
            objective: None,
            constraint: None,
            solver: None,
            value,
            normalized: None,
            stderr: None,
            elapsed_ms: 0,
        }
    }
}
