//! Reproducible pass/fail records for the randomized checks.

use serde::{Deserialize, Serialize};

use crate::exact::{rationals_to_strings, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: String,
    pub seed: u64,
    pub points: Vec<Vec<String>>,
    pub pairs_checked: usize,
    pub outcome: Outcome,
    pub witnesses: Vec<String>,
    pub runtime_ms: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<serde_json::Value>,
}

impl Certificate {
    pub fn new(kind: &str, seed: u64, points: &[Vec<Rational>]) -> Self {
        Certificate {
            kind: kind.into(),
            seed,
            points: points.iter().map(|p| rationals_to_strings(p)).collect(),
            pairs_checked: 0,
            outcome: Outcome::Pass,
            witnesses: Vec::new(),
            runtime_ms: None,
            detail: None,
        }
    }

    pub fn fail(&mut self, witness: String) {
        self.outcome = Outcome::Fail;
        self.witnesses.push(witness);
    }

    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }

    pub fn with_detail(mut self, detail: serde_json::Value) -> Self {
        self.detail = Some(detail);
        self
    }
}
