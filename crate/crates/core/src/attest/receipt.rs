use serde::{Deserialize, Serialize};

use super::journal::Journal;
use super::trace::TraceRecord;
use crate::hash::Digest;

/// A committed trace record with its authentication path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeafOpening {
    pub record: TraceRecord,
    pub path: Vec<Digest>,
}

/// A sampled record plus its predecessor, enough to check one transition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Opening {
    pub leaf: LeafOpening,
    /// Absent only for index 0, whose predecessor is the empty accumulator.
    pub prev: Option<LeafOpening>,
}

/// The attestation artifact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Receipt {
    pub backend: String,
    pub journal: Journal,
    pub journal_digest: Digest,
    pub trace_root: Digest,
    pub trace_len: u64,
    /// One per Fiat-Shamir query, in query order; duplicates are kept.
    pub openings: Vec<Opening>,
    /// Always present; the result check runs against it.
    pub final_opening: LeafOpening,
}

impl Receipt {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("receipt serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// Number of sampled openings for a trace of `m` records: `max(1, ceil(log2 m))`.
pub fn query_count(m: u64) -> usize {
    super::merkle::depth(m).max(1)
}

/// Query `j`: `SHA-256(root || journal_digest || j_le) mod m`.
pub fn query_index(root: &Digest, journal_digest: &Digest, j: u64, m: u64) -> u64 {
    Digest::of_parts(&[root.as_bytes(), journal_digest.as_bytes(), &j.to_le_bytes()]).prefix_u64() % m
}

pub fn query_indices(root: &Digest, journal_digest: &Digest, m: u64) -> Vec<u64> {
    (0..query_count(m) as u64).map(|j| query_index(root, journal_digest, j, m)).collect()
}
