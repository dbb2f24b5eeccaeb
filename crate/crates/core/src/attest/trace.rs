//! Deterministic guest execution and its per-step trace.

use serde::{Deserialize, Serialize};

use super::journal::{program_digest, Journal};
use super::ProveError;
use crate::dataio::BlobView;
use crate::hash::Digest;
use crate::regression::{noisystats_fit_seeded, Accumulators, PrivacyParams};

/// Accumulator state after one guest step.
///
/// Records `0..n` are ingestion steps; record `n` is finalization and is the
/// only one with a nonzero `rng_counter`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub index: u64,
    pub acc: Accumulators,
    pub rng_counter: u64,
}

impl TraceRecord {
    pub const ENCODED_LEN: usize = 56;

    /// Fixed-width little-endian encoding, fields in declaration order.
    pub fn to_bytes(&self) -> [u8; Self::ENCODED_LEN] {
        let mut out = [0u8; Self::ENCODED_LEN];
        let words = [
            self.index,
            self.acc.n,
            self.acc.sum_x.raw() as u64,
            self.acc.sum_y.raw() as u64,
            self.acc.sum_xx.raw() as u64,
            self.acc.sum_xy.raw() as u64,
            self.rng_counter,
        ];
        for (chunk, w) in out.chunks_exact_mut(8).zip(words) {
            chunk.copy_from_slice(&w.to_le_bytes());
        }
        out
    }

    pub fn leaf_digest(&self) -> Digest {
        Digest::of(&self.to_bytes())
    }
}

/// Output of one guest run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuestRun {
    pub journal: Journal,
    pub trace: Vec<TraceRecord>,
}

/// Runs the guest over a blob: verified load, one ingestion record per
/// sample in blob order, NoisyStats, then the finalization record.
pub fn execute_guest(blob: &[u8], params: &PrivacyParams) -> Result<GuestRun, ProveError> {
    let view = BlobView::open(blob)?;
    let n = view.len();
    let mut trace = Vec::with_capacity(n as usize + 1);
    let mut acc = Accumulators::new();
    for (i, sample) in view.iter().enumerate() {
        acc = acc.ingest(sample)?;
        trace.push(TraceRecord { index: i as u64, acc, rng_counter: 0 });
    }
    let release = noisystats_fit_seeded(&acc, params)?;
    trace.push(TraceRecord { index: n, acc, rng_counter: release.draws });
    let journal = Journal {
        program_digest: program_digest(),
        dataset_digest: view.digest(),
        bounds: view.bounds(),
        eps: params.eps,
        seed: params.seed,
        n,
        result: release.model,
        final_rng_counter: release.draws,
    };
    Ok(GuestRun { journal, trace })
}
