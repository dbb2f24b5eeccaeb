//! `transcript-v1`: Merkle-committed semantic trace with Fiat-Shamir spot checks.
//!
//! This backend gives statistical tamper evidence on a committed trace. It
//! does not protect against a prover that commits an internally consistent
//! trace of some other computation; that needs a real proof system behind
//! the [`AttestationBackend`] seam.

use rayon::prelude::*;

use super::backend::AttestationBackend;
use super::journal::{program_digest, Journal};
use super::merkle::{verify_path, MerkleTree};
use super::receipt::{query_count, query_index, query_indices, LeafOpening, Opening, Receipt};
use super::trace::{execute_guest, TraceRecord};
use super::{ProveError, RejectReason};
use crate::dataio::BlobView;
use crate::hash::Digest;
use crate::regression::{noisystats_fit_seeded, Accumulators, PrivacyParams};

pub const TRANSCRIPT_V1: &str = "transcript-v1";

const PAR_LEAVES: usize = 4096;

#[derive(Debug, Clone, Copy, Default)]
pub struct TranscriptBackend;

impl TranscriptBackend {
    /// Commits `trace` and opens the Fiat-Shamir queries. Exposed so tests
    /// can recommit a doctored trace the way a cheating prover would.
    pub fn commit(&self, journal: Journal, trace: &[TraceRecord]) -> Receipt {
        let leaves: Vec<Digest> = if trace.len() >= PAR_LEAVES {
            trace.par_iter().map(TraceRecord::leaf_digest).collect()
        } else {
            trace.iter().map(TraceRecord::leaf_digest).collect()
        };
        let tree = MerkleTree::commit(leaves);
        let root = tree.root();
        let m = trace.len() as u64;
        let journal_digest = journal.digest();
        let open = |i: u64| LeafOpening { record: trace[i as usize], path: tree.path(i as usize) };
        let openings = query_indices(&root, &journal_digest, m)
            .into_iter()
            .map(|i| Opening { leaf: open(i), prev: i.checked_sub(1).map(open) })
            .collect();
        Receipt {
            backend: TRANSCRIPT_V1.to_owned(),
            journal,
            journal_digest,
            trace_root: root,
            trace_len: m,
            openings,
            final_opening: open(m - 1),
        }
    }
}

impl AttestationBackend for TranscriptBackend {
    fn id(&self) -> &'static str {
        TRANSCRIPT_V1
    }

    fn program_digest(&self) -> Digest {
        program_digest()
    }

    fn prove(&self, blob: &[u8], params: &PrivacyParams) -> Result<Receipt, ProveError> {
        let run = execute_guest(blob, params)?;
        Ok(self.commit(run.journal, &run.trace))
    }

    fn verify(&self, receipt: &Receipt, blob: &BlobView<'_>) -> Result<(), RejectReason> {
        use RejectReason::*;

        if receipt.backend != TRANSCRIPT_V1 {
            return Err(Backend);
        }
        let journal = &receipt.journal;
        let journal_digest = journal.digest();
        if journal_digest != receipt.journal_digest {
            return Err(JournalDigest);
        }
        if journal.dataset_digest != blob.digest() || journal.bounds != blob.bounds() || journal.n != blob.len() {
            return Err(DatasetDigest);
        }
        if journal.program_digest != program_digest() {
            return Err(ProgramDigest);
        }
        let m = receipt.trace_len;
        let n = journal.n;
        if m != n + 1 || receipt.openings.len() != query_count(m) {
            return Err(Malformed);
        }

        for (j, op) in receipt.openings.iter().enumerate() {
            if op.leaf.record.index != query_index(&receipt.trace_root, &journal_digest, j as u64, m) {
                return Err(FiatShamir);
            }
        }

        let root = &receipt.trace_root;
        let authentic = |o: &LeafOpening| verify_path(root, m, o.record.index, &o.record.leaf_digest(), &o.path);
        for op in &receipt.openings {
            let i = op.leaf.record.index;
            match (&op.prev, i) {
                (None, 0) => {}
                (Some(p), i) if i > 0 && p.record.index == i - 1 => {
                    if !authentic(p) {
                        return Err(MerklePath);
                    }
                }
                _ => return Err(Malformed),
            }
            if !authentic(&op.leaf) {
                return Err(MerklePath);
            }
        }

        for op in &receipt.openings {
            check_transition(op, blob, journal)?;
        }

        let fin = &receipt.final_opening;
        if fin.record.index != m - 1 {
            return Err(Malformed);
        }
        if !authentic(fin) {
            return Err(MerklePath);
        }
        check_result(&fin.record, journal)
    }
}

fn check_transition(op: &Opening, blob: &BlobView<'_>, journal: &Journal) -> Result<(), RejectReason> {
    let rec = &op.leaf.record;
    let prev = op.prev.as_ref().map(|p| &p.record);
    let ok = if rec.index < journal.n {
        let before = match prev {
            None => Accumulators::new(),
            Some(p) if p.rng_counter == 0 => p.acc,
            Some(_) => return Err(RejectReason::Transition),
        };
        rec.rng_counter == 0 && before.ingest(blob.sample(rec.index)).is_ok_and(|after| after == rec.acc)
    } else {
        prev.is_some_and(|p| p.acc == rec.acc) && rec.rng_counter == journal.final_rng_counter
    };
    if ok {
        Ok(())
    } else {
        Err(RejectReason::Transition)
    }
}

fn check_result(fin: &TraceRecord, journal: &Journal) -> Result<(), RejectReason> {
    if fin.acc.n != journal.n || fin.rng_counter != journal.final_rng_counter {
        return Err(RejectReason::Result);
    }
    let params = PrivacyParams::new(journal.eps, journal.seed).map_err(|_| RejectReason::Result)?;
    match noisystats_fit_seeded(&fin.acc, &params) {
        Ok(r) if r.model == journal.result && r.draws == journal.final_rng_counter => Ok(()),
        _ => Err(RejectReason::Result),
    }
}
