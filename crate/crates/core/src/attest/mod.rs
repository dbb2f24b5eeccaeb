//! Guest execution, receipts, and receipt verification.

mod backend;
mod journal;
pub mod merkle;
mod receipt;
mod trace;
mod transcript;

use std::fmt;

pub use backend::{backend, default_backend, registered_backends, AttestationBackend, UnknownBackend, DEFAULT_BACKEND};
pub use journal::{program_digest, Journal, JOURNAL_ENCODED_LEN, JOURNAL_MAGIC, JOURNAL_VERSION};
pub use receipt::{query_count, query_index, query_indices, LeafOpening, Opening, Receipt};
pub use trace::{execute_guest, GuestRun, TraceRecord};
pub use transcript::{TranscriptBackend, TRANSCRIPT_V1};

use crate::dataio::{BlobError, BlobView};
use crate::fixedq::ArithError;
use crate::regression::{PrivacyParams, RegressionError};

/// Guest failure; no receipt is produced.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProveError {
    #[error("blob: {0}")]
    Blob(#[from] BlobError),
    #[error("guest computation: {0}")]
    Compute(#[from] RegressionError),
}

impl From<ArithError> for ProveError {
    fn from(e: ArithError) -> Self {
        ProveError::Compute(e.into())
    }
}

/// Why a receipt was rejected. [`RejectReason::token`] is stable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RejectReason {
    Backend,
    JournalDigest,
    DatasetDigest,
    ProgramDigest,
    Malformed,
    FiatShamir,
    MerklePath,
    Transition,
    Result,
}

impl RejectReason {
    pub fn token(&self) -> &'static str {
        match self {
            RejectReason::Backend => "backend",
            RejectReason::JournalDigest => "journal-digest",
            RejectReason::DatasetDigest => "dataset-digest",
            RejectReason::ProgramDigest => "program-digest",
            RejectReason::Malformed => "malformed",
            RejectReason::FiatShamir => "fiat-shamir",
            RejectReason::MerklePath => "merkle-path",
            RejectReason::Transition => "transition",
            RejectReason::Result => "result",
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "reject({})", self.token())
    }
}

impl std::error::Error for RejectReason {}

/// Proves with the default backend.
pub fn prove(blob: &[u8], params: &PrivacyParams) -> Result<Receipt, ProveError> {
    default_backend().prove(blob, params)
}

/// Verifies with the backend named in the receipt.
pub fn verify(receipt: &Receipt, blob: &BlobView<'_>) -> Result<(), RejectReason> {
    backend(&receipt.backend).map_err(|_| RejectReason::Backend)?.verify(receipt, blob)
}
