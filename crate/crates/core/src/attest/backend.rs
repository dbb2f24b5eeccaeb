use super::receipt::Receipt;
use super::transcript::{TranscriptBackend, TRANSCRIPT_V1};
use super::{ProveError, RejectReason};
use crate::dataio::BlobView;
use crate::hash::Digest;
use crate::regression::PrivacyParams;

/// A proving system for the guest. Every implementation must accept its own
/// honest receipts and reject tampered journals.
pub trait AttestationBackend: Send + Sync {
    fn id(&self) -> &'static str;

    /// Digest of the guest logic this backend attests to.
    fn program_digest(&self) -> Digest;

    fn prove(&self, blob: &[u8], params: &PrivacyParams) -> Result<Receipt, ProveError>;

    /// `blob` must be the dataset the caller commissioned, already opened.
    fn verify(&self, receipt: &Receipt, blob: &BlobView<'_>) -> Result<(), RejectReason>;
}

pub const DEFAULT_BACKEND: &str = TRANSCRIPT_V1;

static TRANSCRIPT: TranscriptBackend = TranscriptBackend;
static REGISTRY: [&dyn AttestationBackend; 1] = [&TRANSCRIPT];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown attestation backend {0:?}")]
pub struct UnknownBackend(pub String);

pub fn registered_backends() -> &'static [&'static dyn AttestationBackend] {
    &REGISTRY
}

pub fn backend(name: &str) -> Result<&'static dyn AttestationBackend, UnknownBackend> {
    REGISTRY
        .iter()
        .copied()
        .find(|b| b.id() == name)
        .ok_or_else(|| UnknownBackend(name.to_owned()))
}

pub fn default_backend() -> &'static dyn AttestationBackend {
    &TRANSCRIPT
}
