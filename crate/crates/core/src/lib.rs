//! Differentially private simple linear regression with attested execution.
//!
//! Arithmetic is signed Q31.32 fixed point ([`FixedQ`]); noise is drawn from a
//! counter-mode SHA-256 stream so a verifier can replay every draw. A guest run
//! over a packed dataset produces a [`Receipt`] that commits to the
//! per-record accumulator trace.

pub mod attest;
pub mod dataio;
pub mod fixedq;
pub mod hash;
pub mod noise;
pub mod pipeline;
pub mod regression;

pub use attest::{prove, verify, AttestationBackend, Journal, ProveError, Receipt, RejectReason};
pub use dataio::{BlobView, DataError, Dataset};
pub use fixedq::{ArithError, FixedQ};
pub use hash::Digest;
pub use noise::{NoiseStream, Seed, UniformSource};
pub use regression::{Accumulators, LinearModel, NormBounds, PrivacyParams, RegressionError, SamplePair};
