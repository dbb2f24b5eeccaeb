//! The public instance of a guest run and its canonical digest preimage.

use serde::{Deserialize, Serialize};

use crate::fixedq::FixedQ;
use crate::hash::Digest;
use crate::noise::Seed;
use crate::regression::{LinearModel, NormBounds};

pub const JOURNAL_MAGIC: &[u8; 8] = b"ADPRCPT1";
pub const JOURNAL_VERSION: u16 = 1;
pub const JOURNAL_ENCODED_LEN: usize = 8 + 2 + 32 + 32 + 32 + 8 + 32 + 8 + 8 + 8 + 1 + 1 + 8;

/// Identifies guest logic and the record/journal layouts it emits.
const PROGRAM_ID: &str = "adpr-guest/noisystats-q31.32/v1;\
record=index:u64,n:u64,sum_x:i64,sum_y:i64,sum_xx:i64,sum_xy:i64,rng_counter:u64;\
journal=ADPRCPT1/v1;noise=sha256-ctr/inverse-cdf";

pub fn program_digest() -> Digest {
    Digest::of(PROGRAM_ID.as_bytes())
}

/// Public summary of a guest run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Journal {
    pub program_digest: Digest,
    pub dataset_digest: Digest,
    pub bounds: NormBounds,
    pub eps: FixedQ,
    pub seed: Seed,
    pub n: u64,
    pub result: LinearModel,
    pub final_rng_counter: u64,
}

impl Journal {
    /// Canonical encoding: magic, version, then fields in declaration order,
    /// little-endian. Model flags are one byte each.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(JOURNAL_ENCODED_LEN);
        out.extend_from_slice(JOURNAL_MAGIC);
        out.extend_from_slice(&JOURNAL_VERSION.to_le_bytes());
        out.extend_from_slice(self.program_digest.as_bytes());
        out.extend_from_slice(self.dataset_digest.as_bytes());
        for v in [self.bounds.x_min, self.bounds.x_max, self.bounds.y_min, self.bounds.y_max, self.eps] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.extend_from_slice(&self.seed.0);
        out.extend_from_slice(&self.n.to_le_bytes());
        out.extend_from_slice(&self.result.slope.to_le_bytes());
        out.extend_from_slice(&self.result.intercept.to_le_bytes());
        out.push(self.result.noisy as u8);
        out.push(self.result.failed as u8);
        out.extend_from_slice(&self.final_rng_counter.to_le_bytes());
        out
    }

    /// Inverse of [`Journal::canonical_bytes`]. Rejects non-boolean flag bytes
    /// and unordered bounds.
    pub fn from_canonical_bytes(b: &[u8]) -> Option<Journal> {
        if b.len() != JOURNAL_ENCODED_LEN || &b[..8] != JOURNAL_MAGIC || b[8..10] != JOURNAL_VERSION.to_le_bytes() {
            return None;
        }
        let digest = |at: usize| Digest(b[at..at + 32].try_into().unwrap());
        let word = |at: usize| u64::from_le_bytes(b[at..at + 8].try_into().unwrap());
        let fixed = |at: usize| FixedQ::from_raw(word(at) as i64);
        let flag = |at: usize| match b[at] {
            0 => Some(false),
            1 => Some(true),
            _ => None,
        };
        let bounds = NormBounds::new(fixed(74), fixed(82), fixed(90), fixed(98)).ok()?;
        Some(Journal {
            program_digest: digest(10),
            dataset_digest: digest(42),
            bounds,
            eps: fixed(106),
            seed: Seed(b[114..146].try_into().unwrap()),
            n: word(146),
            result: LinearModel { slope: fixed(154), intercept: fixed(162), noisy: flag(170)?, failed: flag(171)? },
            final_rng_counter: word(172),
        })
    }

    pub fn digest(&self) -> Digest {
        Digest::of(&self.canonical_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn journal() -> Journal {
        Journal {
            program_digest: program_digest(),
            dataset_digest: Digest::of(b"data"),
            bounds: NormBounds::from_f64(18.0, 65.0, 0.0, 40_000.0).unwrap(),
            eps: FixedQ::TWO,
            seed: Seed::from_u64(42),
            n: 1400,
            result: LinearModel::private(FixedQ::from_raw(123), FixedQ::from_raw(-456)),
            final_rng_counter: 3,
        }
    }

    #[test]
    fn canonical_layout() {
        let j = journal();
        let b = j.canonical_bytes();
        assert_eq!(b.len(), JOURNAL_ENCODED_LEN);
        assert_eq!(&b[..8], b"ADPRCPT1");
        assert_eq!(&b[10..42], j.program_digest.as_bytes());
        assert_eq!(&b[146..154], &1400u64.to_le_bytes());
        assert_eq!(Journal::from_canonical_bytes(&b), Some(j));
    }

    #[test]
    fn digest_tracks_every_field() {
        let base = journal().digest();
        let mut j = journal();
        j.result.noisy = false;
        assert_ne!(j.digest(), base);
        let mut j = journal();
        j.final_rng_counter = 2;
        assert_ne!(j.digest(), base);
    }

    #[test]
    fn decode_rejects_bad_flags() {
        let mut b = journal().canonical_bytes();
        b[170] = 2;
        assert_eq!(Journal::from_canonical_bytes(&b), None);
    }
}
