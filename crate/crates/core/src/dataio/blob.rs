//! The embedded-bytes dataset format.
//!
//! Layout, little-endian throughout:
//!
//! | offset     | size   | field                                   |
//! |------------|--------|-----------------------------------------|
//! | 0          | 8      | magic `ADPR0001`                        |
//! | 8          | 2      | version (`u16`, currently 1)            |
//! | 10         | 8      | record count `n` (`u64`)                |
//! | 18         | 32     | bounds x_min, x_max, y_min, y_max (raw) |
//! | 50         | 16 n   | records: x raw `i64`, y raw `i64`       |
//! | 50 + 16 n  | 32     | SHA-256 of every preceding byte         |
//!
//! A [`BlobView`] never parses records up front. After the header and
//! length checks (and, for [`BlobView::open`], the digest pass) each record
//! is read in place by index.

use crate::fixedq::FixedQ;
use crate::hash::Digest;
use crate::regression::{NormBounds, SamplePair};

use super::{DataError, Dataset};

pub const BLOB_MAGIC: &[u8; 8] = b"ADPR0001";
pub const BLOB_VERSION: u16 = 1;
pub const BLOB_HEADER_LEN: usize = 50;
pub const RECORD_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BlobError {
    #[error("bad magic")]
    BadMagic,
    #[error("unsupported version {0}")]
    BadVersion(u16),
    #[error("blob truncated or has trailing bytes: expected {expected} bytes, got {actual}")]
    Length { expected: u64, actual: u64 },
    #[error("invalid bounds in header")]
    BadBounds,
    #[error("digest mismatch")]
    DigestMismatch,
    #[error("blob holds no records")]
    Empty,
}

/// Zero-parse view over a blob's bytes.
#[derive(Debug, Clone, Copy)]
pub struct BlobView<'a> {
    payload: &'a [u8],
    prefix: &'a [u8],
    n: u64,
    bounds: NormBounds,
    digest: Digest,
}

fn read_u64(b: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(b[at..at + 8].try_into().unwrap())
}

fn read_fixed(b: &[u8], at: usize) -> FixedQ {
    FixedQ::from_le_bytes(b[at..at + 8].try_into().unwrap())
}

impl<'a> BlobView<'a> {
    /// Header and length checks plus the digest pass.
    pub fn open(bytes: &'a [u8]) -> Result<Self, BlobError> {
        let view = Self::open_unverified(bytes)?;
        if Digest::of(view.prefix) != view.digest {
            return Err(BlobError::DigestMismatch);
        }
        Ok(view)
    }

    /// Header and length checks only; constant work regardless of `n`.
    ///
    /// For callers that have already established the blob's integrity, e.g.
    /// a consumer re-reading a blob it packed itself.
    pub fn open_unverified(bytes: &'a [u8]) -> Result<Self, BlobError> {
        if bytes.len() < BLOB_HEADER_LEN + Digest::LEN {
            return Err(BlobError::Length {
                expected: (BLOB_HEADER_LEN + Digest::LEN) as u64,
                actual: bytes.len() as u64,
            });
        }
        if &bytes[..8] != BLOB_MAGIC {
            return Err(BlobError::BadMagic);
        }
        let version = u16::from_le_bytes([bytes[8], bytes[9]]);
        if version != BLOB_VERSION {
            return Err(BlobError::BadVersion(version));
        }
        let n = read_u64(bytes, 10);
        let expected = n
            .checked_mul(RECORD_LEN as u64)
            .and_then(|p| p.checked_add((BLOB_HEADER_LEN + Digest::LEN) as u64));
        if expected != Some(bytes.len() as u64) {
            return Err(BlobError::Length { expected: expected.unwrap_or(u64::MAX), actual: bytes.len() as u64 });
        }
        if n == 0 {
            return Err(BlobError::Empty);
        }
        let bounds = NormBounds::new(
            read_fixed(bytes, 18),
            read_fixed(bytes, 26),
            read_fixed(bytes, 34),
            read_fixed(bytes, 42),
        )
        .map_err(|_| BlobError::BadBounds)?;
        let split = bytes.len() - Digest::LEN;
        Ok(BlobView {
            payload: &bytes[BLOB_HEADER_LEN..split],
            prefix: &bytes[..split],
            n,
            bounds,
            digest: Digest(bytes[split..].try_into().unwrap()),
        })
    }

    pub fn len(&self) -> u64 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn bounds(&self) -> NormBounds {
        self.bounds
    }

    /// The trailing digest, which doubles as the dataset commitment.
    pub fn digest(&self) -> Digest {
        self.digest
    }

    /// Record `i`, read in place. Panics if `i >= len()`.
    #[inline]
    pub fn sample(&self, i: u64) -> SamplePair {
        let at = i as usize * RECORD_LEN;
        SamplePair::new(read_fixed(self.payload, at), read_fixed(self.payload, at + 8))
    }

    pub fn get(&self, i: u64) -> Option<SamplePair> {
        (i < self.n).then(|| self.sample(i))
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = SamplePair> + 'a {
        self.payload
            .chunks_exact(RECORD_LEN)
            .map(|c| SamplePair::new(read_fixed(c, 0), read_fixed(c, 8)))
    }

    pub fn to_dataset(&self) -> Dataset {
        Dataset { bounds: self.bounds, samples: self.iter().collect() }
    }
}

pub fn pack_blob(dataset: &Dataset) -> Result<Vec<u8>, DataError> {
    if dataset.is_empty() {
        return Err(DataError::EmptyInput);
    }
    let n = dataset.samples.len();
    let mut out = Vec::with_capacity(BLOB_HEADER_LEN + RECORD_LEN * n + Digest::LEN);
    out.extend_from_slice(BLOB_MAGIC);
    out.extend_from_slice(&BLOB_VERSION.to_le_bytes());
    out.extend_from_slice(&(n as u64).to_le_bytes());
    let b = &dataset.bounds;
    for v in [b.x_min, b.x_max, b.y_min, b.y_max] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for s in &dataset.samples {
        out.extend_from_slice(&s.x.to_le_bytes());
        out.extend_from_slice(&s.y.to_le_bytes());
    }
    let digest = Digest::of(&out);
    out.extend_from_slice(digest.as_bytes());
    Ok(out)
}

/// Verified load, materialized into an owned [`Dataset`].
pub fn load_blob(bytes: &[u8]) -> Result<Dataset, DataError> {
    Ok(BlobView::open(bytes)?.to_dataset())
}
