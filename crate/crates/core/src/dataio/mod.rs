//! Dataset ingestion: CSV, the embedded-bytes blob, and a synthetic generator.

mod blob;
mod csv;
mod synth;

use crate::regression::{NormBounds, SamplePair};

pub use self::blob::{load_blob, pack_blob, BlobError, BlobView, BLOB_HEADER_LEN, BLOB_MAGIC, BLOB_VERSION, RECORD_LEN};
pub use self::csv::{load_csv, read_csv, write_csv};
pub use self::synth::{gen_synthetic, SynthSpec};

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] ::csv::Error),
    #[error("column {0:?} not found in header")]
    MissingColumn(String),
    #[error("row {row}: cannot parse {column} value {value:?}")]
    Parse { row: usize, column: String, value: String },
    #[error("row {row}: value ({x}, {y}) lies outside the normalization bounds")]
    OutOfBounds { row: usize, x: f64, y: f64 },
    #[error("dataset is empty")]
    EmptyInput,
    #[error(transparent)]
    Blob(#[from] BlobError),
}

/// One raw observation before normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawRecord {
    pub x_raw: f64,
    pub y_raw: f64,
}

/// Normalized samples plus the bounds that produced them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub bounds: NormBounds,
    pub samples: Vec<SamplePair>,
}

impl Dataset {
    /// Normalizes `records` into the unit box; rows are zero-based.
    pub fn from_raw(records: &[RawRecord], bounds: NormBounds) -> Result<Self, DataError> {
        if records.is_empty() {
            return Err(DataError::EmptyInput);
        }
        let samples = records
            .iter()
            .enumerate()
            .map(|(row, r)| match (bounds.normalize_x(r.x_raw), bounds.normalize_y(r.y_raw)) {
                (Some(x), Some(y)) => Ok(SamplePair::new(x, y)),
                _ => Err(DataError::OutOfBounds { row, x: r.x_raw, y: r.y_raw }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Dataset { bounds, samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Contiguous sub-dataset sharing the same bounds.
    pub fn slice(&self, offset: usize, len: usize) -> Dataset {
        Dataset { bounds: self.bounds, samples: self.samples[offset..offset + len].to_vec() }
    }
}
