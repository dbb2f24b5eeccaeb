use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::{DataError, Dataset, RawRecord};
use crate::regression::NormBounds;

pub fn load_csv(path: impl AsRef<Path>, x_col: &str, y_col: &str, bounds: NormBounds) -> Result<Dataset, DataError> {
    read_csv(File::open(path)?, x_col, y_col, bounds)
}

/// Reads the two named numeric columns and normalizes them. Row numbers in
/// errors count data rows from zero, excluding the header.
pub fn read_csv<R: Read>(reader: R, x_col: &str, y_col: &str, bounds: NormBounds) -> Result<Dataset, DataError> {
    let mut rdr = ::csv::ReaderBuilder::new().has_headers(true).trim(::csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| DataError::MissingColumn(name.to_owned()))
    };
    let (xi, yi) = (find(x_col)?, find(y_col)?);

    let mut records = Vec::new();
    let mut rec = ::csv::StringRecord::new();
    let mut row = 0usize;
    while rdr.read_record(&mut rec)? {
        let cell = |idx: usize, name: &str| -> Result<f64, DataError> {
            let raw = rec.get(idx).unwrap_or("");
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| DataError::Parse { row, column: name.to_owned(), value: raw.to_owned() })
        };
        records.push(RawRecord { x_raw: cell(xi, x_col)?, y_raw: cell(yi, y_col)? });
        row += 1;
    }
    Dataset::from_raw(&records, bounds)
}

pub fn write_csv<W: Write>(writer: W, x_name: &str, y_name: &str, records: &[RawRecord]) -> Result<(), DataError> {
    let mut w = ::csv::Writer::from_writer(writer);
    w.write_record([x_name, y_name])?;
    for r in records {
        w.write_record([r.x_raw.to_string(), r.y_raw.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
