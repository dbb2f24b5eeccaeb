mod common;

use std::fs;

use adpr_core::dataio::{
    gen_synthetic, load_blob, load_csv, pack_blob, read_csv, write_csv, BlobError, BlobView, DataError, Dataset,
    RawRecord, SynthSpec, BLOB_HEADER_LEN,
};
use adpr_core::regression::{ols_fit, Accumulators, NormBounds};
use adpr_core::FixedQ;

fn decade_bounds() -> NormBounds {
    NormBounds::from_f64(0.0, 100.0, 0.0, 1000.0).unwrap()
}

#[test]
fn three_rows_map_linearly() {
    let d = read_csv("age,cost\n0,10\n50,20\n100,30\n".as_bytes(), "age", "cost", decade_bounds()).unwrap();
    let xs: Vec<FixedQ> = d.samples.iter().map(|s| s.x).collect();
    assert_eq!(xs, vec![FixedQ::ZERO, FixedQ::HALF, FixedQ::ONE]);
}

#[test]
fn ingestion_errors_name_the_row() {
    let b = decade_bounds();
    assert!(matches!(read_csv("age,cost\n".as_bytes(), "age", "cost", b), Err(DataError::EmptyInput)));
    assert!(matches!(read_csv("".as_bytes(), "age", "cost", b), Err(DataError::MissingColumn(_))));
    assert!(matches!(read_csv("age,bill\n1,2\n".as_bytes(), "age", "cost", b), Err(DataError::MissingColumn(c)) if c == "cost"));
    match read_csv("age,cost\n1,2\n3,abc\n".as_bytes(), "age", "cost", b) {
        Err(DataError::Parse { row: 1, column, value }) => assert_eq!((column.as_str(), value.as_str()), ("cost", "abc")),
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        read_csv("age,cost\n1,2\n3,4\n101,5\n".as_bytes(), "age", "cost", b),
        Err(DataError::OutOfBounds { row: 2, .. })
    ));
    assert!(matches!(read_csv("age,cost\nNaN,1\n".as_bytes(), "age", "cost", b), Err(DataError::Parse { row: 0, .. })));
}

#[test]
fn extra_columns_and_whitespace() {
    let csv = "id, cost , age\n7, 500 ,25\n8,1000, 100\n";
    let d = read_csv(csv.as_bytes(), "age", "cost", decade_bounds()).unwrap();
    assert_eq!(d.samples[1].x, FixedQ::ONE);
    assert_eq!(d.samples[1].y, FixedQ::ONE);
    assert_eq!(d.samples[0].y, FixedQ::HALF);
}

#[test]
fn normalization_is_monotone_with_exact_endpoints() {
    let b = NormBounds::from_f64(18.0, 65.0, 0.0, 40_000.0).unwrap();
    assert_eq!(b.normalize_x(18.0), Some(FixedQ::ZERO));
    assert_eq!(b.normalize_x(65.0), Some(FixedQ::ONE));
    assert_eq!(b.normalize_y(40_000.0), Some(FixedQ::ONE));
    assert_eq!(b.normalize_x(17.0), None);
    let mut prev = FixedQ::ZERO;
    for i in 0..=4700 {
        let v = b.normalize_x(18.0 + i as f64 / 100.0).unwrap();
        assert!(v >= prev);
        prev = v;
    }
}

#[test]
fn csv_and_blob_paths_agree_at_scale() {
    let spec = SynthSpec::age_cost(50_000, 41);
    let records = gen_synthetic(&spec);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("data.csv");
    write_csv(fs::File::create(&path).unwrap(), "age", "cost", &records).unwrap();

    let from_csv = load_csv(&path, "age", "cost", spec.bounds).unwrap();
    let direct = Dataset::from_raw(&records, spec.bounds).unwrap();
    assert_eq!(from_csv, direct);

    let blob = pack_blob(&from_csv).unwrap();
    assert_eq!(blob.len(), BLOB_HEADER_LEN + 16 * 50_000 + 32);
    assert_eq!(load_blob(&blob).unwrap(), from_csv);
    let view = BlobView::open(&blob).unwrap();
    assert_eq!(view.len(), 50_000);
    assert_eq!(view.sample(12_345), from_csv.samples[12_345]);
    assert_eq!(view.bounds(), spec.bounds);
}

#[test]
fn same_seed_same_file() {
    let spec = SynthSpec::age_cost(2000, 42);
    let write = || {
        let mut buf = Vec::new();
        write_csv(&mut buf, "age", "cost", &gen_synthetic(&spec)).unwrap();
        buf
    };
    assert_eq!(write(), write());
}

#[test]
fn noiseless_generator_is_collinear() {
    let bounds = NormBounds::from_f64(0.0, 10.0, 0.0, 100.0).unwrap();
    let spec = SynthSpec { n: 1000, seed: 43, slope: 7.0, intercept: 12.0, noise_sd: 0.0, bounds };
    let d = Dataset::from_raw(&gen_synthetic(&spec), bounds).unwrap();
    let m = adpr_core::regression::denormalize(&ols_fit(&Accumulators::ingest_all(&d.samples).unwrap()).unwrap(), &bounds).unwrap();
    assert!((m.slope.to_f64() - 7.0).abs() < 1e-4);
    assert!((m.intercept.to_f64() - 12.0).abs() < 1e-4);
}

#[test]
fn generator_slope_within_three_standard_errors() {
    let spec = SynthSpec::age_cost(50_000, 44);
    let records = gen_synthetic(&spec);
    let n = records.len() as f64;
    let mx = records.iter().map(|r| r.x_raw).sum::<f64>() / n;
    let my = records.iter().map(|r| r.y_raw).sum::<f64>() / n;
    let sxx: f64 = records.iter().map(|r| (r.x_raw - mx).powi(2)).sum();
    let sxy: f64 = records.iter().map(|r| (r.x_raw - mx) * (r.y_raw - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = records.iter().map(|r| (r.y_raw - intercept - slope * r.x_raw).powi(2)).sum();
    let se = (ssr / (n - 2.0) / sxx).sqrt();
    assert!((slope - spec.slope).abs() < 3.0 * se, "slope {slope}, se {se}");
}

#[test]
fn blob_rejects_damage() {
    let d = Dataset::from_raw(&[RawRecord { x_raw: 1.0, y_raw: 2.0 }, RawRecord { x_raw: 3.0, y_raw: 4.0 }], decade_bounds()).unwrap();
    let blob = pack_blob(&d).unwrap();
    let mut flipped = blob.clone();
    flipped[BLOB_HEADER_LEN + 3] ^= 0x10;
    assert!(matches!(load_blob(&flipped), Err(DataError::Blob(BlobError::DigestMismatch))));
    assert!(matches!(BlobView::open(&blob[..blob.len() - 1]), Err(BlobError::Length { .. })));
    let mut magic = blob.clone();
    magic[0] = b'X';
    assert!(matches!(BlobView::open(&magic), Err(BlobError::BadMagic)));
    assert!(pack_blob(&Dataset { bounds: decade_bounds(), samples: vec![] }).is_err());
}
