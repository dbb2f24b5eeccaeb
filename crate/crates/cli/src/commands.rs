use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use adpr_core::attest::{backend, Receipt};
use adpr_core::dataio::{gen_synthetic, load_blob, pack_blob, read_csv, write_csv, Dataset, SynthSpec, BLOB_MAGIC};
use adpr_core::pipeline::{
    aggregate_receipts, compare_models, plan_batches, progression_report, prove_all, run_bench, write_accuracy_csv,
    write_progression_csv, write_timing_csv, BenchConfig,
};
use adpr_core::regression::denormalize;
use adpr_core::{BlobView, PrivacyParams, RejectReason};
use anyhow::{bail, ensure, Context, Result};
use log::{info, warn};
use serde::Serialize;
use serde_json::json;

use crate::args::{AggregateArgs, BenchArgs, Bounds, CompareArgs, GenDataArgs, PackDataArgs, ProveArgs, VerifyArgs};

fn prepare(out: &Path, name: &str, args: &impl Serialize) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("creating output directory {}", out.display()))?;
    let config = json!({ "subcommand": name, "out": out, "args": args });
    write_json(&out.join(format!("{name}.config.json")), &config)
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

/// A packed blob is recognised by its magic; anything else is read as CSV.
fn load_dataset(path: &Path, x_col: &str, y_col: &str, bounds: Option<Bounds>) -> Result<Dataset> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    if bytes.starts_with(BLOB_MAGIC) {
        if bounds.is_some() {
            warn!("--bounds ignored: {} is a blob and carries its own bounds", path.display());
        }
        return load_blob(&bytes).with_context(|| format!("loading blob {}", path.display()));
    }
    let Some(b) = bounds else {
        bail!("--bounds is required when --data is a CSV file");
    };
    read_csv(bytes.as_slice(), x_col, y_col, b.norm).with_context(|| format!("reading CSV {}", path.display()))
}

fn ms_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

pub fn gen_data(out: &Path, a: &GenDataArgs) -> Result<ExitCode> {
    let mut spec = SynthSpec::age_cost(a.n as usize, a.seed);
    spec.slope = a.slope.unwrap_or(spec.slope);
    spec.intercept = a.intercept.unwrap_or(spec.intercept);
    spec.noise_sd = a.noise_sd.unwrap_or(spec.noise_sd);
    ensure!(spec.noise_sd >= 0.0, "--noise-sd must be non-negative");
    if let Some(b) = a.bounds {
        spec.bounds = b.norm;
    }
    let resolved = json!({
        "n": a.n, "seed": a.seed, "slope": spec.slope, "intercept": spec.intercept, "noise_sd": spec.noise_sd,
        "bounds": Bounds::from_norm(spec.bounds), "x_col": a.x_col, "y_col": a.y_col,
    });
    prepare(out, "gen-data", &resolved)?;
    let path = out.join("data.csv");
    write_csv(create(&path)?, &a.x_col, &a.y_col, &gen_synthetic(&spec))?;
    println!("wrote {} samples to {}", a.n, path.display());
    Ok(ExitCode::SUCCESS)
}

pub fn pack_data(out: &Path, a: &PackDataArgs) -> Result<ExitCode> {
    prepare(out, "pack-data", a)?;
    let d = load_dataset(&a.csv, &a.x_col, &a.y_col, Some(a.bounds))?;
    let blob = pack_blob(&d)?;
    let path = out.join("data.blob");
    fs::write(&path, &blob).with_context(|| format!("writing {}", path.display()))?;
    let digest = BlobView::open(&blob)?.digest();
    println!("packed {} samples to {} (digest {digest})", d.len(), path.display());
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct BatchSummary {
    index: usize,
    offset: u64,
    len: u64,
    blob: String,
    receipt: String,
    prove_ms: f64,
    failed: bool,
}

pub fn prove(out: &Path, a: &ProveArgs) -> Result<ExitCode> {
    prepare(out, "prove", a)?;
    let d = load_dataset(&a.data.data, &a.data.x_col, &a.data.y_col, a.data.bounds)?;
    let params = PrivacyParams::new(a.privacy.eps, a.privacy.seed)?;
    let plan = plan_batches(d.len() as u64, a.batch_size)?;
    let backend = backend(&a.backend)?;

    let started = Instant::now();
    let proofs = prove_all(&d, &params, &plan, a.jobs, backend)?;
    let wall_ms = ms_since(started);

    let mut batches = Vec::with_capacity(proofs.len());
    for p in proofs {
        let p = p?;
        let blob = format!("batch-{:04}.blob", p.index);
        let receipt = format!("batch-{:04}.receipt.json", p.index);
        fs::write(out.join(&blob), &p.blob)?;
        fs::write(out.join(&receipt), p.receipt.to_json())?;
        batches.push(BatchSummary {
            index: p.index,
            offset: p.batch.offset,
            len: p.batch.len,
            blob,
            receipt,
            prove_ms: p.prove_ms,
            failed: p.receipt.journal.result.failed,
        });
    }
    write_progression_csv(create(&out.join("progression.csv"))?, &progression_report(&d, &params, &plan)?)?;

    // sequential composition; no tighter accounting is attempted
    let eps_total = a.privacy.eps.to_f64() * batches.len() as f64;
    let prove_ms: f64 = batches.iter().map(|b| b.prove_ms).sum();
    write_json(
        &out.join("prove.json"),
        &json!({
            "n": d.len(), "backend": a.backend, "batch_size": a.batch_size, "jobs": a.jobs,
            "eps_per_batch": a.privacy.eps.to_f64(), "eps_composed": eps_total,
            "prove_ms": prove_ms, "wall_ms": wall_ms, "batches": batches,
        }),
    )?;
    let failed = batches.iter().filter(|b| b.failed).count();
    println!(
        "proved {} batch(es) over {} samples in {wall_ms:.1} ms; {failed} failed; composed epsilon {eps_total}",
        batches.len(),
        d.len()
    );
    Ok(ExitCode::SUCCESS)
}

pub fn verify(out: &Path, a: &VerifyArgs) -> Result<ExitCode> {
    prepare(out, "verify", a)?;
    let text = fs::read_to_string(&a.receipt).with_context(|| format!("reading {}", a.receipt.display()))?;
    let bytes = fs::read(&a.data).with_context(|| format!("reading {}", a.data.display()))?;
    let backend = backend(&a.backend)?;

    let started = Instant::now();
    let view = BlobView::open(&bytes);
    let digest_ms = ms_since(started);
    let started = Instant::now();
    let verdict = match (Receipt::from_json(&text), view) {
        (Err(e), _) => {
            info!("receipt does not parse: {e}");
            Err(RejectReason::Malformed)
        }
        (_, Err(e)) => {
            info!("blob does not open: {e}");
            Err(RejectReason::DatasetDigest)
        }
        (Ok(r), Ok(v)) => backend.verify(&r, &v),
    };
    let verify_ms = ms_since(started);

    let shown = match verdict {
        Ok(()) => "accept".to_owned(),
        Err(r) => r.to_string(),
    };
    write_json(&out.join("verify.json"), &json!({ "verdict": shown, "digest_ms": digest_ms, "verify_ms": verify_ms }))?;
    println!("{shown}");
    Ok(if verdict.is_ok() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn batch_receipts(dir: &Path) -> Result<Vec<(usize, PathBuf, PathBuf)>> {
    let mut found = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let name = entry?.file_name().to_string_lossy().into_owned();
        let Some(index) = name.strip_prefix("batch-").and_then(|s| s.strip_suffix(".receipt.json")) else {
            continue;
        };
        let Ok(i) = index.parse::<usize>() else { continue };
        found.push((i, dir.join(&name), dir.join(format!("batch-{index}.blob"))));
    }
    found.sort();
    ensure!(!found.is_empty(), "no batch-XXXX.receipt.json files in {}", dir.display());
    Ok(found)
}

pub fn aggregate(out: &Path, a: &AggregateArgs) -> Result<ExitCode> {
    prepare(out, "aggregate", a)?;
    let backend = backend(&a.backend)?;
    let mut receipts = Vec::new();
    for (i, receipt_path, blob_path) in batch_receipts(&a.receipts)? {
        let bytes = fs::read(&blob_path).with_context(|| format!("reading {}", blob_path.display()))?;
        let verdict = match (Receipt::from_json(&fs::read_to_string(&receipt_path)?), BlobView::open(&bytes)) {
            (Err(_), _) => Err(RejectReason::Malformed),
            (_, Err(_)) => Err(RejectReason::DatasetDigest),
            (Ok(r), Ok(v)) => backend.verify(&r, &v).map(|()| r),
        };
        match verdict {
            Ok(r) => receipts.push((i, r)),
            Err(reason) => {
                println!("{reason} batch-{i:04}");
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    let bounds = receipts[0].1.journal.bounds;
    ensure!(receipts.iter().all(|(_, r)| r.journal.bounds == bounds), "batches were normalized with different bounds");

    let outcome = aggregate_receipts(receipts.iter().map(|(i, r)| (*i, r)))?;
    let raw = denormalize(&outcome.model, &bounds)?;
    let eps_total: f64 = receipts.iter().map(|(_, r)| r.journal.eps.to_f64()).sum();
    write_json(
        &out.join("aggregate.json"),
        &json!({
            "batches": receipts.len(), "used": outcome.used, "excluded": outcome.excluded,
            "slope": raw.slope.to_f64(), "intercept": raw.intercept.to_f64(),
            "normalized": outcome.model, "eps_composed": eps_total,
        }),
    )?;
    println!(
        "slope {:.6} intercept {:.6} from {} of {} batches; composed epsilon {eps_total}",
        raw.slope.to_f64(),
        raw.intercept.to_f64(),
        outcome.used.len(),
        receipts.len()
    );
    Ok(ExitCode::SUCCESS)
}

pub fn compare(out: &Path, a: &CompareArgs) -> Result<ExitCode> {
    prepare(out, "compare", a)?;
    let d = match (&a.data, a.n) {
        (Some(path), _) => load_dataset(path, &a.x_col, &a.y_col, a.bounds)?,
        (None, Some(n)) => {
            let mut spec = SynthSpec::age_cost(n as usize, a.data_seed);
            if let Some(b) = a.bounds {
                spec.bounds = b.norm;
            }
            Dataset::from_raw(&gen_synthetic(&spec), spec.bounds)?
        }
        (None, None) => bail!("compare needs --data or --n"),
    };
    let report = compare_models(&d, a.privacy.eps, &a.privacy.seed, a.seeds)?;
    write_accuracy_csv(create(&out.join("accuracy.csv"))?, &report.rows)?;
    write_json(&out.join("compare.json"), &report)?;

    println!("{:<14} {:>16} {:>16} {:>14}", "metric", "ols", "dp", "delta");
    for r in &report.rows {
        println!("{:<14} {:>16.6} {:>16.6} {:>14.6}", r.metric, r.ols, r.dp, r.delta);
    }
    let failed = report.seeds.iter().filter(|s| s.failed).count();
    println!("median relative MAE delta {:.3e} over {} seeds ({failed} failed)", report.mae_rel_delta_median, a.seeds);
    Ok(ExitCode::SUCCESS)
}

pub fn bench(out: &Path, a: &BenchArgs) -> Result<ExitCode> {
    prepare(out, "bench", a)?;
    ensure!(a.reps >= 3, "--reps must be at least 3");
    let config = BenchConfig {
        reps: a.reps,
        batch_size: a.batch_size,
        jobs: a.jobs,
        data_seed: a.data_seed,
        ..BenchConfig::new(a.sizes.0.clone())
    };
    let params = PrivacyParams::new(a.privacy.eps, a.privacy.seed)?;
    let report = run_bench(&config, &params, backend(&a.backend)?)?;
    write_timing_csv(create(&out.join("timing.csv"))?, &report.timing)?;
    write_accuracy_csv(create(&out.join("accuracy.csv"))?, &report.accuracy)?;
    for r in &report.timing {
        println!("n={:<8} prove {:>10.3} ms  verify {:>8.3} ms", r.size, r.prove_ms, r.verify_ms);
    }
    Ok(ExitCode::SUCCESS)
}
