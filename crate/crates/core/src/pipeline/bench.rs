//! Timing harness for prover and verifier scaling.

use std::time::Instant;

use serde::Serialize;

use super::batch::{aggregate_receipts, plan_batches, prove_all};
use super::compare::{median, AccuracyRow};
use super::PipelineError;
use crate::attest::AttestationBackend;
use crate::dataio::{gen_synthetic, BlobView, Dataset, SynthSpec};
use crate::regression::{denormalize, evaluate, ols_fit, Accumulators, LinearModel, PrivacyParams, SamplePair};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchConfig {
    pub sizes: Vec<u64>,
    /// Timed repetitions per size; the median is reported. At least 3.
    pub reps: usize,
    /// Verifications per repetition, averaged, since one verify is sub-millisecond.
    pub verify_iters: usize,
    /// `None` proves each size as a single guest run.
    pub batch_size: Option<u64>,
    pub jobs: usize,
    pub data_seed: u64,
}

impl BenchConfig {
    pub fn new(sizes: Vec<u64>) -> Self {
        BenchConfig { sizes, reps: 3, verify_iters: 50, batch_size: None, jobs: 1, data_seed: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingRow {
    pub size: u64,
    pub backend: String,
    pub batch_size: u64,
    pub prove_ms: f64,
    pub verify_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub timing: Vec<TimingRow>,
    /// OLS against the attested private model at the largest size.
    pub accuracy: Vec<AccuracyRow>,
}

pub fn run_bench(
    config: &BenchConfig,
    params: &PrivacyParams,
    backend: &dyn AttestationBackend,
) -> Result<BenchReport, PipelineError> {
    let max = *config.sizes.iter().max().ok_or(PipelineError::InvalidPlan)?;
    let spec = SynthSpec::age_cost(max as usize, config.data_seed);
    let full = Dataset::from_raw(&gen_synthetic(&spec), spec.bounds)?;
    let reps = config.reps.max(3);
    let iters = config.verify_iters.max(1);

    let mut timing = Vec::with_capacity(config.sizes.len());
    let mut last_model = None;
    for &size in &config.sizes {
        let data = full.slice(0, size as usize);
        let batch_size = config.batch_size.unwrap_or(size).min(size);
        let plan = plan_batches(size, batch_size)?;

        let mut prove_times = Vec::with_capacity(reps);
        let mut proofs = Vec::new();
        for _ in 0..reps {
            let started = Instant::now();
            proofs = prove_all(&data, params, &plan, config.jobs, backend)?
                .into_iter()
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| PipelineError::Batch(Box::new(e)))?;
            prove_times.push(started.elapsed().as_secs_f64() * 1e3);
        }

        let views = proofs
            .iter()
            .map(|p| BlobView::open(&p.blob))
            .collect::<Result<Vec<_>, _>>()
            .map_err(crate::dataio::DataError::from)?;
        let mut verify_times = Vec::with_capacity(reps);
        for _ in 0..reps {
            let started = Instant::now();
            for _ in 0..iters {
                for (p, v) in proofs.iter().zip(&views) {
                    backend.verify(&p.receipt, v).map_err(PipelineError::Rejected)?;
                }
            }
            verify_times.push(started.elapsed().as_secs_f64() * 1e3 / iters as f64);
        }

        timing.push(TimingRow {
            size,
            backend: backend.id().to_owned(),
            batch_size,
            prove_ms: median(&mut prove_times),
            verify_ms: median(&mut verify_times),
        });
        if size == max {
            last_model = Some(aggregate_receipts(proofs.iter().map(|p| (p.index, &p.receipt)))?.model);
        }
    }

    let accuracy = match last_model {
        Some(dp) => accuracy_rows(&full, &dp)?,
        None => Vec::new(),
    };
    Ok(BenchReport { timing, accuracy })
}

fn accuracy_rows(data: &Dataset, dp: &LinearModel) -> Result<Vec<AccuracyRow>, PipelineError> {
    let b = &data.bounds;
    let raw: Vec<SamplePair> = data
        .samples
        .iter()
        .map(|s| {
            Ok(SamplePair::new(
                crate::fixedq::FixedQ::from_f64(b.denormalize_x(s.x))?,
                crate::fixedq::FixedQ::from_f64(b.denormalize_y(s.y))?,
            ))
        })
        .collect::<Result<_, PipelineError>>()?;
    let ols = evaluate(&denormalize(&ols_fit(&Accumulators::ingest_all(&data.samples)?)?, b)?, &raw)?;
    let dpm = evaluate(&denormalize(dp, b)?, &raw)?;
    let row = |metric, o: f64, d: f64| AccuracyRow { metric, ols: o, dp: d, delta: (d - o).abs() };
    Ok(vec![
        row("slope_std_error", ols.slope_se, dpm.slope_se),
        row("intercept_std_error", ols.intercept_se, dpm.intercept_se),
        row("mean_absolute_error", ols.mae, dpm.mae),
    ])
}

pub fn write_timing_csv<W: std::io::Write>(w: W, rows: &[TimingRow]) -> Result<(), PipelineError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["size", "backend", "batch_size", "prove_ms", "verify_ms"])?;
    for r in rows {
        out.write_record([
            r.size.to_string(),
            r.backend.clone(),
            r.batch_size.to_string(),
            format!("{:.4}", r.prove_ms),
            format!("{:.4}", r.verify_ms),
        ])?;
    }
    out.flush()?;
    Ok(())
}
