use serde::Serialize;

use super::batch::{batch_seed, BatchPlan};
use super::PipelineError;
use crate::dataio::Dataset;
use crate::regression::{denormalize, noisystats_fit_seeded, ols_fit, Accumulators, PrivacyParams};

/// One row per batch, in raw units. Fit columns are over batches `0..=iteration`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProgressRow {
    pub iteration: usize,
    /// Mean x of this batch alone.
    pub batch_x_mean: f64,
    pub batch_y_mean: f64,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    pub noisy_intercept: Option<f64>,
}

/// Cumulative OLS and private fit after each batch. The private fit over
/// prefix `b` draws from batch `b`'s sub-seed.
pub fn progression_report(
    dataset: &Dataset,
    params: &PrivacyParams,
    plan: &BatchPlan,
) -> Result<Vec<ProgressRow>, PipelineError> {
    if plan.total() != dataset.len() as u64 {
        return Err(PipelineError::InvalidPlan);
    }
    let bounds = &dataset.bounds;
    let mut prefix = Accumulators::new();
    let mut rows = Vec::with_capacity(plan.len());
    for (i, b) in plan.batches.iter().enumerate() {
        let part = &dataset.samples[b.offset as usize..(b.offset + b.len) as usize];
        let acc = Accumulators::ingest_all(part)?;
        prefix = prefix.merge(&acc)?;

        let ols = ols_fit(&prefix).ok().and_then(|m| denormalize(&m, bounds).ok());
        let noisy = noisystats_fit_seeded(&prefix, &params.with_seed(batch_seed(&params.seed, i as u64)))
            .ok()
            .and_then(|r| denormalize(&r.model, bounds).ok());
        rows.push(ProgressRow {
            iteration: i + 1,
            batch_x_mean: bounds.denormalize_x(acc.mean_x()?),
            batch_y_mean: bounds.denormalize_y(acc.mean_y()?),
            slope: ols.map(|m| m.slope.to_f64()),
            intercept: ols.map(|m| m.intercept.to_f64()),
            noisy_intercept: noisy.map(|m| m.intercept.to_f64()),
        });
    }
    Ok(rows)
}

pub fn write_progression_csv<W: std::io::Write>(w: W, rows: &[ProgressRow]) -> Result<(), PipelineError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["iteration", "x_label", "y_label", "slope", "intercept", "noisy_intercept"])?;
    let opt = |v: Option<f64>| v.map(|v| format!("{v:.6}")).unwrap_or_default();
    for r in rows {
        out.write_record([
            r.iteration.to_string(),
            format!("{:.6}", r.batch_x_mean),
            format!("{:.6}", r.batch_y_mean),
            opt(r.slope),
            opt(r.intercept),
            opt(r.noisy_intercept),
        ])?;
    }
    out.flush()?;
    Ok(())
}
