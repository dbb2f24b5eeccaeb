use serde::Serialize;

use super::PipelineError;
use crate::dataio::Dataset;
use crate::fixedq::FixedQ;
use crate::noise::Seed;
use crate::regression::{
    denormalize, evaluate, noisystats_fit_seeded, ols_fit, Accumulators, LinearModel, Metrics, PrivacyParams,
    SamplePair,
};

/// One `metric,ols,dp,delta` row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccuracyRow {
    pub metric: &'static str,
    pub ols: f64,
    pub dp: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedOutcome {
    pub seed_index: u64,
    pub failed: bool,
    pub slope: f64,
    pub intercept: f64,
    pub metrics: Option<Metrics>,
    /// `|MAE_dp - MAE_ols| / MAE_ols`.
    pub mae_rel_delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub ols_model: LinearModel,
    pub ols: Metrics,
    pub seeds: Vec<SeedOutcome>,
    /// DP column is the per-metric median over non-failed seeds.
    pub rows: Vec<AccuracyRow>,
    pub mae_rel_delta_median: f64,
}

pub fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(|a, b| a.total_cmp(b));
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

/// The dataset mapped back into raw units, for raw-unit metrics.
fn raw_samples(d: &Dataset) -> Result<Vec<SamplePair>, PipelineError> {
    d.samples
        .iter()
        .map(|s| {
            Ok(SamplePair::new(
                FixedQ::from_f64(d.bounds.denormalize_x(s.x))?,
                FixedQ::from_f64(d.bounds.denormalize_y(s.y))?,
            ))
        })
        .collect()
}

/// OLS against NoisyStats over `seeds` noise seeds derived from `root`.
/// Metrics are in raw units.
pub fn compare_models(dataset: &Dataset, eps: FixedQ, root: &Seed, seeds: u64) -> Result<CompareReport, PipelineError> {
    let acc = Accumulators::ingest_all(&dataset.samples)?;
    let raw = raw_samples(dataset)?;
    let ols_model = denormalize(&ols_fit(&acc)?, &dataset.bounds)?;
    let ols = evaluate(&ols_model, &raw)?;

    let mut outcomes = Vec::with_capacity(seeds as usize);
    for i in 0..seeds {
        let params = PrivacyParams::new(eps, root.derive(i))?;
        let release = noisystats_fit_seeded(&acc, &params)?;
        let outcome = if release.model.failed {
            SeedOutcome { seed_index: i, failed: true, slope: f64::NAN, intercept: f64::NAN, metrics: None, mae_rel_delta: None }
        } else {
            let m = denormalize(&release.model, &dataset.bounds)?;
            let metrics = evaluate(&m, &raw)?;
            SeedOutcome {
                seed_index: i,
                failed: false,
                slope: m.slope.to_f64(),
                intercept: m.intercept.to_f64(),
                metrics: Some(metrics),
                mae_rel_delta: Some((metrics.mae - ols.mae).abs() / ols.mae),
            }
        };
        outcomes.push(outcome);
    }

    let col = |f: fn(&Metrics) -> f64| {
        let mut v: Vec<f64> = outcomes.iter().filter_map(|o| o.metrics.as_ref().map(f)).collect();
        median(&mut v)
    };
    let row = |metric, ols_v: f64, dp_v: f64| AccuracyRow { metric, ols: ols_v, dp: dp_v, delta: (dp_v - ols_v).abs() };
    let rows = vec![
        row("slope_std_error", ols.slope_se, col(|m| m.slope_se)),
        row("intercept_std_error", ols.intercept_se, col(|m| m.intercept_se)),
        row("mean_absolute_error", ols.mae, col(|m| m.mae)),
    ];
    let mut deltas: Vec<f64> = outcomes.iter().filter_map(|o| o.mae_rel_delta).collect();
    let mae_rel_delta_median = median(&mut deltas);
    Ok(CompareReport { ols_model, ols, seeds: outcomes, rows, mae_rel_delta_median })
}

pub fn write_accuracy_csv<W: std::io::Write>(w: W, rows: &[AccuracyRow]) -> Result<(), PipelineError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["metric", "ols", "dp", "delta"])?;
    for r in rows {
        out.write_record([r.metric.to_string(), r.ols.to_string(), r.dp.to_string(), r.delta.to_string()])?;
    }
    out.flush()?;
    Ok(())
}
