use serde::Serialize;

use super::{LinearModel, RegressionError, SamplePair};

/// Reporting-level accuracy figures, in double precision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub mse: f64,
    pub mae: f64,
    /// NaN when `n <= 2` or x has no spread.
    pub slope_se: f64,
    pub intercept_se: f64,
}

/// Scores `model` on `data`. Standard errors use the residual variance
/// `SSR / (n - 2)`.
pub fn evaluate(model: &LinearModel, data: &[SamplePair]) -> Result<Metrics, RegressionError> {
    if model.failed {
        return Err(RegressionError::InvalidModel);
    }
    if data.is_empty() {
        return Err(RegressionError::EmptyInput);
    }
    let n = data.len() as f64;
    let (mut ssr, mut sar, mut sx, mut sxx) = (0.0, 0.0, 0.0, 0.0);
    for s in data {
        let x = s.x.to_f64();
        let r = s.y.to_f64() - model.predict(x);
        ssr += r * r;
        sar += r.abs();
        sx += x;
        sxx += x * x;
    }
    let mean_x = sx / n;
    let sxx_centered: f64 = data.iter().map(|s| (s.x.to_f64() - mean_x).powi(2)).sum();
    let (slope_se, intercept_se) = if data.len() > 2 && sxx_centered > 0.0 {
        let resid_var = ssr / (n - 2.0);
        let se = (resid_var / sxx_centered).sqrt();
        (se, se * (sxx / n).sqrt())
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(Metrics { mse: ssr / n, mae: sar / n, slope_se, intercept_se })
}
