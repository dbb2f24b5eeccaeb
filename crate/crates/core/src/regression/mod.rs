//! The guest computation: streaming sufficient statistics, OLS, the
//! NoisyStats private fit, and model post-processing.

mod metrics;
mod noisy;

use serde::{Deserialize, Serialize};

use crate::fixedq::{ArithError, FixedQ};
use crate::noise::Seed;

pub use metrics::{evaluate, Metrics};
pub use noisy::{noisystats_fit, noisystats_fit_seeded, noisystats_release, NoisyRelease};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegressionError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("sample ({x}, {y}) lies outside the unit box")]
    OutOfUnitBox { x: FixedQ, y: FixedQ },
    #[error("degenerate data: x has no spread")]
    DegenerateData,
    #[error("model is the failure output and cannot be used here")]
    InvalidModel,
    #[error("empty input")]
    EmptyInput,
    #[error("invalid parameter: {0}")]
    InvalidParams(&'static str),
}

/// One normalized `(x, y)` observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplePair {
    pub x: FixedQ,
    pub y: FixedQ,
}

impl SamplePair {
    pub fn new(x: FixedQ, y: FixedQ) -> Self {
        SamplePair { x, y }
    }
}

/// Running sums over ingested samples.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Accumulators {
    pub n: u64,
    pub sum_x: FixedQ,
    pub sum_y: FixedQ,
    pub sum_xx: FixedQ,
    pub sum_xy: FixedQ,
}

impl Accumulators {
    pub fn new() -> Self {
        Self::default()
    }

    /// The per-sample transition. Rejects samples outside `[0, 1]^2`.
    pub fn ingest(&self, s: SamplePair) -> Result<Self, RegressionError> {
        let unit = FixedQ::ZERO..=FixedQ::ONE;
        if !unit.contains(&s.x) || !unit.contains(&s.y) {
            return Err(RegressionError::OutOfUnitBox { x: s.x, y: s.y });
        }
        Ok(Accumulators {
            n: self.n + 1,
            sum_x: self.sum_x.checked_add(s.x)?,
            sum_y: self.sum_y.checked_add(s.y)?,
            sum_xx: self.sum_xx.checked_add(s.x.checked_mul(s.x)?)?,
            sum_xy: self.sum_xy.checked_add(s.x.checked_mul(s.y)?)?,
        })
    }

    pub fn ingest_all<'a, I>(samples: I) -> Result<Self, RegressionError>
    where
        I: IntoIterator<Item = &'a SamplePair>,
    {
        samples.into_iter().try_fold(Self::new(), |acc, s| acc.ingest(*s))
    }

    /// Sums of two disjoint sample sets.
    pub fn merge(&self, other: &Self) -> Result<Self, RegressionError> {
        Ok(Accumulators {
            n: self.n + other.n,
            sum_x: self.sum_x.checked_add(other.sum_x)?,
            sum_y: self.sum_y.checked_add(other.sum_y)?,
            sum_xx: self.sum_xx.checked_add(other.sum_xx)?,
            sum_xy: self.sum_xy.checked_add(other.sum_xy)?,
        })
    }

    fn count(&self) -> Result<FixedQ, RegressionError> {
        if self.n == 0 {
            return Err(RegressionError::EmptyInput);
        }
        let n = i64::try_from(self.n).map_err(|_| ArithError::Overflow)?;
        Ok(FixedQ::from_int(n)?)
    }

    pub fn mean_x(&self) -> Result<FixedQ, RegressionError> {
        Ok(self.sum_x.checked_div(self.count()?)?)
    }

    pub fn mean_y(&self) -> Result<FixedQ, RegressionError> {
        Ok(self.sum_y.checked_div(self.count()?)?)
    }

    /// `sum_xy - sum_x * mean_y`.
    pub fn ncov(&self) -> Result<FixedQ, RegressionError> {
        Ok(self.sum_xy.checked_sub(self.sum_x.checked_mul(self.mean_y()?)?)?)
    }

    /// `sum_xx - sum_x * mean_x`.
    pub fn nvar(&self) -> Result<FixedQ, RegressionError> {
        Ok(self.sum_xx.checked_sub(self.sum_x.checked_mul(self.mean_x()?)?)?)
    }
}

/// A fitted line, or the failure output of the private fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearModel {
    pub slope: FixedQ,
    pub intercept: FixedQ,
    pub noisy: bool,
    pub failed: bool,
}

impl LinearModel {
    pub fn exact(slope: FixedQ, intercept: FixedQ) -> Self {
        LinearModel { slope, intercept, noisy: false, failed: false }
    }

    pub fn private(slope: FixedQ, intercept: FixedQ) -> Self {
        LinearModel { slope, intercept, noisy: true, failed: false }
    }

    /// The failure output. Slope and intercept are zero and meaningless.
    pub fn failure() -> Self {
        LinearModel { slope: FixedQ::ZERO, intercept: FixedQ::ZERO, noisy: true, failed: true }
    }

    pub fn is_failed(&self) -> bool {
        self.failed
    }

    fn usable(&self) -> Result<&Self, RegressionError> {
        if self.failed {
            Err(RegressionError::InvalidModel)
        } else {
            Ok(self)
        }
    }

    pub fn predict(&self, x: f64) -> f64 {
        self.slope.to_f64() * x + self.intercept.to_f64()
    }
}

pub const DEFAULT_EPS: FixedQ = FixedQ::TWO;

/// Privacy parameters of a pure `(eps, 0)` release.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrivacyParams {
    pub eps: FixedQ,
    pub seed: Seed,
}

impl PrivacyParams {
    pub fn new(eps: FixedQ, seed: Seed) -> Result<Self, RegressionError> {
        if !eps.is_positive() {
            return Err(RegressionError::InvalidParams("eps must be positive"));
        }
        Ok(PrivacyParams { eps, seed })
    }

    pub fn with_seed(&self, seed: Seed) -> Self {
        PrivacyParams { seed, ..*self }
    }

    /// Always zero.
    pub fn delta(&self) -> FixedQ {
        FixedQ::ZERO
    }
}

/// Raw-unit box mapped onto `[0, 1]^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormBounds {
    pub x_min: FixedQ,
    pub x_max: FixedQ,
    pub y_min: FixedQ,
    pub y_max: FixedQ,
}

impl NormBounds {
    pub fn new(x_min: FixedQ, x_max: FixedQ, y_min: FixedQ, y_max: FixedQ) -> Result<Self, RegressionError> {
        if x_min >= x_max || y_min >= y_max {
            return Err(RegressionError::InvalidParams("bounds need min < max"));
        }
        Ok(NormBounds { x_min, x_max, y_min, y_max })
    }

    pub fn from_f64(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self, RegressionError> {
        Self::new(
            FixedQ::from_f64(x_min)?,
            FixedQ::from_f64(x_max)?,
            FixedQ::from_f64(y_min)?,
            FixedQ::from_f64(y_max)?,
        )
    }

    pub fn unit() -> Self {
        NormBounds { x_min: FixedQ::ZERO, x_max: FixedQ::ONE, y_min: FixedQ::ZERO, y_max: FixedQ::ONE }
    }

    pub fn x_contains(&self, v: f64) -> bool {
        within(v, self.x_min, self.x_max)
    }

    pub fn y_contains(&self, v: f64) -> bool {
        within(v, self.y_min, self.y_max)
    }

    /// `None` when `v` lies outside `[x_min, x_max]`.
    pub fn normalize_x(&self, v: f64) -> Option<FixedQ> {
        normalize(v, self.x_min, self.x_max)
    }

    pub fn normalize_y(&self, v: f64) -> Option<FixedQ> {
        normalize(v, self.y_min, self.y_max)
    }

    pub fn denormalize_x(&self, v: FixedQ) -> f64 {
        self.x_min.to_f64() + v.to_f64() * (self.x_max.to_f64() - self.x_min.to_f64())
    }

    pub fn denormalize_y(&self, v: FixedQ) -> f64 {
        self.y_min.to_f64() + v.to_f64() * (self.y_max.to_f64() - self.y_min.to_f64())
    }
}

/// Bounds are stored rounded to Q31.32, so a value given exactly at a decimal
/// bound may sit up to one ulp outside the stored one.
fn within(v: f64, lo: FixedQ, hi: FixedQ) -> bool {
    let ulp = FixedQ::EPSILON.to_f64();
    v >= lo.to_f64() - ulp && v <= hi.to_f64() + ulp
}

fn normalize(v: f64, lo: FixedQ, hi: FixedQ) -> Option<FixedQ> {
    if !within(v, lo, hi) {
        return None;
    }
    let (lo, hi) = (lo.to_f64(), hi.to_f64());
    let t = ((v - lo) / (hi - lo)).clamp(0.0, 1.0);
    FixedQ::from_f64(t).ok()
}

/// Least-squares line through the accumulated samples.
pub fn ols_fit(acc: &Accumulators) -> Result<LinearModel, RegressionError> {
    if acc.n < 2 {
        return Err(RegressionError::DegenerateData);
    }
    let nvar = acc.nvar()?;
    if !nvar.is_positive() {
        return Err(RegressionError::DegenerateData);
    }
    let slope = acc.ncov()?.checked_div(nvar)?;
    let intercept = acc.mean_y()?.checked_sub(slope.checked_mul(acc.mean_x()?)?)?;
    Ok(LinearModel::exact(slope, intercept))
}

/// Maps a unit-box model back to raw units.
pub fn denormalize(model: &LinearModel, bounds: &NormBounds) -> Result<LinearModel, RegressionError> {
    let model = model.usable()?;
    let x_range = bounds.x_max.checked_sub(bounds.x_min)?;
    let y_range = bounds.y_max.checked_sub(bounds.y_min)?;
    let slope = model.slope.checked_mul(y_range)?.checked_div(x_range)?;
    let intercept = bounds
        .y_min
        .checked_add(model.intercept.checked_mul(y_range)?)?
        .checked_sub(slope.checked_mul(bounds.x_min)?)?;
    Ok(LinearModel { slope, intercept, ..*model })
}

/// Unweighted mean of slopes and of intercepts, floored to 32 fractional bits.
pub fn aggregate(models: &[LinearModel]) -> Result<LinearModel, RegressionError> {
    if models.is_empty() {
        return Err(RegressionError::EmptyInput);
    }
    let mut slope: i128 = 0;
    let mut intercept: i128 = 0;
    for m in models {
        let m = m.usable()?;
        slope += m.slope.raw() as i128;
        intercept += m.intercept.raw() as i128;
    }
    let c = models.len() as i128;
    let narrow = |v: i128| i64::try_from(v.div_euclid(c)).map(FixedQ::from_raw).map_err(|_| ArithError::Overflow);
    Ok(LinearModel {
        slope: narrow(slope)?,
        intercept: narrow(intercept)?,
        noisy: models.iter().any(|m| m.noisy),
        failed: false,
    })
}
