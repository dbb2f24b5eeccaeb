use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::RawRecord;
use crate::regression::NormBounds;

/// Parameters of a synthetic `y = slope x + intercept + N(0, noise_sd)` dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSpec {
    pub n: usize,
    pub seed: u64,
    pub slope: f64,
    pub intercept: f64,
    pub noise_sd: f64,
    pub bounds: NormBounds,
}

impl SynthSpec {
    /// An age (years) to annual cost relationship.
    pub fn age_cost(n: usize, seed: u64) -> Self {
        SynthSpec {
            n,
            seed,
            slope: 600.0,
            intercept: -5_000.0,
            noise_sd: 2_500.0,
            bounds: NormBounds::from_f64(18.0, 65.0, 0.0, 40_000.0).expect("static bounds"),
        }
    }
}

/// x uniform over the bounds' x range; y clamped into the y range.
pub fn gen_synthetic(spec: &SynthSpec) -> Vec<RawRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let noise = Normal::new(0.0, spec.noise_sd.max(0.0)).expect("finite sd");
    let b = &spec.bounds;
    let (x_lo, x_hi) = (b.x_min.to_f64(), b.x_max.to_f64());
    let (y_lo, y_hi) = (b.y_min.to_f64(), b.y_max.to_f64());
    (0..spec.n)
        .map(|_| {
            let x = rng.random_range(x_lo..=x_hi);
            let e = if spec.noise_sd > 0.0 { noise.sample(&mut rng) } else { 0.0 };
            let y = (spec.slope * x + spec.intercept + e).clamp(y_lo, y_hi);
            RawRecord { x_raw: x, y_raw: y }
        })
        .collect()
}
