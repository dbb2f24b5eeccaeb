use crate::fixedq::FixedQ;
use crate::noise::{laplace_scale, sample_laplace, LaplaceParams, NoiseStream, UniformSource};

use super::{Accumulators, LinearModel, PrivacyParams, RegressionError};

/// NoisyStats output together with the Laplace draws that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoisyRelease {
    pub model: LinearModel,
    pub l1: FixedQ,
    pub l2: FixedQ,
    /// Absent on the failure branch.
    pub l3: Option<FixedQ>,
    /// Uniforms consumed: 2 on failure, 3 on success.
    pub draws: u64,
}

/// NoisyStats: perturb `ncov` and `nvar`, divide, then perturb the intercept.
///
/// Draws L1 then L2, both at scale `3(1 - 1/n)/eps`. If `nvar + L2 <= 0` the
/// result is the failure model and no third draw happens. Otherwise
/// `slope = (ncov + L1)/(nvar + L2)`, L3 is drawn at scale
/// `3 (1 + |slope|)/(n eps)` and `intercept = (mean_y - slope mean_x) + L3`.
pub fn noisystats_release<S: UniformSource + ?Sized>(
    acc: &Accumulators,
    eps: FixedQ,
    source: &mut S,
) -> Result<NoisyRelease, RegressionError> {
    if !eps.is_positive() {
        return Err(RegressionError::InvalidParams("eps must be positive"));
    }
    let n = i64::try_from(acc.n).map_err(|_| crate::fixedq::ArithError::Overflow)?;
    if n == 0 {
        return Err(RegressionError::EmptyInput);
    }
    let start = source.counter();
    let inv_n = FixedQ::from_rational(1, n)?;
    let delta = FixedQ::ONE.checked_sub(inv_n)?;
    let stats_noise = LaplaceParams::centered(laplace_scale(delta, eps)?)?;

    let l1 = sample_laplace(source, &stats_noise)?;
    let l2 = sample_laplace(source, &stats_noise)?;

    let denom = acc.nvar()?.checked_add(l2)?;
    if !denom.is_positive() {
        return Ok(NoisyRelease {
            model: LinearModel::failure(),
            l1,
            l2,
            l3: None,
            draws: source.counter() - start,
        });
    }
    let slope = acc.ncov()?.checked_add(l1)?.checked_div(denom)?;
    let delta3 = inv_n.checked_mul(FixedQ::ONE.checked_add(slope.checked_abs()?)?)?;
    let intercept_noise = LaplaceParams::centered(laplace_scale(delta3, eps)?)?;
    let l3 = sample_laplace(source, &intercept_noise)?;
    let intercept = acc
        .mean_y()?
        .checked_sub(slope.checked_mul(acc.mean_x()?)?)?
        .checked_add(l3)?;
    Ok(NoisyRelease {
        model: LinearModel::private(slope, intercept),
        l1,
        l2,
        l3: Some(l3),
        draws: source.counter() - start,
    })
}

pub fn noisystats_fit<S: UniformSource + ?Sized>(
    acc: &Accumulators,
    eps: FixedQ,
    source: &mut S,
) -> Result<LinearModel, RegressionError> {
    noisystats_release(acc, eps, source).map(|r| r.model)
}

/// NoisyStats drawing from a fresh stream over `params.seed`.
pub fn noisystats_fit_seeded(acc: &Accumulators, params: &PrivacyParams) -> Result<NoisyRelease, RegressionError> {
    noisystats_release(acc, params.eps, &mut NoiseStream::new(params.seed))
}
