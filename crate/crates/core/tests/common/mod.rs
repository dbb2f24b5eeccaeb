//! Independent oracles shared by the integration tests: exact rationals for
//! everything the guest computes in fixed point, and f64 closed forms for
//! distribution checks.
#![allow(dead_code)]

use adpr_core::dataio::{gen_synthetic, Dataset, SynthSpec};
use adpr_core::{FixedQ, SamplePair};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn scale() -> BigInt {
    BigInt::one() << 32
}

pub fn q_to_rat(q: FixedQ) -> BigRational {
    BigRational::new(BigInt::from(q.raw()), scale())
}

/// `floor(r * 2^32)` as a raw value.
pub fn rat_floor_raw(r: &BigRational) -> i64 {
    let scaled = r * BigRational::from_integer(scale());
    i64::try_from(scaled.floor().to_integer()).expect("raw fits i64")
}

/// `trunc(r * 2^32)` as a raw value.
pub fn rat_trunc_raw(r: &BigRational) -> i64 {
    let scaled = r * BigRational::from_integer(scale());
    i64::try_from(scaled.trunc().to_integer()).expect("raw fits i64")
}

pub fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("finite rational")
}

pub fn rel_err(got: f64, want: &BigRational) -> f64 {
    let w = rat_to_f64(want);
    ((got - w) / w).abs()
}

/// Exact sums over the exact sample values.
pub struct ExactSums {
    pub n: BigRational,
    pub sx: BigRational,
    pub sy: BigRational,
    pub sxx: BigRational,
    pub sxy: BigRational,
}

pub fn exact_sums(samples: &[SamplePair]) -> ExactSums {
    let mut s = ExactSums {
        n: BigRational::zero(),
        sx: BigRational::zero(),
        sy: BigRational::zero(),
        sxx: BigRational::zero(),
        sxy: BigRational::zero(),
    };
    for p in samples {
        let (x, y) = (q_to_rat(p.x), q_to_rat(p.y));
        s.n += BigRational::one();
        s.sxx += &x * &x;
        s.sxy += &x * &y;
        s.sx += x;
        s.sy += y;
    }
    s
}

/// Exact least-squares `(slope, intercept)` over the exact sample values.
pub fn ols_oracle(samples: &[SamplePair]) -> (BigRational, BigRational) {
    let s = exact_sums(samples);
    let ncov = &s.sxy - &s.sx * &s.sy / &s.n;
    let nvar = &s.sxx - &s.sx * &s.sx / &s.n;
    let slope = ncov / nvar;
    let intercept = (&s.sy - &slope * &s.sx) / &s.n;
    (slope, intercept)
}

/// Floor of the exact mean of raw values, i.e. the correctly floored Q31.32 mean.
pub fn mean_floor_raw(raws: &[i64]) -> i64 {
    let sum: BigInt = raws.iter().map(|&r| BigInt::from(r)).sum();
    let mean = BigRational::new(sum, BigInt::from(raws.len()));
    i64::try_from(mean.floor().to_integer()).unwrap()
}

pub fn abs_rat(r: &BigRational) -> BigRational {
    r.abs()
}

/// Uniform raw in `[0, 2^32]`, so exactly 0 and 1 both occur in principle.
pub fn unit_raw<R: Rng>(r: &mut R) -> FixedQ {
    FixedQ::from_raw(r.random_range(0..=(1i64 << 32)))
}

/// Noisy line inside the unit box: `y = a + b x + e`, clamped.
pub fn unit_line<R: Rng>(r: &mut R, n: usize, a: f64, b: f64, noise: f64) -> Vec<SamplePair> {
    (0..n)
        .map(|_| {
            let x = unit_raw(r);
            let e: f64 = r.random_range(-noise..=noise);
            let y = (a + b * x.to_f64() + e).clamp(0.0, 1.0);
            SamplePair::new(x, FixedQ::from_f64(y).unwrap())
        })
        .collect()
}

pub fn unit_random<R: Rng>(r: &mut R, n: usize) -> Vec<SamplePair> {
    (0..n).map(|_| SamplePair::new(unit_raw(r), unit_raw(r))).collect()
}

pub fn age_cost(n: usize, seed: u64) -> Dataset {
    let spec = SynthSpec::age_cost(n, seed);
    Dataset::from_raw(&gen_synthetic(&spec), spec.bounds).unwrap()
}

pub fn laplace_cdf(x: f64, mu: f64, b: f64) -> f64 {
    if x < mu {
        0.5 * ((x - mu) / b).exp()
    } else {
        1.0 - 0.5 * (-(x - mu) / b).exp()
    }
}

/// Two-sided KS statistic of `samples` against `cdf`. Sorts in place.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(|a, b| a.total_cmp(b));
    let n = samples.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    d
}

pub fn mean_var(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, var)
}

/// A cheating prover: shifts `sum_x` of trace record `j` by `delta_raw`,
/// recomputes every later record and the released model honestly from the
/// corrupted state, and recommits. Only transition `j` is inconsistent.
pub fn tamper_and_recommit(
    run: &adpr_core::attest::GuestRun,
    blob: &adpr_core::BlobView<'_>,
    params: &adpr_core::PrivacyParams,
    j: usize,
    delta_raw: i64,
) -> adpr_core::Receipt {
    use adpr_core::attest::TranscriptBackend;
    use adpr_core::regression::noisystats_fit_seeded;

    let mut trace = run.trace.clone();
    let n = trace.len() - 1;
    let corrupted = FixedQ::from_raw(trace[j].acc.sum_x.raw() + delta_raw);
    trace[j].acc.sum_x = corrupted;
    for i in j + 1..n {
        trace[i].acc = trace[i - 1].acc.ingest(blob.sample(i as u64)).unwrap();
    }
    if j < n {
        trace[n].acc = trace[n - 1].acc;
    }
    let release = noisystats_fit_seeded(&trace[n].acc, params).unwrap();
    trace[n].rng_counter = release.draws;
    let mut journal = run.journal;
    journal.result = release.model;
    journal.final_rng_counter = release.draws;
    TranscriptBackend.commit(journal, &trace)
}

/// Closed-form probability that `k` with-replacement queries over `m`
/// indices hit one fixed index.
pub fn hit_probability(m: u64, k: usize) -> f64 {
    1.0 - (1.0 - 1.0 / m as f64).powi(k as i32)
}

pub fn blob_of(samples: Vec<SamplePair>) -> Vec<u8> {
    adpr_core::dataio::pack_blob(&Dataset { bounds: adpr_core::NormBounds::unit(), samples }).unwrap()
}

/// Flips one random bit of the journal's field bytes, retrying until the
/// result still decodes. Returns the mutated journal and the flipped offset.
pub fn mutate_journal<R: Rng>(r: &mut R, j: &adpr_core::Journal) -> (adpr_core::Journal, usize) {
    let bytes = j.canonical_bytes();
    loop {
        let mut b = bytes.clone();
        let at = r.random_range(10..b.len());
        b[at] ^= 1 << r.random_range(0..8);
        if let Some(m) = adpr_core::Journal::from_canonical_bytes(&b) {
            assert_ne!(&m, j);
            return (m, at);
        }
    }
}
