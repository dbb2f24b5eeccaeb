//! Seed-committed randomness and Laplace sampling.
//!
//! Draw `i` of a [`NoiseStream`] is `SHA-256(seed || i_le)` truncated to its
//! first 64 bits, so any party holding the seed can recompute any draw
//! without replaying the ones before it.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::fixedq::{ArithError, FixedQ};
use crate::hash::{Digest, HexError};

/// 32-byte noise seed, supplied by whoever commissions the computation.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Seed(pub [u8; 32]);

impl Seed {
    /// Child seed `SHA-256(self || index_le)`.
    pub fn derive(&self, index: u64) -> Seed {
        Seed(Digest::of_parts(&[&self.0, &index.to_le_bytes()]).0)
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    /// Seed whose first eight bytes hold `v`; handy for sweeps and tests.
    pub fn from_u64(v: u64) -> Seed {
        let mut s = [0u8; 32];
        s[..8].copy_from_slice(&v.to_le_bytes());
        Seed(s)
    }
}

impl FromStr for Seed {
    type Err = HexError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse::<Digest>().map(|d| Seed(d.0))
    }
}

impl fmt::Debug for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Seed({})", self.to_hex())
    }
}

impl fmt::Display for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for Seed {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Seed {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Source of uniform `[0, 1)` values for the mechanism.
///
/// [`NoiseStream`] is the only production implementation; the trait exists so
/// tests can script exact draws.
pub trait UniformSource {
    fn next_uniform(&mut self) -> FixedQ;
    /// Number of draws consumed so far.
    fn counter(&self) -> u64;
}

/// Counter-mode hash stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NoiseStream {
    seed: Seed,
    counter: u64,
}

impl NoiseStream {
    pub fn new(seed: Seed) -> Self {
        NoiseStream { seed, counter: 0 }
    }

    /// Stream positioned at draw `counter`.
    pub fn at(seed: Seed, counter: u64) -> Self {
        NoiseStream { seed, counter }
    }

    pub fn seed(&self) -> Seed {
        self.seed
    }

    /// The 64-bit word at position `index`, independent of stream state.
    pub fn word_at(seed: &Seed, index: u64) -> u64 {
        Digest::of_parts(&[&seed.0, &index.to_le_bytes()]).prefix_u64()
    }

    pub fn next_word(&mut self) -> u64 {
        let w = Self::word_at(&self.seed, self.counter);
        self.counter += 1;
        w
    }
}

/// `u * 2^-64` truncated to 32 fractional bits.
#[inline]
pub fn word_to_uniform(word: u64) -> FixedQ {
    FixedQ::from_raw((word >> 32) as i64)
}

impl UniformSource for NoiseStream {
    fn next_uniform(&mut self) -> FixedQ {
        word_to_uniform(self.next_word())
    }

    fn counter(&self) -> u64 {
        self.counter
    }
}

/// Replays a fixed list of uniforms, repeating the last one when exhausted.
#[derive(Clone, Debug)]
pub struct ScriptedSource {
    values: Vec<FixedQ>,
    pos: u64,
}

impl ScriptedSource {
    pub fn new(values: Vec<FixedQ>) -> Self {
        assert!(!values.is_empty(), "scripted source needs at least one value");
        ScriptedSource { values, pos: 0 }
    }

    /// Every draw is exactly 1/2, so every Laplace sample equals its location.
    pub fn zero_noise() -> Self {
        Self::new(vec![FixedQ::HALF])
    }
}

impl UniformSource for ScriptedSource {
    fn next_uniform(&mut self) -> FixedQ {
        let i = (self.pos as usize).min(self.values.len() - 1);
        self.pos += 1;
        self.values[i]
    }

    fn counter(&self) -> u64 {
        self.pos
    }
}

/// Location and scale of a Laplace distribution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LaplaceParams {
    location: FixedQ,
    scale: FixedQ,
}

impl LaplaceParams {
    /// A zero scale is accepted; the sampler then returns the location exactly.
    pub fn new(location: FixedQ, scale: FixedQ) -> Result<Self, ArithError> {
        if scale.is_negative() {
            return Err(ArithError::Domain);
        }
        Ok(LaplaceParams { location, scale })
    }

    pub fn centered(scale: FixedQ) -> Result<Self, ArithError> {
        Self::new(FixedQ::ZERO, scale)
    }

    pub fn location(&self) -> FixedQ {
        self.location
    }

    pub fn scale(&self) -> FixedQ {
        self.scale
    }
}

/// Inverse CDF of the Laplace distribution at `u` in `[0, 1)`.
///
/// `u < 1/2` maps to `mu + b ln(2u)`, otherwise `mu - b ln(2(1 - u))`.
/// Log arguments are clamped below at 2^-32.
pub fn laplace_inverse_cdf(u: FixedQ, params: &LaplaceParams) -> Result<FixedQ, ArithError> {
    let (arg, negate) = if u < FixedQ::HALF {
        (u.checked_mul(FixedQ::TWO)?, false)
    } else {
        (FixedQ::ONE.checked_sub(u)?.checked_mul(FixedQ::TWO)?, true)
    };
    let log = arg.max(FixedQ::EPSILON).ln()?;
    let offset = params.scale.checked_mul(log)?;
    if negate {
        params.location.checked_sub(offset)
    } else {
        params.location.checked_add(offset)
    }
}

/// One Laplace draw; consumes exactly one uniform.
pub fn sample_laplace<S: UniformSource + ?Sized>(
    source: &mut S,
    params: &LaplaceParams,
) -> Result<FixedQ, ArithError> {
    laplace_inverse_cdf(source.next_uniform(), params)
}

/// Per-draw scale `3 * delta / eps`.
pub fn laplace_scale(delta: FixedQ, eps: FixedQ) -> Result<FixedQ, ArithError> {
    if !eps.is_positive() || delta.is_negative() {
        return Err(ArithError::Domain);
    }
    delta.checked_mul(FixedQ::from_int(3)?)?.checked_div(eps)
}
