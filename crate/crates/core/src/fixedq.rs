//! Signed Q31.32 fixed-point arithmetic.
//!
//! Every number the guest touches is a [`FixedQ`]: a two's-complement `i64`
//! holding `value * 2^32`. All operations are checked. Leaving the
//! representable range is an [`ArithError::Overflow`], never a wrap.
//!
//! Rounding rules:
//! - multiplication floors (toward negative infinity) to 32 fractional bits,
//! - division truncates toward zero,
//! - [`FixedQ::ln`] rounds to nearest.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Arithmetic failure inside the fixed-point domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("fixed-point overflow")]
    Overflow,
    #[error("division by zero")]
    DivisionByZero,
    #[error("argument outside the function domain")]
    Domain,
}

/// Q31.32 signed fixed-point scalar.
///
/// Serialized as its raw `i64` in decimal.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FixedQ(i64);

/// ln(2) with 64 fractional bits, rounded to nearest.
const LN2_Q64: u128 = 0xB172_17F7_D1CF_79AC;
const ONE_Q64: u128 = 1 << 64;

impl FixedQ {
    pub const FRAC_BITS: u32 = 32;
    pub const ZERO: FixedQ = FixedQ(0);
    pub const ONE: FixedQ = FixedQ(1 << 32);
    pub const HALF: FixedQ = FixedQ(1 << 31);
    pub const TWO: FixedQ = FixedQ(2 << 32);
    pub const MIN: FixedQ = FixedQ(i64::MIN);
    pub const MAX: FixedQ = FixedQ(i64::MAX);
    /// Smallest positive value, 2^-32.
    pub const EPSILON: FixedQ = FixedQ(1);
    /// ln(2) rounded to 32 fractional bits.
    pub const LN2: FixedQ = FixedQ(0xB172_17F8);

    #[inline]
    pub const fn from_raw(raw: i64) -> Self {
        FixedQ(raw)
    }

    #[inline]
    pub const fn raw(self) -> i64 {
        self.0
    }

    pub fn from_int(v: i64) -> Result<Self, ArithError> {
        v.checked_mul(1 << 32).map(FixedQ).ok_or(ArithError::Overflow)
    }

    /// `p / q` floored to 32 fractional bits.
    pub fn from_rational(p: i64, q: i64) -> Result<Self, ArithError> {
        if q == 0 {
            return Err(ArithError::DivisionByZero);
        }
        let (p, q) = if q < 0 { (-(p as i128), -(q as i128)) } else { (p as i128, q as i128) };
        narrow((p << 32).div_euclid(q))
    }

    /// Exact value as `(numerator, 2^32)`.
    pub fn to_rational(self) -> (i64, u64) {
        (self.0, 1 << 32)
    }

    /// Nearest representable value. Rejects NaN, infinities and out-of-range input.
    pub fn from_f64(v: f64) -> Result<Self, ArithError> {
        if !v.is_finite() {
            return Err(ArithError::Domain);
        }
        let scaled = (v * 4_294_967_296.0).round();
        if !(-9_223_372_036_854_775_808.0..9_223_372_036_854_775_808.0).contains(&scaled) {
            return Err(ArithError::Overflow);
        }
        Ok(FixedQ(scaled as i64))
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 4_294_967_296.0
    }

    #[inline]
    pub fn checked_add(self, rhs: Self) -> Result<Self, ArithError> {
        self.0.checked_add(rhs.0).map(FixedQ).ok_or(ArithError::Overflow)
    }

    #[inline]
    pub fn checked_sub(self, rhs: Self) -> Result<Self, ArithError> {
        self.0.checked_sub(rhs.0).map(FixedQ).ok_or(ArithError::Overflow)
    }

    /// Product through a 128-bit intermediate, floored.
    #[inline]
    pub fn checked_mul(self, rhs: Self) -> Result<Self, ArithError> {
        narrow((self.0 as i128 * rhs.0 as i128) >> 32)
    }

    /// Quotient `(a << 32) / b` in 128 bits, truncated toward zero.
    #[inline]
    pub fn checked_div(self, rhs: Self) -> Result<Self, ArithError> {
        if rhs.0 == 0 {
            return Err(ArithError::DivisionByZero);
        }
        narrow(((self.0 as i128) << 32) / rhs.0 as i128)
    }

    #[inline]
    pub fn checked_neg(self) -> Result<Self, ArithError> {
        self.0.checked_neg().map(FixedQ).ok_or(ArithError::Overflow)
    }

    #[inline]
    pub fn checked_abs(self) -> Result<Self, ArithError> {
        self.0.checked_abs().map(FixedQ).ok_or(ArithError::Overflow)
    }

    #[inline]
    pub fn is_negative(self) -> bool {
        self.0 < 0
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    /// Natural logarithm, absolute error below 2^-30.
    ///
    /// Range-reduces `u = m * 2^e` with `m` in `[1, 2)`, evaluates
    /// `ln m = 2 atanh((m - 1) / (m + 1))` by its odd power series in
    /// Q64.64, then adds `e * ln 2` and rounds once to Q31.32.
    pub fn ln(self) -> Result<Self, ArithError> {
        if self.0 <= 0 {
            return Err(ArithError::Domain);
        }
        let raw = self.0 as u128;
        let msb = 127 - raw.leading_zeros(); // 0..=62
        let exp = msb as i128 - 32;
        // m in [1, 2) with 64 fractional bits; the shift is exact since msb <= 62.
        let m = raw << (64 - msb);
        let s = ((m - ONE_Q64) << 64) / (m + ONE_Q64);
        let s2 = (s * s) >> 64;
        let mut term = s;
        let mut sum: u128 = 0;
        let mut k: u128 = 1;
        while term != 0 {
            sum += term / k;
            term = (term * s2) >> 64;
            k += 2;
        }
        let total = 2 * sum as i128 + exp * LN2_Q64 as i128;
        narrow((total + (1 << 31)) >> 32)
    }

    #[inline]
    pub fn to_le_bytes(self) -> [u8; 8] {
        self.0.to_le_bytes()
    }

    #[inline]
    pub fn from_le_bytes(bytes: [u8; 8]) -> Self {
        FixedQ(i64::from_le_bytes(bytes))
    }

    /// Total order on the raw bits; identical to value order.
    #[inline]
    pub fn cmp_raw(self, other: Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

#[inline]
fn narrow(v: i128) -> Result<FixedQ, ArithError> {
    i64::try_from(v).map(FixedQ).map_err(|_| ArithError::Overflow)
}

impl fmt::Debug for FixedQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FixedQ({} raw={})", self.to_f64(), self.0)
    }
}

impl fmt::Display for FixedQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_f64(), f)
    }
}
