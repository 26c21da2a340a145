//! Exact arithmetic on the circle `R/Z` at a resolution of 2⁻⁵³.
//!
//! A [`Phase`] stores `k` for the point `k·2⁻⁵³ mod 1`. Integer multiples,
//! sums and negations are exact (wrapping integer arithmetic), so `mα mod 1`
//! and `j²α mod 1` carry no accumulated rounding error however large `m` or
//! `j` get, and `-α` is the exact mirror image of `α`. Conversion to `f64`
//! is exact as well.

use crate::error::{Error, Result};
use crate::math;

pub const BITS: u32 = 53;
const ONE: u64 = 1 << BITS;
const MASK: u64 = ONE - 1;
const SCALE: f64 = ONE as f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Phase(u64);

impl Phase {
    pub const ZERO: Phase = Phase(0);

    /// Rounds `x mod 1` to the nearest multiple of 2⁻⁵³.
    pub fn from_f64(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::InvalidSpec(alloc::format!("phase of non-finite {x}")));
        }
        let frac = x - math::floor(x);
        let k = math::round_half_even(frac * SCALE) as u64;
        Ok(Phase(k & MASK))
    }

    pub const fn from_raw(k: u64) -> Self {
        Phase(k & MASK)
    }

    /// The nearest grid phase to `p/q`.
    pub fn from_ratio(p: i64, q: u64) -> Self {
        assert!(q > 0, "zero denominator");
        let r = p.rem_euclid(q as i64) as u128;
        let k = ((r << (BITS + 1)) / q as u128 + 1) >> 1;
        Phase::from_raw(k as u64)
    }

    /// Fractional part of √2, correctly rounded.
    pub fn sqrt2() -> Self {
        let v = isqrt(2u128 << 108); // floor(√2 · 2^54)
        Phase::from_raw((((v + 1) >> 1) - (1u128 << 53)) as u64)
    }

    /// Fractional part of the golden ratio (√5 − 1)/2, rounded.
    pub fn golden() -> Self {
        let v = isqrt(5u128 << 108); // floor(√5 · 2^54)
        Phase::from_raw(((v - (1u128 << 54) + 2) >> 2) as u64)
    }

    pub const fn raw(self) -> u64 {
        self.0
    }

    /// Representative in `[0, 1)`; exact.
    pub fn to_f64(self) -> f64 {
        self.0 as f64 / SCALE
    }

    /// Representative in `[-1/2, 1/2)`; exact.
    pub fn centered(self) -> f64 {
        self.centered_raw() as f64 / SCALE
    }

    /// Signed integer representative in `[-2⁵², 2⁵²)`.
    pub fn centered_raw(self) -> i64 {
        if self.0 >= ONE / 2 {
            self.0 as i64 - ONE as i64
        } else {
            self.0 as i64
        }
    }

    /// Distance to the nearest integer, `‖x‖`.
    pub fn norm(self) -> f64 {
        self.0.min(ONE - self.0) as f64 / SCALE
    }

    pub fn mul_i64(self, m: i64) -> Self {
        Phase(self.0.wrapping_mul(m as u64) & MASK)
    }

    pub fn mul_u64(self, m: u64) -> Self {
        Phase(self.0.wrapping_mul(m) & MASK)
    }
}

impl core::ops::Add for Phase {
    type Output = Phase;
    fn add(self, rhs: Phase) -> Phase {
        Phase(self.0.wrapping_add(rhs.0) & MASK)
    }
}

impl core::ops::Sub for Phase {
    type Output = Phase;
    fn sub(self, rhs: Phase) -> Phase {
        Phase(self.0.wrapping_sub(rhs.0) & MASK)
    }
}

impl core::ops::Neg for Phase {
    type Output = Phase;
    fn neg(self) -> Phase {
        Phase(self.0.wrapping_neg() & MASK)
    }
}

/// Integer square root, floor.
pub(crate) fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = math::sqrt(n as f64) as u128;
    // float seed is within a few units; fix up exactly
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}
