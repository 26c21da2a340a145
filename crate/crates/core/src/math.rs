//! Float helpers. Everything goes through `libm` so the results do not depend
//! on which platform math library ends up linked.

use num_complex::Complex64;

pub use libm::{asin, asinh, atan2, cos, exp, floor, fma, log, pow, sin, sqrt};

pub const PI: f64 = core::f64::consts::PI;
pub const TAU: f64 = core::f64::consts::TAU;

#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub fn round_half_even(x: f64) -> f64 {
    libm::rint(x)
}

/// sin(πt) with exact argument reduction for any finite `t`.
pub fn sinpi(t: f64) -> f64 {
    if t < 0.0 {
        return -sinpi(-t);
    }
    let r = t - 2.0 * floor(t * 0.5); // exact for t ≥ 0, r in [0, 2)
    let (r, sign) = if r >= 1.0 { (r - 1.0, -1.0) } else { (r, 1.0) };
    let r = if r > 0.5 { 1.0 - r } else { r };
    sign * sin(PI * r)
}

/// cos(πt) with exact argument reduction.
pub fn cospi(t: f64) -> f64 {
    let t = t.abs();
    let r = t - 2.0 * floor(t * 0.5);
    let r = if r > 1.0 { 2.0 - r } else { r }; // cos symmetric about 1
    if r <= 0.5 {
        sin(PI * (0.5 - r))
    } else {
        -sin(PI * (r - 0.5))
    }
}

/// e(t) = exp(2πit).
#[inline]
pub fn e(t: f64) -> Complex64 {
    Complex64::new(cospi(2.0 * t), sinpi(2.0 * t))
}

/// Fractional part of `n * x` computed from the exact two-product, in [0, 1).
pub fn frac_mul(n: f64, x: f64) -> f64 {
    let hi = n * x;
    let lo = fma(n, x, -hi);
    let f = (hi - floor(hi)) + lo;
    let f = f - floor(f);
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    gcd_u64(a.unsigned_abs(), b.unsigned_abs()) as i64
}

/// Extended Euclid: returns (g, s, t) with s*a + t*b = g >= 0.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}
