//! Pair correlation of `n²α mod 1`.
//!
//! Three routes to the same family of statistics:
//!
//! * the sharp count `R₂([a,b], α, N)`,
//! * the smoothed double sum `(1/N) Σ_{|j|≠|k|} ψ(j/N) ψ(k/N) Σ_m g(N(j²α − k²α + m))`,
//! * Poisson summation in `m`, which turns the smoothed sum into
//!   `(1/N) Σ_m ĝ(m/N) |θ_ψ(mα + iN⁻²)|²` minus the diagonal `|j| = |k|`.
//!
//! All phases `j²α mod 1` are exact multiples of `2⁻⁵³` (see [`Phase`]), so
//! the sharp counts are exact integer statistics of that grid value of `α`.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math::{self, PI};
use crate::phase::{Phase, BITS};
use crate::sum::{blocked_count, blocked_sum, ComplexSum, Executor, Serial};

/// Largest `N` (or theta-sum length) for which `j²` stays below `2⁵³`.
pub const MAX_N: u64 = 94_906_265;

const ROWS_PER_JOB: usize = 64;

/// An even cutoff function `ψ` with compact support.
#[derive(Debug, Clone, PartialEq)]
pub struct Psi {
    shape: PsiShape,
    support: f64,
    integral: f64,
    square_integral: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum PsiShape {
    /// `κ exp(−1/(1 − (x/w)²))` on `(−w, w)`
    Bump { kappa: f64 },
    /// Linear interpolation of `(x, ψ(x))`, `x ≥ 0`, extended evenly.
    Table(Vec<(f64, f64)>),
}

/// `∫₋₁¹ exp(−p/(1 − t²)) dt`. The integrand is flat to all orders at the
/// endpoints, so the trapezoid rule converges faster than any power.
fn bump_moment(p: f64) -> f64 {
    const N: usize = 4096;
    let h = 2.0 / N as f64;
    let mut s = crate::CompensatedSum::new();
    for i in 1..N {
        let t = -1.0 + i as f64 * h;
        s.add(math::exp(-p / (1.0 - t * t)));
    }
    s.value() * h
}

impl Psi {
    /// The smooth bump on `(−w, w)` normalized to `∫ψ = 1`.
    pub fn bump(half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidSpec(format!("bump half-width must be positive, got {half_width}")));
        }
        let i1 = bump_moment(1.0);
        let i2 = bump_moment(2.0);
        let kappa = 1.0 / (half_width * i1);
        Ok(Self {
            shape: PsiShape::Bump { kappa },
            support: half_width,
            integral: 1.0,
            square_integral: kappa * kappa * half_width * i2,
        })
    }

    /// Piecewise-linear `ψ` from samples at `0 = x₀ < x₁ < … < x_n`, with
    /// `ψ(x_n) = 0`; evaluated at `|x|`.
    pub fn table(points: Vec<(f64, f64)>) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidSpec(format!("psi table: {m}")));
        if points.len() < 2 {
            return bad("need at least two points");
        }
        if points[0].0 != 0.0 {
            return bad("first abscissa must be 0");
        }
        if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return bad("abscissae must increase strictly");
        }
        if points.iter().any(|(x, v)| !x.is_finite() || !v.is_finite()) {
            return bad("non-finite entry");
        }
        let (support, last) = points[points.len() - 1];
        if last != 0.0 {
            return bad("last value must be 0");
        }
        let (mut int, mut sq) = (0.0, 0.0);
        for w in points.windows(2) {
            let (h, a, b) = (w[1].0 - w[0].0, w[0].1, w[1].1);
            int += h * (a + b) / 2.0;
            sq += h * (a * a + a * b + b * b) / 3.0;
        }
        Ok(Self { shape: PsiShape::Table(points), support, integral: 2.0 * int, square_integral: 2.0 * sq })
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let x = x.abs();
        if x >= self.support {
            return 0.0;
        }
        match &self.shape {
            PsiShape::Bump { kappa } => {
                let t = x / self.support;
                kappa * math::exp(-1.0 / (1.0 - t * t))
            }
            PsiShape::Table(pts) => {
                let i = pts.partition_point(|p| p.0 <= x);
                let (x0, v0) = pts[i - 1];
                let (x1, v1) = pts[i];
                v0 + (v1 - v0) * (x - x0) / (x1 - x0)
            }
        }
    }

    /// `ψ(x) = 0` for `|x| ≥ support`.
    pub fn support(&self) -> f64 {
        self.support
    }

    /// `∫ψ`
    pub fn integral(&self) -> f64 {
        self.integral
    }

    /// `∫ψ²`
    pub fn square_integral(&self) -> f64 {
        self.square_integral
    }
}

/// A window `g ≥ 0` whose Fourier transform `ĝ` is even, piecewise linear and
/// compactly supported. Such a `ĝ` is a finite combination
/// `Σ c_k (u_k − |u|)₊`, so `g(x) = Σ c_k u_k² sinc²(u_k x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    /// `(c_k, u_k)`
    parts: Vec<(f64, f64)>,
    support: f64,
}

fn sinc2(t: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    let s = math::sinpi(t) / (PI * t);
    s * s
}

impl Window {
    /// `ĝ(u) = max(0, 1 − |u|/s)`, `g(x) = s·sinc²(sx)`, `∫g = 1`.
    pub fn fejer(scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidSpec(format!("Fejér scale must be positive, got {scale}")));
        }
        Ok(Self { parts: alloc::vec![(1.0 / scale, scale)], support: scale })
    }

    /// `ĝ` from samples at `0 = u₀ < … < u_n` with `ĝ(u_n) = 0`. Rejected if
    /// the resulting `g` goes negative.
    pub fn table(points: Vec<(f64, f64)>) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidSpec(format!("g-hat table: {m}")));
        if points.len() < 2 || points[0].0 != 0.0 {
            return bad("need at least two points starting at u = 0");
        }
        if points.windows(2).any(|w| !(w[1].0 > w[0].0)) || points.iter().any(|p| !p.1.is_finite()) {
            return bad("abscissae must increase strictly, values finite");
        }
        let n = points.len() - 1;
        if points[n].1 != 0.0 {
            return bad("last value must be 0");
        }
        let slope = |i: usize| (points[i].1 - points[i - 1].1) / (points[i].0 - points[i - 1].0);
        let mut parts = Vec::new();
        for k in 1..=n {
            let next = if k < n { slope(k + 1) } else { 0.0 };
            let c = next - slope(k);
            if c != 0.0 {
                parts.push((c, points[k].0));
            }
        }
        let w = Self { parts, support: points[n].0 };
        let peak = w.g(0.0).abs().max(f64::MIN_POSITIVE);
        for i in 0..4000 {
            let x = i as f64 * 0.01 / w.support;
            if w.g(x) < -1e-12 * peak {
                return bad("g is negative somewhere");
            }
        }
        Ok(w)
    }

    /// `ĝ(u) = 0` for `|u| ≥ support`.
    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn g_hat(&self, u: f64) -> f64 {
        let u = u.abs();
        self.parts.iter().map(|&(c, s)| if u < s { c * (s - u) } else { 0.0 }).sum()
    }

    pub fn g(&self, x: f64) -> f64 {
        self.parts.iter().map(|&(c, s)| c * s * s * sinc2(s * x)).sum()
    }

    /// `∫g = ĝ(0)`
    pub fn integral(&self) -> f64 {
        self.g_hat(0.0)
    }

    /// `Σ_m g(N(d + m))` for `d = D/2⁵³`, via its finite Fourier series.
    /// When `u_k N` is an integer `L` the series is a Fejér kernel
    /// `(1/L)(sin πLd / sin πd)²`, evaluated with exact reduction of `Ld`.
    pub fn periodized(&self, d: Phase, n: u64) -> f64 {
        let nf = n as f64;
        let mut total = 0.0;
        for &(c, s) in &self.parts {
            let l = s * nf;
            let part = if l == math::floor(l) && l < 4_503_599_627_370_496.0 {
                fejer_kernel(d, l as u64)
            } else {
                // (1/L)·Σ_{|k| < L} (L − |k|) e(kd) with non-integral L
                let kmax = math::floor(l) as i64;
                let mut acc = l;
                for k in 1..=kmax {
                    let ph = d.mul_i64(k).centered();
                    acc += 2.0 * (l - k as f64) * math::cospi(2.0 * ph);
                }
                acc / l
            };
            total += c * s * part / nf;
        }
        total
    }
}

/// `F_L(d) = Σ_{|k|<L} (1 − |k|/L) e(kd) = (1/L)(sin πLd / sin πd)²`
fn fejer_kernel(d: Phase, l: u64) -> f64 {
    if d == Phase::ZERO {
        return l as f64;
    }
    let num = math::sinpi(d.mul_u64(l).centered());
    let den = math::sinpi(d.centered());
    num * num / (den * den * l as f64)
}

/// The smoothing pair `(g, ψ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowPair {
    pub g: Window,
    pub psi: Psi,
}

impl Default for WindowPair {
    /// Fejér `g` with `ĝ(u) = max(0, 1 − |u|)` and the unit bump `ψ`.
    fn default() -> Self {
        Self { g: Window::fejer(1.0).expect("valid"), psi: Psi::bump(1.0).expect("valid") }
    }
}

impl WindowPair {
    /// The limit `∫g · (∫ψ)²` of the smoothed statistic for Poissonian sequences.
    pub fn poisson_limit(&self) -> f64 {
        self.g.integral() * self.psi.integral() * self.psi.integral()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Form {
    Sharp { a: f64, b: f64 },
    Smoothed,
    Theta,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairCorrResult {
    pub n: u64,
    pub value: f64,
    pub form: Form,
    pub alpha: f64,
}

fn check_n(n: u64) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidSpec(format!("N must be at least 2, got {n}")));
    }
    if n > MAX_N {
        return Err(Error::PrecisionExceeded(format!("N = {n} exceeds {MAX_N} (j² would pass 2^53)")));
    }
    Ok(())
}

/// `{j²α mod 1}` for `j = 0..=n`.
fn square_phases(alpha: Phase, n: u64) -> Vec<Phase> {
    (0..=n).map(|j| alpha.mul_u64(j * j)).collect()
}

/// `[a/N, b/N]` as an inclusive interval of `2⁻⁵³` grid offsets.
fn grid_window(n: u64, a: f64, b: f64) -> (i128, i128) {
    let scale = (1u64 << BITS) as f64;
    let lo = math::ceil(a / n as f64 * scale) as i128;
    let hi = math::floor(b / n as f64 * scale) as i128;
    (lo, hi)
}

/// Does `D + m·2⁵³` fall in `[lo, hi]` for some `m`? (At most one does.)
fn in_window(d: Phase, lo: i128, hi: i128) -> bool {
    window_hits(d, lo, hi) > 0
}

/// Number of integers `m` with `lo ≤ D + m·2⁵³ ≤ hi`.
fn window_hits(d: Phase, lo: i128, hi: i128) -> u64 {
    if hi < lo {
        return 0;
    }
    let one = 1i128 << BITS;
    let d = d.raw() as i128;
    let m_lo = (lo - d).div_euclid(one) + i128::from((lo - d).rem_euclid(one) != 0);
    let m_hi = (hi - d).div_euclid(one);
    (m_hi - m_lo + 1).max(0) as u64
}

fn check_interval(n: u64, a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(Error::InvalidSpec(format!("need a ≤ b, got [{a}, {b}]")));
    }
    if b - a >= n as f64 {
        return Err(Error::InvalidSpec(format!("window width {} must be below N = {n}", b - a)));
    }
    Ok(())
}

/// `R₂([a,b], α, N) = (1/N)·#{1 ≤ j ≠ k ≤ N : j²α − k²α ∈ [a/N, b/N] + Z}`.
pub fn r2_sharp(alpha: Phase, n: u64, a: f64, b: f64) -> Result<f64> {
    r2_sharp_with(&Serial, alpha, n, a, b)
}

pub fn r2_sharp_with<E: Executor + ?Sized>(exec: &E, alpha: Phase, n: u64, a: f64, b: f64) -> Result<f64> {
    Ok(sharp_count(exec, alpha, n, a, b)? as f64 / n as f64)
}

fn sharp_count<E: Executor + ?Sized>(exec: &E, alpha: Phase, n: u64, a: f64, b: f64) -> Result<u64> {
    check_n(n)?;
    check_interval(n, a, b)?;
    let (lo, hi) = grid_window(n, a, b);
    if hi < lo {
        return Ok(0);
    }
    let phases = square_phases(alpha, n);
    let mut sorted: Vec<u64> = phases[1..].iter().map(|p| p.raw()).collect();
    sorted.sort_unstable();
    let one = 1u64 << BITS;
    let width = (hi - lo) as u64;
    // S_j − S_k ≡ t with t ∈ [lo, hi]  ⇔  S_k ∈ [S_j − hi, S_j − lo] (mod 2⁵³)
    let count = blocked_count(exec, 1..n as i64 + 1, 4096, |j| {
        let start = (phases[j as usize].raw() as i128 - hi).rem_euclid(one as i128) as u64;
        circular_count(&sorted, start, width, one)
    });
    let self_pairs = if in_window(Phase::ZERO, lo, hi) { n } else { 0 };
    Ok(count - self_pairs)
}

/// Number of sorted values in the circular interval `[start, start + width]`
/// of `Z/one`, `width < one`.
fn circular_count(sorted: &[u64], start: u64, width: u64, one: u64) -> u64 {
    let end = start + width;
    let below = |v: u64| sorted.partition_point(|&s| s < v) as u64;
    if end < one {
        below(end + 1) - below(start)
    } else {
        (sorted.len() as u64 - below(start)) + below(end - one + 1)
    }
}

/// The direct `O(N²)` count, kept as a reference for [`r2_sharp`].
pub fn r2_sharp_reference(alpha: Phase, n: u64, a: f64, b: f64) -> Result<f64> {
    check_n(n)?;
    check_interval(n, a, b)?;
    let (lo, hi) = grid_window(n, a, b);
    let phases = square_phases(alpha, n);
    let mut count = 0u64;
    for j in 1..=n as usize {
        for k in 1..=n as usize {
            if j != k && in_window(phases[j] - phases[k], lo, hi) {
                count += 1;
            }
        }
    }
    Ok(count as f64 / n as f64)
}

/// Both sides of the factor-4 identity: the signed sum
/// `(1/N) Σ_{0<|j|≠|k|≤N} Σ_m χ_[a,b](N(j²α − k²α + m))` and `4·R₂([a,b],α,N)`.
pub fn sharp_smoothed_bridge(alpha: Phase, n: u64, a: f64, b: f64) -> Result<(f64, f64)> {
    check_n(n)?;
    check_interval(n, a, b)?;
    let (lo, hi) = grid_window(n, a, b);
    let ni = n as i64;
    let mut count = 0u64;
    for j in -ni..=ni {
        for k in -ni..=ni {
            if j == 0 || k == 0 || j.abs() == k.abs() {
                continue;
            }
            let d = alpha.mul_i64(j * j) - alpha.mul_i64(k * k);
            count += window_hits(d, lo, hi);
        }
    }
    let lhs = count as f64 / n as f64;
    let rhs = 4.0 * r2_sharp(alpha, n, a, b)?;
    Ok((lhs, rhs))
}

struct Smoothing {
    phases: Vec<Phase>,
    weights: Vec<f64>,
}

impl Smoothing {
    /// `ψ(j/N)` and `j²α` for `0 ≤ j < support·N`.
    fn new(alpha: Phase, n: u64, psi: &Psi) -> Self {
        let jmax = math::ceil(psi.support() * n as f64) as u64;
        let weights: Vec<f64> = (0..=jmax).map(|j| psi.eval(j as f64 / n as f64)).collect();
        Self { phases: square_phases(alpha, jmax), weights }
    }

    /// `Σ_{j∈Z} ψ(j/N)²`
    fn square_sum(&self) -> f64 {
        let s: crate::CompensatedSum = self.weights.iter().skip(1).map(|w| w * w).collect();
        self.weights[0] * self.weights[0] + 2.0 * s.value()
    }
}

/// `(2/N)(Σ_j ψ(j/N)² − ψ(0)²/2) Σ_m g(Nm)`: the `|j| = |k|` part of the
/// full double sum.
pub fn diagonal_term(n: u64, w: &WindowPair) -> Result<f64> {
    check_n(n)?;
    let sm = Smoothing::new(Phase::ZERO, n, &w.psi);
    Ok(diagonal(&sm, n, w))
}

fn diagonal(sm: &Smoothing, n: u64, w: &WindowPair) -> f64 {
    let psi0 = sm.weights[0];
    2.0 / n as f64 * (sm.square_sum() - psi0 * psi0 / 2.0) * w.g.periodized(Phase::ZERO, n)
}

/// The smoothed statistic by direct summation over pairs `|j| ≠ |k|`.
pub fn r2_smoothed(alpha: Phase, n: u64, w: &WindowPair) -> Result<f64> {
    r2_smoothed_with(&Serial, alpha, n, w)
}

pub fn r2_smoothed_with<E: Executor + ?Sized>(exec: &E, alpha: Phase, n: u64, w: &WindowPair) -> Result<f64> {
    check_n(n)?;
    let sm = Smoothing::new(alpha, n, &w.psi);
    let len = sm.weights.len() as i64;
    let mult = |j: usize| if j == 0 { 1.0 } else { 2.0 };
    // unordered pairs a < b of nonnegative indices, each standing for
    // mult(a)·mult(b) signed pairs, counted twice for (j,k) and (k,j)
    let total = blocked_sum(exec, 0..len, ROWS_PER_JOB, |a| {
        let a = a as usize;
        let wa = sm.weights[a];
        if wa == 0.0 {
            return 0.0;
        }
        let mut row = crate::CompensatedSum::new();
        for b in a + 1..sm.weights.len() {
            let wb = sm.weights[b];
            if wb != 0.0 {
                row.add(mult(b) * wb * w.g.periodized(sm.phases[a] - sm.phases[b], n));
            }
        }
        2.0 * mult(a) * wa * row.value()
    });
    Ok(total.value() / n as f64)
}

/// `θ_ψ(x + iy) = y^{1/4} Σ_j ψ(j√y) e(j²x)`.
pub fn theta_sum(psi: &Psi, x: f64, y: f64) -> Result<Complex64> {
    if !(y > 0.0 && y.is_finite() && x.is_finite()) {
        return Err(Error::InvalidSpec(format!("theta sum needs y > 0, got x = {x}, y = {y}")));
    }
    let sy = math::sqrt(y);
    let jmax = math::floor(psi.support() / sy);
    if jmax > MAX_N as f64 {
        return Err(Error::PrecisionExceeded(format!("theta sum at y = {y} needs {jmax} terms")));
    }
    let mut s = ComplexSum::default();
    for j in 1..=jmax as u64 {
        let v = psi.eval(j as f64 * sy);
        if v != 0.0 {
            s.add(math::e(math::frac_mul((j * j) as f64, x)) * v);
        }
    }
    let total = s.value() * 2.0 + psi.eval(0.0);
    Ok(total * math::sqrt(sy))
}

/// `|θ_ψ(x + iN⁻²)|²` at an exact grid phase `x`.
fn theta_modulus_sq(sm: &Smoothing, x: Phase, n: u64) -> f64 {
    let mut s = ComplexSum::default();
    for (j, &w) in sm.weights.iter().enumerate().skip(1) {
        if w != 0.0 {
            let ph = x.mul_u64((j * j) as u64).to_f64();
            s.add(math::e(ph) * w);
        }
    }
    let t = s.value() * 2.0 + sm.weights[0];
    t.norm_sqr() / n as f64
}

/// `(1/N) Σ_m ĝ(m/N) |θ_ψ(mα + iN⁻²)|²`, the full double sum including the
/// diagonal.
pub fn r2_full_via_theta<E: Executor + ?Sized>(exec: &E, alpha: Phase, n: u64, w: &WindowPair) -> Result<f64> {
    check_n(n)?;
    let sm = Smoothing::new(Phase::ZERO, n, &w.psi);
    let psi_sq = Smoothing { phases: Vec::new(), weights: sm.weights };
    let mmax = math::ceil(w.g.support() * n as f64) as i64;
    let total = blocked_sum(exec, 0..mmax + 1, 16, |m| {
        let gh = w.g.g_hat(m as f64 / n as f64);
        if gh == 0.0 {
            return 0.0;
        }
        let mult = if m == 0 { 1.0 } else { 2.0 };
        mult * gh * theta_modulus_sq(&psi_sq, alpha.mul_i64(m), n)
    });
    Ok(total.value() / n as f64)
}

/// The smoothed statistic through theta sums: the Poisson-dual form minus
/// the diagonal term.
pub fn r2_via_theta(alpha: Phase, n: u64, w: &WindowPair) -> Result<f64> {
    r2_via_theta_with(&Serial, alpha, n, w)
}

pub fn r2_via_theta_with<E: Executor + ?Sized>(exec: &E, alpha: Phase, n: u64, w: &WindowPair) -> Result<f64> {
    let full = r2_full_via_theta(exec, alpha, n, w)?;
    Ok(full - diagonal_term(n, w)?)
}
