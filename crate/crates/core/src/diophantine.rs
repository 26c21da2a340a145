//! Continued fractions, diophantine type, the sums `Σ min(M, 1/‖nα‖)`, the
//! admissible exponent `ν(β, K)` and Liouville-type counterexamples whose
//! Kronecker points escape into the cusp.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::math;
use crate::phase::Phase;
use crate::sum::{chunked_sum, Executor, Serial};

/// Largest denominator of a certified counterexample level, and of a float
/// continued fraction that is allowed to terminate.
pub const Q_CAP: u64 = 1 << 20;

/// Deepest continued fraction expansion accepted for a float input.
pub const FLOAT_DEPTH_CAP: usize = 40;

const MAX_MIN_SUM_N: u64 = 10_000_000;

/// A real number as it enters an experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alpha {
    Sqrt2,
    /// `(1 + √5)/2`
    Golden,
    E,
    Rational(i64, u64),
    Float(f64),
}

impl Alpha {
    pub fn value(&self) -> f64 {
        match *self {
            Alpha::Sqrt2 => core::f64::consts::SQRT_2,
            Alpha::Golden => 1.618_033_988_749_895,
            Alpha::E => core::f64::consts::E,
            Alpha::Rational(p, q) => p as f64 / q as f64,
            Alpha::Float(x) => x,
        }
    }

    /// `α mod 1` on the `2⁻⁵³` grid; correctly rounded for the symbolic cases.
    pub fn phase(&self) -> Phase {
        match *self {
            Alpha::Sqrt2 => Phase::sqrt2(),
            Alpha::Golden => Phase::golden(),
            Alpha::Rational(p, q) => Phase::from_ratio(p, q),
            _ => Phase::from_f64(self.value()).expect("finite by construction"),
        }
    }
}

impl FromStr for Alpha {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidSpec(format!("cannot read {s:?} as a real number"));
        match s {
            "sqrt2" => return Ok(Alpha::Sqrt2),
            "golden" => return Ok(Alpha::Golden),
            "e" => return Ok(Alpha::E),
            _ => {}
        }
        if let Some((p, q)) = s.split_once('/') {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: u64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 || q > i64::MAX as u64 {
                return Err(bad());
            }
            return Ok(Alpha::Rational(p, q));
        }
        let x: f64 = s.parse().map_err(|_| bad())?;
        if !x.is_finite() {
            return Err(bad());
        }
        Ok(Alpha::Float(x))
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Sqrt2 => f.write_str("sqrt2"),
            Alpha::Golden => f.write_str("golden"),
            Alpha::E => f.write_str("e"),
            Alpha::Rational(p, q) => write!(f, "{p}/{q}"),
            Alpha::Float(x) => write!(f, "{x:?}"),
        }
    }
}

/// `[a₀; a₁, a₂, …]` with its convergents `p_j/q_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContinuedFraction {
    quotients: Vec<i64>,
    convergents: Vec<(i128, i128)>,
    terminating: bool,
}

impl ContinuedFraction {
    /// Builds the convergents by the usual recurrence. `a_j ≥ 1` for `j ≥ 1`.
    pub fn from_quotients(quotients: Vec<i64>, terminating: bool) -> Result<Self> {
        if quotients.is_empty() {
            return Err(Error::InvalidSpec("empty continued fraction".into()));
        }
        if quotients[1..].iter().any(|&a| a < 1) {
            return Err(Error::InvalidSpec("partial quotients after a0 must be positive".into()));
        }
        let mut convergents = Vec::with_capacity(quotients.len());
        let (mut p2, mut q2, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
        for &a in &quotients {
            let a = a as i128;
            let step = |x1: i128, x2: i128| a.checked_mul(x1).and_then(|v| v.checked_add(x2));
            let (Some(p), Some(q)) = (step(p1, p2), step(q1, q2)) else {
                return Err(Error::PrecisionExceeded(format!(
                    "convergent {} overflows 128-bit integers",
                    convergents.len()
                )));
            };
            convergents.push((p, q));
            (p2, q2, p1, q1) = (p1, q1, p, q);
        }
        Ok(Self { quotients, convergents, terminating })
    }

    pub fn quotients(&self) -> &[i64] {
        &self.quotients
    }

    pub fn convergents(&self) -> &[(i128, i128)] {
        &self.convergents
    }

    /// True when the expansion is complete (the number is the last convergent).
    pub fn is_terminating(&self) -> bool {
        self.terminating
    }

    pub fn len(&self) -> usize {
        self.quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotients.is_empty()
    }

    /// `[a_j; a_{j+1}, …, a_last + bump]` evaluated from the back.
    fn complete_quotient(&self, j: usize, bump: f64) -> f64 {
        let mut x = self.quotients[self.quotients.len() - 1] as f64 + bump;
        for &a in self.quotients[j..self.quotients.len() - 1].iter().rev() {
            x = a as f64 + 1.0 / x;
        }
        x
    }

    /// The value of the truncated expansion.
    pub fn value(&self) -> f64 {
        self.complete_quotient(0, 0.0)
    }

    /// `|α − p_j/q_j|` through `|q_j α − p_j| = 1/(q_j x_{j+1} + q_{j−1})`,
    /// which avoids the cancellation of the direct difference. A truncated
    /// expansion only pins the last complete quotient to `[a_last, a_last + 1]`,
    /// so the smaller of the two ends is returned.
    fn approximation_error(&self, j: usize) -> f64 {
        let q = self.convergents[j].1 as f64;
        let q_prev = if j == 0 { 0.0 } else { self.convergents[j - 1].1 as f64 };
        let err = |bump| 1.0 / (q * (q * self.complete_quotient(j + 1, bump) + q_prev));
        if self.terminating {
            err(0.0)
        } else {
            err(0.0).min(err(1.0))
        }
    }
}

/// Continued fraction of `alpha` to `depth` partial quotients (including `a₀`).
///
/// Symbolic inputs use their exact quotient patterns. A float is expanded
/// exactly as the dyadic rational it is, keeping only the quotients shared by
/// every real within half an ulp; it terminates at `p/q` when `q ≤ 2²⁰` and
/// `|α − p/q|` is at most one ulp.
pub fn continued_fraction(alpha: &Alpha, depth: usize) -> Result<ContinuedFraction> {
    if depth == 0 {
        return Err(Error::InvalidSpec("depth must be at least 1".into()));
    }
    let pattern = |a0: i64, f: &dyn Fn(usize) -> i64| {
        let q: Vec<i64> = core::iter::once(a0).chain((1..depth).map(f)).collect();
        ContinuedFraction::from_quotients(q, false)
    };
    match *alpha {
        Alpha::Sqrt2 => pattern(1, &|_| 2),
        Alpha::Golden => pattern(1, &|_| 1),
        Alpha::E => pattern(2, &|k| if k % 3 == 2 { 2 * (k as i64 + 1) / 3 } else { 1 }),
        Alpha::Rational(p, q) => rational_cf(p as i128, q as i128, depth),
        Alpha::Float(x) => float_cf(x, depth),
    }
}

fn rational_cf(mut n: i128, mut d: i128, depth: usize) -> Result<ContinuedFraction> {
    let mut quotients = Vec::new();
    while quotients.len() < depth {
        let a = n.div_euclid(d);
        quotients.push(a as i64);
        let r = n - a * d;
        if r == 0 {
            return ContinuedFraction::from_quotients(quotients, true);
        }
        (n, d) = (d, r);
    }
    ContinuedFraction::from_quotients(quotients, false)
}

/// `x = m·2^e` exactly.
fn decompose(x: f64) -> (BigInt, i32) {
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (m, e) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
    (BigInt::from(sign) * BigInt::from(m), e)
}

fn float_cf(x: f64, depth: usize) -> Result<ContinuedFraction> {
    if depth > FLOAT_DEPTH_CAP {
        return Err(Error::DepthUnreliable(depth));
    }
    let (m, e) = decompose(x);
    if e >= 0 {
        let v = (m << e as usize).to_i64().ok_or_else(|| Error::PrecisionExceeded(format!("{x} as an integer")))?;
        return ContinuedFraction::from_quotients(alloc::vec![v], true);
    }
    let b = BigInt::one() << (-e) as usize;
    // α = m/b, ulp = 1/b, and the two half-ulp neighbours
    let two = BigInt::from(2);
    let mut states = [
        (m.clone(), b.clone()),
        (&two * &m - 1, &two * &b),
        (&two * &m + 1, &two * &b),
    ];
    let mut quotients: Vec<i64> = Vec::new();
    let (mut p2, mut q2, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let cap = BigInt::from(Q_CAP);
    while quotients.len() < depth {
        let j = quotients.len();
        let (n, d) = &states[0];
        // does rounding this complete quotient land on α within an ulp?
        let a_round = (&two * n + d).div_floor(&(&two * d));
        let p = &a_round * &p1 + &p2;
        let q = &a_round * &q1 + &q2;
        if q.is_positive() && q <= cap && (&m * &q - &p * &b).abs() <= q {
            quotients.push(small(&a_round)?);
            return ContinuedFraction::from_quotients(quotients, true);
        }
        let floors: Vec<Option<BigInt>> =
            states.iter().map(|(n, d)| if d.is_zero() { None } else { Some(n.div_floor(d)) }).collect();
        let a = floors[0].clone().expect("α has not terminated");
        if floors[1].as_ref() != Some(&a) || floors[2].as_ref() != Some(&a) {
            return Err(Error::DepthUnreliable(j));
        }
        quotients.push(small(&a)?);
        for (n, d) in states.iter_mut() {
            let r = &*n - &a * &*d;
            *n = core::mem::replace(d, r);
        }
        let p = &a * &p1 + &p2;
        let q = &a * &q1 + &q2;
        (p2, q2) = (core::mem::replace(&mut p1, p), core::mem::replace(&mut q1, q));
        if states[0].1.is_zero() {
            return ContinuedFraction::from_quotients(quotients, true);
        }
    }
    ContinuedFraction::from_quotients(quotients, false)
}

fn small(a: &BigInt) -> Result<i64> {
    a.to_i64().ok_or_else(|| Error::PrecisionExceeded(format!("partial quotient {a} exceeds 64 bits")))
}

/// An empirical diophantine type: `|α − p/q| > C/q^K` on the convergents used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypeEstimate {
    pub k: f64,
    pub c: f64,
    pub depth: usize,
}

/// Fits `K` as the least-squares slope of `log(1/|α − p_j/q_j|)` against
/// `log q_j` (floored at 2), then takes `C` as 0.99 times the smallest
/// `q_j^K |α − p_j/q_j|`. The last convergent has no known tail and is not used.
pub fn estimate_type(cf: &ContinuedFraction, alpha: f64) -> Result<TypeEstimate> {
    if cf.len() < 3 {
        return Err(Error::InvalidSpec(format!("need at least 3 convergents, got {}", cf.len())));
    }
    let n = cf.len();
    let tol = 2.0 / (cf.convergents[n - 2].1 as f64 * cf.convergents[n - 1].1 as f64) + 1e-12 * alpha.abs().max(1.0);
    if (cf.value() - alpha).abs() > tol {
        return Err(Error::InvalidSpec(format!("continued fraction {} does not expand {alpha}", cf.value())));
    }
    let used = cf.len() - 1;
    let pts: Vec<(f64, f64, f64)> = (0..used)
        .map(|j| {
            let err = cf.approximation_error(j);
            let q = cf.convergents[j].1 as f64;
            (math::log(q), -math::log(err), err)
        })
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 2.0 };
    let k = slope.max(2.0);
    let c = 0.99 * pts.iter().map(|&(lq, _, err)| math::exp(k * lq) * err).fold(f64::INFINITY, f64::min);
    Ok(TypeEstimate { k, c, depth: used })
}

/// `Σ_{n=N₁}^{N₂} min(M, 1/‖nα‖)`, with `‖nα‖` exact on the `2⁻⁵³` grid.
pub fn min_norm_sum(alpha: Phase, m: f64, n1: u64, n2: u64) -> Result<f64> {
    min_norm_sum_with(&Serial, alpha, m, n1, n2)
}

pub fn min_norm_sum_with<E: Executor + ?Sized>(exec: &E, alpha: Phase, m: f64, n1: u64, n2: u64) -> Result<f64> {
    if !(1 <= n1 && n1 <= n2 && n2 <= MAX_MIN_SUM_N) {
        return Err(Error::InvalidSpec(format!("need 1 ≤ N1 ≤ N2 ≤ 10^7, got N1 = {n1}, N2 = {n2}")));
    }
    if !(m > 0.0) {
        return Err(Error::InvalidSpec(format!("M must be positive, got {m}")));
    }
    let s = chunked_sum(exec, n1 as i64..n2 as i64 + 1, |n| {
        let d = alpha.mul_i64(n).norm();
        if d == 0.0 {
            m
        } else {
            m.min(1.0 / d)
        }
    });
    Ok(s.value())
}

/// The supremum of admissible `ν` for type-`K` numbers and cusp growth `β`:
///
/// * `2/(1 + 2β)` for `β < (3 − K)/(2(K − 1))`,
/// * `2/(2Kβ + K − 2)` up to `β < 1/2`,
/// * `2/(2K + 2β − 3)` for `β ≥ 1/2`.
pub fn admissible_nu(beta: f64, k: f64) -> Result<f64> {
    if !(beta >= 0.0 && beta.is_finite()) || !(k >= 2.0 && k.is_finite()) {
        return Err(Error::InvalidSpec(format!("need β ≥ 0 and K ≥ 2, got β = {beta}, K = {k}")));
    }
    let first = (3.0 - k) / (2.0 * (k - 1.0));
    Ok(if beta < first {
        2.0 / (1.0 + 2.0 * beta)
    } else if beta < 0.5 {
        2.0 / (2.0 * k * beta + k - 2.0)
    } else {
        2.0 / (2.0 * k + 2.0 * beta - 3.0)
    })
}

/// `ν = r/s` exactly when `s ≤ 64` works, else the nearest `r/1024` below.
fn rational_below(nu: f64) -> Result<(u64, u64)> {
    for s in 1..=64u64 {
        let r = nu * s as f64;
        if r == math::floor(r) && r >= 1.0 && r < 1e6 {
            let g = math::gcd_u64(r as u64, s);
            return Ok((r as u64 / g, s / g));
        }
    }
    let r = math::floor(nu * 1024.0);
    if !(r >= 1.0 && r < 1e6) {
        return Err(Error::InvalidSpec(format!("ν = {nu} out of the supported range")));
    }
    let g = math::gcd_u64(r as u64, 1024);
    Ok((r as u64 / g, 1024 / g))
}

fn exact_nu(nu: f64) -> Option<(u64, u64)> {
    rational_below(nu).ok().filter(|&(r, s)| r as f64 / s as f64 == nu && s <= 64)
}

fn big(v: u64) -> BigInt {
    BigInt::from(v)
}

/// A Liouville-type `α = [0; 2, a₂, …, a_{L+1}]` with
/// `|α − p_j/q_j| ≤ (3q_j)^{−2−2/ν}` at each level `j = 1..=L`.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub nu: f64,
    /// The rational `r/s ≤ ν` whose exponent `2 + 2s/r` was certified.
    pub nu_certified: (u64, u64),
    /// Float value of the rational `α`.
    pub alpha: f64,
    pub cf: ContinuedFraction,
    /// `q_j` for the certified levels.
    pub level_denominators: Vec<u64>,
}

/// Builds the counterexample by choosing `a_{j+1} ≥ (3q_j)^{2+2/ν}/q_j`, so
/// that `|α − p_j/q_j| < 1/(q_j q_{j+1}) ≤ (3q_j)^{−2−2/ν}`, and certifies each
/// level in exact integer arithmetic. Levels need `q_j ≤ 2²⁰`.
pub fn make_counterexample(nu: f64, levels: usize) -> Result<Counterexample> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(Error::InvalidSpec(format!("ν must be positive, got {nu}")));
    }
    if levels == 0 {
        return Err(Error::InvalidSpec("need at least one level".into()));
    }
    let (r, s) = rational_below(nu)?;
    let expo = (2.0 * r as f64 + 2.0 * s as f64) / r as f64;
    let mut quotients = alloc::vec![0i64, 2];
    let mut qs: Vec<(BigInt, BigInt)> = alloc::vec![(big(0), big(1)), (big(1), big(2))];
    let mut level_denominators = Vec::new();
    for _ in 0..levels {
        let (ref p1, ref q1) = qs[qs.len() - 1];
        let q = q1.to_u64().filter(|&q| q <= Q_CAP).ok_or_else(|| {
            Error::PrecisionExceeded(format!("level denominator {q1} exceeds 2^20; lower the level count"))
        })?;
        level_denominators.push(q);
        // smallest a with (a q)^r ≥ (3q)^(2r+2s)
        let target = (big(3) * q1).pow((2 * r + 2 * s) as u32);
        let ok = |a: &BigInt| (a * q1).pow(r as u32) >= target;
        let guess = math::pow(3.0 * q as f64, expo) / q as f64;
        if !(guess < 9.0e18) {
            return Err(Error::PrecisionExceeded(format!("partial quotient {guess:e} exceeds 64 bits")));
        }
        let mut a = BigInt::from(math::ceil(guess) as u64).max(big(1));
        while !ok(&a) {
            a += 1;
        }
        while a > big(1) && ok(&(&a - 1)) {
            a -= 1;
        }
        quotients.push(small(&a)?);
        let (p2, q2) = &qs[qs.len() - 2];
        let next = (&a * p1 + p2, &a * q1 + q2);
        qs.push(next);
    }
    let (pa, qa) = qs.last().cloned().expect("nonempty");
    // exact certification: (q_j Q)^r ≥ |P q_j − p_j Q|^r (3 q_j)^(2r+2s)
    for (p, q) in &qs[1..qs.len() - 1] {
        let diff = (&pa * q - p * &qa).abs();
        let lhs = (q * &qa).pow(r as u32);
        let rhs = diff.pow(r as u32) * (big(3) * q).pow((2 * r + 2 * s) as u32);
        if lhs < rhs {
            return Err(Error::SelfCheck(format!("level q = {q} fails its approximation bound")));
        }
    }
    let cf = ContinuedFraction::from_quotients(quotients, true)?;
    Ok(Counterexample { nu, nu_certified: (r, s), alpha: ratio_to_f64(&pa, &qa), cf, level_denominators })
}

fn ratio_to_f64(p: &BigInt, q: &BigInt) -> f64 {
    let shift = p.bits().max(q.bits()).saturating_sub(100) as usize;
    let (p, q) = (p >> shift, q >> shift);
    p.to_f64().unwrap_or(f64::NAN) / q.to_f64().unwrap_or(f64::NAN)
}

/// The two escape conditions at `y = M^{−ν}`: `q²y ≤ 1/4` and
/// `M²q²(3q)^{−4−4/ν} ≤ y/4`. Exact when `ν = r/s` with `s ≤ 64`.
fn escape_conditions(q: u64, nu: f64, m: u64) -> (bool, bool) {
    if let Some((r, s)) = exact_nu(nu) {
        let (r32, s32) = (r as u32, s as u32);
        let first = (big(4) * big(q) * big(q)).pow(s32) <= big(m).pow(r32);
        let lhs = big(4).pow(r32 * s32) * big(m).pow((2 * s32 + r32) * r32) * big(q).pow(2 * r32 * s32);
        let rhs = big(3 * q).pow(4 * r32 * s32 + 4 * s32 * s32);
        (first, lhs <= rhs)
    } else {
        let (lm, lq) = (math::log(m as f64), math::log(q as f64));
        let l4 = math::log(4.0);
        let first = l4 + 2.0 * lq <= nu * lm;
        let second = l4 + (2.0 + nu) * lm + 2.0 * lq <= (4.0 + 4.0 / nu) * math::log(3.0 * q as f64);
        (first, second)
    }
}

/// The integer window `⌈4^{1/ν} q^{2/ν}⌉ ≤ M ≤ ⌊4^{−1/(2+ν)} 3^{4(1+ν)/(ν(2+ν))} q^{2/ν}⌋`,
/// adjusted so that both escape conditions hold at every `M` inside.
pub fn escape_window(q: u64, nu: f64) -> Result<(u64, u64)> {
    if q < 2 || !(nu > 0.0 && nu.is_finite()) {
        return Err(Error::InvalidSpec(format!("need q ≥ 2 and ν > 0, got q = {q}, ν = {nu}")));
    }
    let qf = q as f64;
    let base = math::pow(qf, 2.0 / nu);
    let lo_f = math::ceil(math::pow(4.0, 1.0 / nu) * base);
    let hi_f = math::floor(
        math::pow(4.0, -1.0 / (2.0 + nu)) * math::pow(3.0, 4.0 * (1.0 + nu) / (nu * (2.0 + nu))) * base,
    );
    if !(hi_f < 9.0e15) {
        return Err(Error::PrecisionExceeded(format!("escape window for q = {q} beyond 2^53")));
    }
    let (mut lo, mut hi) = (lo_f.max(1.0) as u64, hi_f.max(0.0) as u64);
    while lo <= hi.saturating_add(1) && !escape_conditions(q, nu, lo).0 {
        lo += 1;
    }
    while lo > 1 && escape_conditions(q, nu, lo - 1).0 {
        lo -= 1;
    }
    while hi >= 1 && hi >= lo && !escape_conditions(q, nu, hi).1 {
        hi -= 1;
    }
    while escape_conditions(q, nu, hi + 1).1 && hi + 1 <= hi_f as u64 + 2 {
        hi += 1;
    }
    if lo > hi {
        return Err(Error::EmptyWindow { q, nu });
    }
    Ok((lo, hi))
}

/// Both escape conditions at one `M`; exposed for verification.
pub fn escape_holds(q: u64, nu: f64, m: u64) -> bool {
    let (a, b) = escape_conditions(q, nu, m);
    a && b
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tail: Vec<String> = self.quotients[1..].iter().map(|a| a.to_string()).collect();
        write!(f, "[{}; {}]", self.quotients[0], tail.join(", "))
    }
}
