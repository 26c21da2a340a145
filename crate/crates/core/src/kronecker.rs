//! Kronecker points `(δ + mα + iy, 0)` on a closed horocycle, and averages of
//! test functions over them and over the horocycle itself.
//!
//! Averages use the representative `δ + (mα mod 1)` of each point, with
//! `mα mod 1` exact (on the `2⁻⁵³` grid, or as a fraction for rational `α`).
//! Since `z ↦ z + 1` lies in both groups this changes no value, and it keeps
//! `M = 10⁸` free of accumulated rounding.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::diophantine::Alpha;
use crate::error::{Error, Result};
use crate::fuchsian::FuchsianGroup;
use crate::hyperbolic::{UnitTangent, UpperHalfPoint};
use crate::math;
use crate::phase::Phase;
use crate::sum::{chunked_complex_sum, Executor, Serial};
use crate::testfun::TestFunction;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSetSpec {
    alpha: Alpha,
    phase: Phase,
    m: u64,
    nu: f64,
    c: f64,
    delta: f64,
    include_zero: bool,
}

impl PointSetSpec {
    /// Points `m = 1..=M` at height `y = c·M^{−ν}`, which must lie in `(0, 1]`.
    pub fn new(alpha: Alpha, m: u64, nu: f64, c: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidSpec("M must be at least 1".into()));
        }
        if !(nu >= 0.0 && nu.is_finite()) || !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidSpec(format!("need ν ≥ 0 and c > 0, got ν = {nu}, c = {c}")));
        }
        let y = c * math::pow(m as f64, -nu);
        if !(y > 0.0 && y <= 1.0) {
            return Err(Error::InvalidSpec(format!("y = c·M^-ν = {y} is outside (0, 1]")));
        }
        Ok(Self { alpha, phase: alpha.phase(), m, nu, c, delta: 0.0, include_zero: false })
    }

    pub fn with_delta(mut self, delta: f64) -> Result<Self> {
        if !delta.is_finite() {
            return Err(Error::InvalidSpec(format!("offset must be finite, got {delta}")));
        }
        self.delta = delta;
        Ok(self)
    }

    /// Use `m = 0..M−1` instead of `m = 1..=M`.
    pub fn with_include_zero(mut self, include_zero: bool) -> Self {
        self.include_zero = include_zero;
        self
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn include_zero(&self) -> bool {
        self.include_zero
    }

    /// `y = c·M^{−ν}`
    pub fn y(&self) -> f64 {
        self.c * math::pow(self.m as f64, -self.nu)
    }

    fn indices(&self) -> core::ops::Range<i64> {
        if self.include_zero {
            0..self.m as i64
        } else {
            1..self.m as i64 + 1
        }
    }

    /// `mα mod 1`, exact up to the final rounding.
    pub fn frac(&self, m: i64) -> f64 {
        match self.alpha {
            Alpha::Rational(p, q) => ((m as i128 * p as i128).rem_euclid(q as i128)) as f64 / q as f64,
            _ => self.phase.mul_i64(m).to_f64(),
        }
    }

    /// The representative `(δ + (mα mod 1) + iy, 0)` used for averaging.
    pub fn point(&self, m: i64) -> UnitTangent {
        self.point_at(m, self.y())
    }

    fn point_at(&self, m: i64, y: f64) -> UnitTangent {
        UnitTangent::upright(UpperHalfPoint::new(self.delta + self.frac(m), y).expect("valid height"))
    }

    /// The points `(δ + mα + iy, 0)` themselves, lazily.
    pub fn generate(&self) -> impl Iterator<Item = UnitTangent> + '_ {
        let y = self.y();
        let a = self.alpha.value();
        self.indices()
            .map(move |m| UnitTangent::upright(UpperHalfPoint::new(self.delta + m as f64 * a, y).expect("valid height")))
    }
}

/// `(1/M) Σ_m f(δ + mα + iy, 0)` in ascending `m`, compensated and chunked.
pub fn pse_average(spec: &PointSetSpec, f: &TestFunction) -> Result<Complex64> {
    pse_average_with(&Serial, spec, f)
}

pub fn pse_average_with<E: Executor + ?Sized>(exec: &E, spec: &PointSetSpec, f: &TestFunction) -> Result<Complex64> {
    if spec.include_zero && spec.nu * f.growth_exponent() >= 1.0 {
        return Err(Error::GuardViolation(format!(
            "m = 0 is included and ν·γ = {} ≥ 1: the m = 0 term alone does not vanish in the limit",
            spec.nu * f.growth_exponent()
        )));
    }
    let y = spec.y();
    let s = chunked_complex_sum(exec, spec.indices(), |m| f.evaluate(&spec.point_at(m, y)))?;
    Ok(s.value() / spec.m as f64)
}

/// A bounded, compactly supported, piecewise polynomial weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Weight {
    knots: Vec<f64>,
    /// Coefficients in `u`, lowest degree first, one list per piece.
    pieces: Vec<Vec<f64>>,
}

impl Weight {
    /// Pieces `[k_i, k_{i+1})`, the last one closed on the right.
    pub fn new(knots: Vec<f64>, pieces: Vec<Vec<f64>>) -> Result<Self> {
        if knots.len() < 2 || pieces.len() != knots.len() - 1 {
            return Err(Error::InvalidSpec("weight needs n + 1 knots for n pieces".into()));
        }
        if knots.windows(2).any(|w| !(w[1] > w[0])) || knots.iter().any(|k| !k.is_finite()) {
            return Err(Error::InvalidSpec("weight knots must be finite and increasing".into()));
        }
        if pieces.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidSpec("weight coefficients must be finite".into()));
        }
        Ok(Self { knots, pieces })
    }

    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        Self::new(alloc::vec![a, b], alloc::vec![alloc::vec![1.0]])
    }

    /// `max(0, 1 − |u|/s)`
    pub fn triangle(s: f64) -> Result<Self> {
        Self::new(alloc::vec![-s, 0.0, s], alloc::vec![alloc::vec![1.0, 1.0 / s], alloc::vec![1.0, -1.0 / s]])
    }

    pub fn support(&self) -> (f64, f64) {
        (self.knots[0], self.knots[self.knots.len() - 1])
    }

    pub fn eval(&self, u: f64) -> f64 {
        let (lo, hi) = self.support();
        if !(u >= lo && u <= hi) {
            return 0.0;
        }
        let i = (self.knots.partition_point(|&k| k <= u) - 1).min(self.pieces.len() - 1);
        self.pieces[i].iter().rev().fold(0.0, |acc, &c| acc * u + c)
    }

    /// `∫h`
    pub fn integral(&self) -> f64 {
        let antider = |cs: &[f64], u: f64| cs.iter().enumerate().rev().fold(0.0, |acc, (k, &c)| acc * u + c / (k + 1) as f64) * u;
        self.pieces
            .iter()
            .enumerate()
            .map(|(i, cs)| antider(cs, self.knots[i + 1]) - antider(cs, self.knots[i]))
            .sum()
    }
}

/// `(1/M) Σ_{m≠0} h(m/M) f(δ + mα + iy, 0)` over the `m` with `m/M` in the
/// support of `h`.
pub fn weighted_average(spec: &PointSetSpec, f: &TestFunction, h: &Weight) -> Result<Complex64> {
    weighted_average_with(&Serial, spec, f, h)
}

pub fn weighted_average_with<E: Executor + ?Sized>(
    exec: &E,
    spec: &PointSetSpec,
    f: &TestFunction,
    h: &Weight,
) -> Result<Complex64> {
    let mf = spec.m as f64;
    let (lo, hi) = h.support();
    let (m_lo, m_hi) = (math::ceil(lo * mf), math::floor(hi * mf));
    if !(m_lo.abs() < 9.0e15 && m_hi.abs() < 9.0e15) {
        return Err(Error::InvalidSpec("weight support too wide".into()));
    }
    let y = spec.y();
    let s = chunked_complex_sum(exec, m_lo as i64..m_hi as i64 + 1, |m| {
        if m == 0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let w = h.eval(m as f64 / mf);
        if w == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(f.evaluate(&spec.point_at(m, y))? * w)
    })?;
    Ok(s.value() / mf)
}

fn check_horocycle(g: &FuchsianGroup, f: &TestFunction, y: f64, n_quad: usize) -> Result<()> {
    if g.preset() != f.group().preset() {
        return Err(Error::InvalidSpec("test function belongs to a different group".into()));
    }
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::InvalidSpec(format!("horocycle height must be positive, got {y}")));
    }
    if n_quad < 1000 {
        return Err(Error::InvalidSpec(format!("need at least 1000 quadrature nodes, got {n_quad}")));
    }
    Ok(())
}

/// Midpoint rule for `∫₀¹ f(x + iy, 0) dx`.
pub fn horocycle_average(g: &FuchsianGroup, f: &TestFunction, y: f64, n_quad: usize) -> Result<Complex64> {
    horocycle_average_with(&Serial, g, f, y, n_quad)
}

pub fn horocycle_average_with<E: Executor + ?Sized>(
    exec: &E,
    g: &FuchsianGroup,
    f: &TestFunction,
    y: f64,
    n_quad: usize,
) -> Result<Complex64> {
    horocycle_fourier_with(exec, g, f, y, 0, n_quad)
}

/// Midpoint rule for `a(y, n) = ∫₀¹ f(x + iy, 0) e(−nx) dx`.
pub fn horocycle_fourier(g: &FuchsianGroup, f: &TestFunction, y: f64, n: i64, n_quad: usize) -> Result<Complex64> {
    horocycle_fourier_with(&Serial, g, f, y, n, n_quad)
}

pub fn horocycle_fourier_with<E: Executor + ?Sized>(
    exec: &E,
    g: &FuchsianGroup,
    f: &TestFunction,
    y: f64,
    n: i64,
    n_quad: usize,
) -> Result<Complex64> {
    check_horocycle(g, f, y, n_quad)?;
    let nq = n_quad as f64;
    let s = chunked_complex_sum(exec, 0..n_quad as i64, |k| {
        let x = (k as f64 + 0.5) / nq;
        let v = f.evaluate(&UnitTangent::upright(UpperHalfPoint::new(x, y)?))?;
        if n == 0 {
            return Ok(v);
        }
        // −n·x mod 1 from integers: −n(2k + 1)/(2 n_quad)
        let num = (-(n as i128) * (2 * k as i128 + 1)).rem_euclid(2 * n_quad as i128);
        Ok(v * math::e(num as f64 / (2.0 * nq)))
    })?;
    Ok(s.value() / nq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfun::{Cell, Kind};

    fn psl() -> FuchsianGroup {
        FuchsianGroup::psl2z()
    }

    #[test]
    fn generate_examples() {
        let s = PointSetSpec::new(Alpha::Rational(1, 2), 1, 0.0, 1.0).unwrap();
        let pts: Vec<_> = s.generate().collect();
        assert_eq!(pts, [UnitTangent::upright(UpperHalfPoint::new(0.5, 1.0).unwrap())]);
        let s = PointSetSpec::new(Alpha::Float(1.0 / 3.0), 3, 1.0, 1.0).unwrap();
        let xs: Vec<f64> = s.generate().map(|p| p.z().x()).collect();
        assert_eq!(xs, [1.0 / 3.0, 2.0 / 3.0, 1.0]);
        assert!(s.generate().all(|p| p.z().y() == 1.0 / 3.0 && p.theta() == 0.0));
        assert!(PointSetSpec::new(Alpha::Sqrt2, 10, 0.0, 2.0).is_err());
        assert!(PointSetSpec::new(Alpha::Sqrt2, 0, 1.0, 1.0).is_err());
    }

    #[test]
    fn constant_average_is_one() {
        let s = PointSetSpec::new(Alpha::Sqrt2, 12345, 1.0, 1.0).unwrap();
        let one = TestFunction::constant(psl());
        assert_eq!(pse_average(&s, &one).unwrap(), Complex64::new(1.0, 0.0));
        let h = Weight::indicator(0.0, 1.0).unwrap();
        assert_eq!(weighted_average(&s, &one, &h).unwrap(), Complex64::new(1.0, 0.0));
        let sym = Weight::new(alloc::vec![-1.0, 1.0], alloc::vec![alloc::vec![1.0]]).unwrap();
        assert_eq!(weighted_average(&s, &one, &sym).unwrap().re, 2.0);
    }

    #[test]
    fn guard_on_included_zero() {
        let g = FuchsianGroup::gamma1_4();
        let f = TestFunction::new(g, Kind::HeightPower(0.6)).unwrap();
        let s = PointSetSpec::new(Alpha::Sqrt2, 100, 2.0, 1.0).unwrap();
        assert!(pse_average(&s, &f).is_ok());
        assert!(matches!(pse_average(&s.with_include_zero(true), &f), Err(Error::GuardViolation(_))));
    }

    #[test]
    fn weight_pieces() {
        let t = Weight::triangle(1.0).unwrap();
        assert_eq!(t.eval(0.0), 1.0);
        assert_eq!(t.eval(-0.25), 0.75);
        assert_eq!(t.eval(1.5), 0.0);
        assert!((t.integral() - 1.0).abs() < 1e-15);
        let q = Weight::new(alloc::vec![0.0, 2.0], alloc::vec![alloc::vec![0.0, 0.0, 3.0]]).unwrap();
        assert!((q.integral() - 8.0).abs() < 1e-14);
    }

    #[test]
    fn horocycle_examples() {
        let g = psl();
        let one = TestFunction::constant(g.clone());
        assert_eq!(horocycle_average(&g, &one, 0.01, 1000).unwrap(), Complex64::new(1.0, 0.0));
        assert!(horocycle_fourier(&g, &one, 0.01, 5, 1000).unwrap().norm() < 1e-12);
        let strip = TestFunction::cell(g.clone(), Cell::new((-0.5, 0.5), (2.0, f64::INFINITY), 0.0).unwrap());
        assert_eq!(horocycle_average(&g, &strip, 3.0, 1000).unwrap().re, 1.0);
        let cell = TestFunction::cell(g.clone(), Cell::new((-0.3, 0.3), (1.0, 2.0), 0.1).unwrap());
        assert_eq!(
            horocycle_fourier(&g, &cell, 0.05, 0, 2000).unwrap(),
            horocycle_average(&g, &cell, 0.05, 2000).unwrap()
        );
    }

    #[test]
    fn rational_orbit_is_finite() {
        let g = psl();
        for q in 2..=20u64 {
            let s = PointSetSpec::new(Alpha::Rational(1, q), 400, 1.0, 1.0).unwrap();
            let mut seen: Vec<(u64, u64)> = Vec::new();
            for m in 1..=400 {
                let r = g.reduce(&s.point(m).z()).unwrap().point;
                let key = (r.x().to_bits(), r.y().to_bits());
                if !seen.contains(&key) {
                    seen.push(key);
                }
            }
            assert!(seen.len() as u64 <= q, "q = {q}: {} points", seen.len());
        }
    }
}
