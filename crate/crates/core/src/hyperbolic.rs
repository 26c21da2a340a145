//! Möbius geometry on the upper half-plane `H` and its unit tangent bundle.
//!
//! `PSL(2,R)` acts on `T₁H` by `(z, θ) ↦ (gz, θ − 2·arg(cz + d))`, where `θ`
//! is measured counterclockwise from the vertical.

use crate::error::{Error, Result};
use crate::math::{self, TAU};

/// A point `x + iy` with `y > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperHalfPoint {
    x: f64,
    y: f64,
}

impl UpperHalfPoint {
    pub const I: UpperHalfPoint = UpperHalfPoint { x: 0.0, y: 1.0 };

    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::InvalidPoint("coordinates must be finite"));
        }
        if y <= 0.0 {
            return Err(Error::InvalidPoint("imaginary part must be positive"));
        }
        Ok(Self { x, y })
    }

    #[inline]
    pub fn x(&self) -> f64 {
        self.x
    }

    #[inline]
    pub fn y(&self) -> f64 {
        self.y
    }

    /// `|z|²`
    #[inline]
    pub fn norm_sqr(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    /// `-z̄`, the mirror image in the imaginary axis.
    #[inline]
    pub fn mirror(&self) -> Self {
        Self { x: -self.x, y: self.y }
    }

    /// Internal constructor for values known to be valid.
    #[inline]
    pub(crate) fn raw(x: f64, y: f64) -> Self {
        debug_assert!(y > 0.0 && x.is_finite() && y.is_finite(), "bad point {x} {y}");
        Self { x, y }
    }
}

/// Reduce an angle to `[0, 2π)`. Idempotent: values already in range are
/// returned unchanged.
pub fn reduce_angle(theta: f64) -> f64 {
    let r = libm::fmod(theta, TAU);
    let r = if r < 0.0 { r + TAU } else { r };
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Symmetric representative in `(-π, π]`; exact (IEEE remainder).
fn wrap_symmetric(theta: f64) -> f64 {
    let r = libm::remainder(theta, TAU);
    if r == -math::PI {
        math::PI
    } else {
        r
    }
}

/// A unit tangent vector `(z, θ)`.
///
/// The angle is kept internally in `(-π, π]`, where negation is exact, and
/// reported by [`UnitTangent::theta`] in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitTangent {
    z: UpperHalfPoint,
    phase: f64,
}

impl UnitTangent {
    pub fn new(z: UpperHalfPoint, theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::InvalidPoint("angle must be finite"));
        }
        Ok(Self { z, phase: wrap_symmetric(theta) + 0.0 })
    }

    /// The point `(z, 0)` on the horocycle section.
    pub fn upright(z: UpperHalfPoint) -> Self {
        Self { z, phase: 0.0 }
    }

    #[inline]
    pub fn z(&self) -> UpperHalfPoint {
        self.z
    }

    /// Angle in `[0, 2π)`.
    pub fn theta(&self) -> f64 {
        if self.phase < 0.0 {
            let t = self.phase + TAU;
            if t >= TAU {
                0.0
            } else {
                t
            }
        } else {
            self.phase
        }
    }

    /// Angle in `(-π, π]`.
    #[inline]
    pub fn signed_theta(&self) -> f64 {
        self.phase
    }

    /// `V(z, θ) = (-z̄, -θ)`. An exact involution.
    pub fn reflect(&self) -> Self {
        let phase = if self.phase == math::PI { math::PI } else { -self.phase + 0.0 };
        Self { z: self.z.mirror(), phase }
    }
}

/// Free-function form of [`UnitTangent::reflect`].
pub fn reflect(p: &UnitTangent) -> UnitTangent {
    p.reflect()
}

/// An element of `PSL(2,R)`, stored as the representative with determinant
/// one whose first nonzero entry among `(c, a)` is positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusMap {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl MoebiusMap {
    pub const IDENTITY: MoebiusMap = MoebiusMap { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };
    /// `z ↦ -1/z`
    pub const INVERSION: MoebiusMap = MoebiusMap { a: 0.0, b: -1.0, c: 1.0, d: 0.0 };

    /// Scales to determinant one and picks the sign representative.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det.is_finite() && det > 0.0) || ![a, b, c, d].iter().all(|v| v.is_finite()) {
            return Err(Error::DegenerateMap(det));
        }
        Ok(Self::normalized(a, b, c, d, det))
    }

    pub fn from_integers(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Self::new(a as f64, b as f64, c as f64, d as f64)
    }

    /// `z ↦ z + t`
    pub fn translation(t: f64) -> Self {
        Self { a: 1.0, b: t, c: 0.0, d: 1.0 }
    }

    fn normalized(a: f64, b: f64, c: f64, d: f64, det: f64) -> Self {
        let (a, b, c, d) = if det == 1.0 {
            (a, b, c, d)
        } else {
            let s = math::sqrt(det);
            (a / s, b / s, c / s, d / s)
        };
        let flip = if c != 0.0 { c < 0.0 } else { a < 0.0 };
        let (a, b, c, d) = if flip { (-a, -b, -c, -d) } else { (a, b, c, d) };
        // +0.0 turns a negative zero into a positive one
        Self { a: a + 0.0, b: b + 0.0, c: c + 0.0, d: d + 0.0 }
    }

    #[inline]
    pub fn entries(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &MoebiusMap) -> MoebiusMap {
        let a = self.a * other.a + self.b * other.c;
        let b = self.a * other.b + self.b * other.d;
        let c = self.c * other.a + self.d * other.c;
        let d = self.c * other.b + self.d * other.d;
        let det = a * d - b * c;
        debug_assert!(det > 0.0, "composition lost the determinant");
        Self::normalized(a, b, c, d, det)
    }

    pub fn inverse(&self) -> MoebiusMap {
        Self::normalized(self.d, -self.b, -self.c, self.a, 1.0)
    }

    /// The map with `b` and `c` negated (conjugation by `z ↦ -z̄`).
    pub fn tilde(&self) -> MoebiusMap {
        Self::normalized(self.a, -self.b, -self.c, self.d, 1.0)
    }

    /// `(cz + d)` as (re, im), rejecting near-parabolic blowups.
    fn denominator(&self, z: &UpperHalfPoint) -> Result<(f64, f64)> {
        let re = self.c * z.x + self.d;
        let im = self.c * z.y;
        let modulus = libm::hypot(re, im);
        if modulus < 1e-300 {
            return Err(Error::Overflow(modulus));
        }
        Ok((re, im))
    }

    pub fn apply_point(&self, z: &UpperHalfPoint) -> Result<UpperHalfPoint> {
        let (re, im) = self.denominator(z)?;
        self.image(z, re, im)
    }

    fn image(&self, z: &UpperHalfPoint, re: f64, im: f64) -> Result<UpperHalfPoint> {
        let m2 = re * re + im * im;
        let x = ((self.a * z.x + self.b) * re + self.a * self.c * z.y * z.y) / m2;
        let y = z.y / m2;
        if !(y > 0.0 && y.is_finite() && x.is_finite()) {
            return Err(Error::Overflow(m2));
        }
        Ok(UpperHalfPoint::raw(x, y))
    }

    /// `(gz, θ − 2·arg(cz + d))`
    pub fn apply(&self, p: &UnitTangent) -> Result<UnitTangent> {
        let (re, im) = self.denominator(&p.z)?;
        let z = self.image(&p.z, re, im)?;
        let beta = math::atan2(im, re);
        Ok(UnitTangent { z, phase: wrap_symmetric(p.phase - 2.0 * beta) + 0.0 })
    }
}

/// `u(z,w) = |z − w|² / (4 Im z Im w)`
pub fn point_pair_invariant(z: &UpperHalfPoint, w: &UpperHalfPoint) -> f64 {
    let dx = z.x - w.x;
    let dy = z.y - w.y;
    (dx * dx + dy * dy) / (4.0 * z.y * w.y)
}

/// Hyperbolic distance for `ds = |dz|/y`, via `cosh δ = 1 + 2u`, evaluated
/// as `δ = 2 asinh √u` to keep precision for nearby points.
pub fn hyperbolic_distance(z: &UpperHalfPoint, w: &UpperHalfPoint) -> f64 {
    2.0 * math::asinh(math::sqrt(point_pair_invariant(z, w)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn pt(x: f64, y: f64) -> UpperHalfPoint {
        UpperHalfPoint::new(x, y).unwrap()
    }

    #[test]
    fn rejects_invalid_points() {
        assert!(UpperHalfPoint::new(0.0, 0.0).is_err());
        assert!(UpperHalfPoint::new(0.0, -1.0).is_err());
        assert!(UpperHalfPoint::new(f64::NAN, 1.0).is_err());
        assert!(UpperHalfPoint::new(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn angle_reduction() {
        assert_eq!(reduce_angle(-0.5), TAU - 0.5);
        assert_eq!(reduce_angle(TAU), 0.0);
        let t = reduce_angle(123.456);
        assert_eq!(reduce_angle(t), t);
        let p = UnitTangent::new(UpperHalfPoint::I, 7.0).unwrap();
        assert!((p.theta() - (7.0 - TAU)).abs() < 1e-15);
    }

    #[test]
    fn apply_examples() {
        let p = UnitTangent::new(UpperHalfPoint::I, 0.0).unwrap();
        assert_eq!(MoebiusMap::IDENTITY.apply(&p).unwrap(), p);

        let p = UnitTangent::new(UpperHalfPoint::I, 1.0).unwrap();
        let q = MoebiusMap::INVERSION.apply(&p).unwrap();
        assert!((q.z().x()).abs() < 1e-16 && (q.z().y() - 1.0).abs() < 1e-16);
        assert!((q.theta() - reduce_angle(1.0 - PI)).abs() < 1e-15);

        let p = UnitTangent::new(pt(0.25, 0.5), 1.0).unwrap();
        let q = MoebiusMap::from_integers(1, 1, 0, 1).unwrap().apply(&p).unwrap();
        assert_eq!(q.z(), pt(1.25, 0.5));
        assert_eq!(q.theta(), 1.0);
    }

    #[test]
    fn apply_rejects_blowup() {
        let g = MoebiusMap::new(1e-100, 0.0, 0.0, 1e100).unwrap();
        let huge = MoebiusMap::new(1e-160, 0.0, 0.0, 1e160).unwrap();
        assert!(matches!(huge.apply_point(&UpperHalfPoint::I), Err(Error::Overflow(_))));
        let tiny = MoebiusMap::new(0.0, -1e200, 1e-200, 0.0).unwrap();
        assert!(g.apply_point(&UpperHalfPoint::I).is_ok());
        assert!(matches!(tiny.apply_point(&pt(0.0, 1e-120)), Err(Error::Overflow(_))));
    }

    #[test]
    fn normalization() {
        let g = MoebiusMap::new(2.0, 0.0, 0.0, 2.0).unwrap();
        assert_eq!(g, MoebiusMap::IDENTITY);
        let h = MoebiusMap::new(-1.0, -2.0, -3.0, -7.0).unwrap();
        assert_eq!(h, MoebiusMap::new(1.0, 2.0, 3.0, 7.0).unwrap());
        assert!(MoebiusMap::new(1.0, 0.0, 0.0, -1.0).is_err());
        let g = MoebiusMap::new(3.0, 1.5, -2.0, 4.0).unwrap();
        assert!((g.det() - 1.0).abs() < 1e-12);
        assert_eq!(g.compose(&g.inverse()).entries().map(|v| (v * 1e12).round()), [
            1e12, 0.0, 0.0, 1e12
        ]);
    }

    #[test]
    fn invariant_examples() {
        let i = UpperHalfPoint::I;
        assert_eq!(point_pair_invariant(&i, &i), 0.0);
        assert_eq!(point_pair_invariant(&i, &pt(0.0, 4.0)), 9.0 / 16.0);
        assert!((hyperbolic_distance(&i, &pt(0.0, 4.0)) - 4f64.ln()).abs() < 1e-15);
        assert_eq!(hyperbolic_distance(&pt(0.3, 0.2), &pt(0.3, 0.2)), 0.0);
    }

    /// Arc length of the geodesic through z, w by composite Simpson on
    /// ds = dφ / sin φ along the semicircle.
    fn geodesic_length_by_quadrature(z: UpperHalfPoint, w: UpperHalfPoint) -> f64 {
        let center = (w.norm_sqr() - z.norm_sqr()) / (2.0 * (w.x() - z.x()));
        let phi = |p: UpperHalfPoint| libm::atan2(p.y(), p.x() - center);
        let (p0, p1) = (phi(z), phi(w));
        let n = 20_000;
        let h = (p1 - p0) / n as f64;
        let f = |t: f64| 1.0 / libm::sin(t);
        let mut s = f(p0) + f(p1);
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(p0 + k as f64 * h);
        }
        (s * h / 3.0).abs()
    }

    #[test]
    fn distance_matches_geodesic_integration() {
        let z = pt(0.3, 0.7);
        let w = pt(-0.2, 1.9);
        let oracle = geodesic_length_by_quadrature(z, w);
        assert!((hyperbolic_distance(&z, &w) - oracle).abs() < 1e-8, "{oracle}");
    }

    #[test]
    fn reflect_examples() {
        let p = UnitTangent::new(UpperHalfPoint::I, 0.0).unwrap();
        assert_eq!(p.reflect(), p);
        let q = UnitTangent::new(pt(0.3, 2.0), 1.0).unwrap().reflect();
        assert_eq!(q.z(), pt(-0.3, 2.0));
        assert_eq!(q.theta(), TAU - 1.0);
        let r = UnitTangent::new(pt(0.0, 2.0), PI).unwrap();
        assert_eq!(r.reflect(), r);
    }
}
