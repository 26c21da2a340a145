//! The two group presets, reduction into a fundamental domain, cusp data and
//! the invariant height function `Y_Γ(z) = sup Im N_k W z`.
//!
//! `Γ̄₁(4)` is handled as a subgroup of index 6 in `PSL(2,Z)`: a point is
//! reduced in `PSL(2,Z)` first and then moved by the coset representative
//! that turns the witness into a group element. The fundamental domain is the
//! union of the six translates `R_i F` of the modular domain `F`.

use alloc::format;
use alloc::vec::Vec;
use core::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hyperbolic::{MoebiusMap, UnitTangent, UpperHalfPoint};
use crate::math::{self, PI};

/// Height above which every cusp neighbourhood is an embedded strip.
pub const HEIGHT_CUT: f64 = 2.0;

const MAX_REDUCTION_STEPS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Psl2z,
    GammaBar1of4,
}

impl Preset {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::Psl2z => "psl2z",
            Preset::GammaBar1of4 => "gamma1_4",
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "psl2z" => Ok(Preset::Psl2z),
            "gamma1_4" => Ok(Preset::GammaBar1of4),
            other => Err(Error::InvalidSpec(format!("unknown group preset {other:?}"))),
        }
    }
}

/// Exact 2×2 integer matrix, used for witnesses and membership arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) struct IntMatrix {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl IntMatrix {
    const IDENTITY: IntMatrix = IntMatrix::new(1, 0, 0, 1);
    const S: IntMatrix = IntMatrix::new(0, -1, 1, 0);

    pub(crate) const fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self { a, b, c, d }
    }

    fn translation(n: i64) -> Self {
        Self::new(1, n, 0, 1)
    }

    fn mul(&self, o: &IntMatrix) -> Result<IntMatrix> {
        let f = |x: i64, y: i64, z: i64, w: i64| {
            x.checked_mul(y)
                .and_then(|p| z.checked_mul(w).and_then(|q| p.checked_add(q)))
                .ok_or_else(|| Error::PrecisionExceeded("integer witness overflow".into()))
        };
        Ok(IntMatrix {
            a: f(self.a, o.a, self.b, o.c)?,
            b: f(self.a, o.b, self.b, o.d)?,
            c: f(self.c, o.a, self.d, o.c)?,
            d: f(self.c, o.b, self.d, o.d)?,
        })
    }

    fn inverse(&self) -> IntMatrix {
        IntMatrix::new(self.d, -self.b, -self.c, self.a)
    }

    fn to_moebius(self) -> MoebiusMap {
        MoebiusMap::from_integers(self.a, self.b, self.c, self.d)
            .expect("integer matrices in the group have determinant one")
    }

    fn is_projective_identity(&self) -> bool {
        self.b == 0 && self.c == 0 && self.a == self.d && self.a.abs() == 1
    }
}

/// A cusp `η = σ(∞)` of width `h`, with normalizer `N = diag(h^{-1/2}, h^{1/2}) σ⁻¹`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cusp {
    /// `None` for `∞`, otherwise `p/q` in lowest terms.
    pub representative: Option<(i64, i64)>,
    pub normalizer: MoebiusMap,
    pub width: u32,
    scaling: IntMatrix,
}

impl Cusp {
    fn new(scaling: IntMatrix, width: u32) -> Self {
        let representative = if scaling.c == 0 {
            None
        } else {
            let (p, q) = if scaling.c < 0 { (-scaling.a, -scaling.c) } else { (scaling.a, scaling.c) };
            Some((p, q))
        };
        let h = width as f64;
        let dilation = MoebiusMap::new(1.0 / math::sqrt(h), 0.0, 0.0, math::sqrt(h)).expect("det 1");
        let normalizer = dilation.compose(&scaling.inverse().to_moebius());
        Self { representative, normalizer, width, scaling }
    }

    /// Parabolic generator `T_k = N_k⁻¹ (1,−1;0,1) N_k` of the stabilizer.
    pub fn stabilizer_generator(&self) -> MoebiusMap {
        let n = &self.normalizer;
        n.inverse().compose(&MoebiusMap::translation(-1.0)).compose(n)
    }
}

/// A point of the fundamental domain and the group element that moved it there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedPoint {
    pub point: UpperHalfPoint,
    pub witness: MoebiusMap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuchsianGroup {
    preset: Preset,
    cusps: Vec<Cusp>,
    area: f64,
    generators: Vec<MoebiusMap>,
    cosets: Vec<IntMatrix>,
}

impl FuchsianGroup {
    pub fn psl2z() -> Self {
        Self {
            preset: Preset::Psl2z,
            cusps: alloc::vec![Cusp::new(IntMatrix::IDENTITY, 1)],
            area: PI / 3.0,
            generators: alloc::vec![MoebiusMap::translation(1.0), MoebiusMap::INVERSION],
            cosets: alloc::vec![IntMatrix::IDENTITY],
        }
    }

    /// `Γ̄₁(4)`: cusps `∞, 0, 1/2` of widths `1, 4, 1`, area `2π`.
    pub fn gamma1_4() -> Self {
        let s = IntMatrix::S;
        let st = |k: i64| s.mul(&IntMatrix::translation(k)).expect("small");
        let cosets = alloc::vec![
            IntMatrix::IDENTITY,
            s,
            st(1),
            st(-1),
            st(2),
            st(2).mul(&s).expect("small"),
        ];
        Self {
            preset: Preset::GammaBar1of4,
            cusps: alloc::vec![
                Cusp::new(IntMatrix::IDENTITY, 1),
                Cusp::new(IntMatrix::S, 4),
                Cusp::new(IntMatrix::new(1, 0, 2, 1), 1),
            ],
            area: 2.0 * PI,
            generators: alloc::vec![
                MoebiusMap::translation(1.0),
                MoebiusMap::from_integers(1, 0, 4, 1).expect("det 1"),
            ],
            cosets,
        }
    }

    pub fn from_preset(preset: Preset) -> Self {
        match preset {
            Preset::Psl2z => Self::psl2z(),
            Preset::GammaBar1of4 => Self::gamma1_4(),
        }
    }

    pub fn preset(&self) -> Preset {
        self.preset
    }

    pub fn cusps(&self) -> &[Cusp] {
        &self.cusps
    }

    /// Hyperbolic area of the fundamental domain.
    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn generators(&self) -> &[MoebiusMap] {
        &self.generators
    }

    /// Index in `PSL(2,Z)`.
    pub fn index(&self) -> usize {
        self.cosets.len()
    }

    fn max_width(&self) -> u32 {
        self.cusps.iter().map(|c| c.width).max().unwrap_or(1)
    }

    fn contains_int(&self, m: &IntMatrix) -> bool {
        let det = m.a as i128 * m.d as i128 - m.b as i128 * m.c as i128;
        if det != 1 {
            return false;
        }
        match self.preset {
            Preset::Psl2z => true,
            Preset::GammaBar1of4 => {
                let r = |v: i64| v.rem_euclid(4);
                r(m.c) == 0 && ((r(m.a) == 1 && r(m.d) == 1) || (r(m.a) == 3 && r(m.d) == 3))
            }
        }
    }

    /// Membership test for a map whose entries are (numerically) integers.
    pub fn contains(&self, m: &MoebiusMap) -> Result<bool> {
        let mut ints = [0i64; 4];
        for (slot, v) in ints.iter_mut().zip(m.entries()) {
            let r = math::round_half_even(v);
            if (v - r).abs() > 0.5e-6 || r.abs() > 9.0e15 {
                return Err(Error::NonIntegral(v));
            }
            *slot = r as i64;
        }
        Ok(self.contains_int(&IntMatrix::new(ints[0], ints[1], ints[2], ints[3])))
    }

    /// Modular reduction: `|Re w| ≤ 1/2`, `|w| ≥ 1`, with `Re w ∈ [-1/2, 1/2)`
    /// and `Re w ≤ 0` on the unit circle.
    fn reduce_modular(&self, z: &UpperHalfPoint) -> Result<(UpperHalfPoint, IntMatrix)> {
        let (mut x, mut y) = (z.x(), z.y());
        let mut w = IntMatrix::IDENTITY;
        let mut steps = 0usize;
        loop {
            if !(-0.5..0.5).contains(&x) {
                let mut n = math::floor(x + 0.5);
                let mut r = x - n;
                if r >= 0.5 {
                    r -= 1.0;
                    n += 1.0;
                } else if r < -0.5 {
                    r += 1.0;
                    n -= 1.0;
                }
                x = r;
                w = IntMatrix::translation(-(n as i64)).mul(&w)?;
                steps += 1;
            }
            let r2 = x * x + y * y;
            if r2 < 1.0 {
                x = -x / r2;
                y /= r2;
                w = IntMatrix::S.mul(&w)?;
                steps += 1;
                if steps >= MAX_REDUCTION_STEPS {
                    return Err(Error::IterationLimit(MAX_REDUCTION_STEPS));
                }
                continue;
            }
            if r2 == 1.0 && x > 0.0 {
                x = -x;
                w = IntMatrix::S.mul(&w)?;
            }
            break;
        }
        if !(y > 0.0 && y.is_finite()) {
            return Err(Error::IterationLimit(steps));
        }
        Ok((UpperHalfPoint::raw(x + 0.0, y), w))
    }

    /// Index of the coset representative `R` with `R·w ∈ Γ`.
    fn coset_of(&self, w: &IntMatrix) -> Result<usize> {
        for (i, r) in self.cosets.iter().enumerate() {
            if self.contains_int(&r.mul(w)?) {
                return Ok(i);
            }
        }
        Err(Error::SelfCheck(format!("no coset representative for {w:?}")))
    }

    fn reduce_exact(&self, z: &UpperHalfPoint) -> Result<(UpperHalfPoint, IntMatrix)> {
        let (w, wit) = self.reduce_modular(z)?;
        if self.preset == Preset::Psl2z {
            return Ok((w, wit));
        }
        let r = self.cosets[self.coset_of(&wit)?];
        if r == IntMatrix::IDENTITY {
            return Ok((w, wit));
        }
        let total = r.mul(&wit)?;
        if total.is_projective_identity() {
            // z was already reduced; going through w would only add rounding
            return Ok((*z, total));
        }
        Ok((r.to_moebius().apply_point(&w)?, total))
    }

    pub fn reduce(&self, z: &UpperHalfPoint) -> Result<ReducedPoint> {
        let (point, witness) = self.reduce_exact(z)?;
        Ok(ReducedPoint { point, witness: witness.to_moebius() })
    }

    /// Reduces a unit tangent vector: the witness acts on the angle too.
    pub fn reduce_tangent(&self, p: &UnitTangent) -> Result<UnitTangent> {
        let (_, witness) = self.reduce_exact(&p.z())?;
        if witness.is_projective_identity() {
            return Ok(*p);
        }
        witness.to_moebius().apply(p)
    }

    /// `Y_Γ(z)`. For `PSL(2,Z)` this is the height of the reduced point. In
    /// general, with `w = W₀z` modular-reduced, `Y_Γ(z) = max Im(Mw)/h(M W₀)`
    /// over `M ∈ PSL(2,Z)`, where `h` is the width of the cusp class of the
    /// left coset of `M W₀`. Only `M` with `|cw + d|² ≤ max width` can win,
    /// and since `Im w ≥ √3/2` that is a short finite list.
    pub fn invariant_height(&self, z: &UpperHalfPoint) -> Result<f64> {
        let (w, w0) = self.reduce_modular(z)?;
        if self.preset == Preset::Psl2z {
            return Ok(w.y());
        }
        let hmax = self.max_width() as f64;
        let slack = 1.0 + 1e-12;
        let mut best = 0.0f64;
        let cmax = math::floor(math::sqrt(hmax * slack) / w.y()) as i64;
        for c in 0..=cmax {
            let (dlo, dhi) = if c == 0 {
                (1, 1)
            } else {
                let cf = c as f64;
                let rad = math::sqrt((hmax * slack - cf * cf * w.y() * w.y()).max(0.0));
                (math::ceil(-cf * w.x() - rad) as i64, math::floor(-cf * w.x() + rad) as i64)
            };
            for d in dlo..=dhi {
                if math::gcd_i64(c, d) != 1 {
                    continue;
                }
                let (_, s, t) = math::ext_gcd(d, c);
                let m0 = IntMatrix::new(s, -t, c, d);
                let m = m0.mul(&w0)?;
                let width = self.cusp_width_of(&m)? as f64;
                let (cf, df) = (c as f64, d as f64);
                let re = cf * w.x() + df;
                let im = cf * w.y();
                let h = w.y() / (re * re + im * im) / width;
                best = best.max(h);
            }
        }
        Ok(best)
    }

    /// Width of the cusp `k` with `M ∈ Tⁿ σ_k⁻¹ Γ`.
    fn cusp_width_of(&self, m: &IntMatrix) -> Result<u32> {
        for cusp in &self.cusps {
            for n in 0..cusp.width as i64 {
                let cand = cusp.scaling.mul(&IntMatrix::translation(-n))?.mul(m)?;
                if self.contains_int(&cand) {
                    return Ok(cusp.width);
                }
            }
        }
        Err(Error::SelfCheck(format!("{m:?} is in no cusp class")))
    }

    /// Structural checks on the hardcoded preset data.
    pub fn self_check(&self) -> Result<()> {
        let fail = |msg: alloc::string::String| Err(Error::SelfCheck(msg));
        let first = &self.cusps[0];
        if first.representative.is_some() || first.normalizer != MoebiusMap::IDENTITY || first.width != 1 {
            return fail("first cusp must be ∞ with identity normalizer".into());
        }
        let widths: usize = self.cusps.iter().map(|c| c.width as usize).sum();
        if widths != self.index() {
            return fail(format!("cusp widths sum to {widths}, index is {}", self.index()));
        }
        for (i, ri) in self.cosets.iter().enumerate() {
            for rj in &self.cosets[..i] {
                if self.contains_int(&ri.mul(&rj.inverse())?) {
                    return fail(format!("coset representatives {ri:?} and {rj:?} coincide"));
                }
            }
        }
        for g in &self.generators {
            if !self.contains(g)? {
                return fail(format!("generator {g:?} not in group"));
            }
        }
        for cusp in &self.cusps {
            let t = cusp.stabilizer_generator();
            if !self.contains(&t)? {
                return fail(format!("stabilizer generator of {:?} not in group", cusp.representative));
            }
            for j in 1..cusp.width as i64 {
                let partial = cusp.scaling.mul(&IntMatrix::translation(j))?.mul(&cusp.scaling.inverse())?;
                if self.contains_int(&partial) {
                    return fail(format!("width of {:?} is smaller than {}", cusp.representative, cusp.width));
                }
            }
            let conj = cusp.normalizer.compose(&t).compose(&cusp.normalizer.inverse());
            let unit = MoebiusMap::translation(-1.0).entries();
            if conj.entries().iter().zip(unit).any(|(u, v)| (u - v).abs() > 1e-12) {
                return fail(format!("normalizer of {:?} does not conjugate to a unit translation", cusp.representative));
            }
            let (ex, _) = cusp.representative.map_or((0.0, 1), |(p, q)| (p as f64 / q as f64, q));
            if cusp.representative.is_some() {
                let mut last = 0.0;
                for eps in [1e-2, 1e-4, 1e-6] {
                    let img = cusp.normalizer.apply_point(&UpperHalfPoint::raw(ex, eps))?;
                    if img.y() <= last {
                        return fail("normalizer does not send the cusp to ∞".into());
                    }
                    last = img.y();
                }
            }
            // cusp strips at the height cut are embedded
            let inv = cusp.normalizer.inverse();
            for k in 0..64 {
                let x = (k as f64 + 0.5) / 64.0;
                let z = inv.apply_point(&UpperHalfPoint::raw(x, HEIGHT_CUT))?;
                let y = self.invariant_height(&z)?;
                if (y - HEIGHT_CUT).abs() > 1e-9 * HEIGHT_CUT {
                    return fail(format!("height cut {HEIGHT_CUT} not embedded: Y = {y}"));
                }
            }
        }
        Ok(())
    }

    /// One point from normalized hyperbolic area on the fundamental domain.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> UpperHalfPoint {
        let w = sample_modular(rng);
        if self.cosets.len() == 1 {
            return w;
        }
        let r = self.cosets[rng.random_range(0..self.cosets.len())];
        r.to_moebius().apply_point(&w).expect("coset maps are regular on F")
    }

    /// A random word of `len` letters in the generators and their inverses.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R, len: usize) -> MoebiusMap {
        let mut g = MoebiusMap::IDENTITY;
        for _ in 0..len {
            let s = self.generators[rng.random_range(0..self.generators.len())];
            let s = if rng.random::<bool>() { s } else { s.inverse() };
            g = g.compose(&s);
        }
        g
    }

    /// `n` i.i.d. points, deterministic for a given seed.
    pub fn sample_fundamental_domain(&self, n: usize, seed: u64) -> Vec<UpperHalfPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| self.sample_point(&mut rng)).collect()
    }
}

/// Free-function forms mirroring the operation list.
pub fn contains(g: &FuchsianGroup, m: &MoebiusMap) -> Result<bool> {
    g.contains(m)
}

pub fn reduce(g: &FuchsianGroup, z: &UpperHalfPoint) -> Result<ReducedPoint> {
    g.reduce(z)
}

pub fn invariant_height(g: &FuchsianGroup, z: &UpperHalfPoint) -> Result<f64> {
    g.invariant_height(z)
}

pub fn sample_fundamental_domain(g: &FuchsianGroup, n: usize, seed: u64) -> Vec<UpperHalfPoint> {
    g.sample_fundamental_domain(n, seed)
}

/// Normalized area on the modular domain. In `t = 1/y` the measure
/// `dx dy / y²` is `dx dt`, so the part below the cut is a rejection sample
/// from a box; above the cut `y = B₀/U` is the exact tail law.
fn sample_modular<R: Rng + ?Sized>(rng: &mut R) -> UpperHalfPoint {
    let tail_mass = 1.0 / HEIGHT_CUT;
    let p_tail = tail_mass / (PI / 3.0);
    let x = rng.random::<f64>() - 0.5;
    if rng.random::<f64>() < p_tail {
        let u = 1.0 - rng.random::<f64>();
        return UpperHalfPoint::raw(x, HEIGHT_CUT / u);
    }
    let t_lo = 1.0 / HEIGHT_CUT;
    let t_hi = 2.0 / math::sqrt(3.0);
    let mut x = x;
    loop {
        let t = t_lo + (t_hi - t_lo) * rng.random::<f64>();
        let y = 1.0 / t;
        if x * x + y * y >= 1.0 {
            return UpperHalfPoint::raw(x, y);
        }
        x = rng.random::<f64>() - 0.5;
    }
}
