//! Test functions on `Γ\T₁H` with known reference means `⟨f⟩`.

use alloc::format;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fuchsian::{FuchsianGroup, Preset};
use crate::hyperbolic::{UnitTangent, UpperHalfPoint};
use crate::math;
use crate::paircorr::{theta_sum, Psi};
use crate::sum::CompensatedSum;

/// A coordinate box `[x₀, x₁] × [y₀, y₁]` in reduced coordinates, optionally
/// with a linear ramp of width `ε` centred on each face. Bounds may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub eps: f64,
}

impl Cell {
    pub fn new(x: (f64, f64), y: (f64, f64), eps: f64) -> Result<Self> {
        let ok = !x.0.is_nan() && !x.1.is_nan() && !y.0.is_nan() && !y.1.is_nan() && x.0 <= x.1 && y.0 <= y.1;
        if !ok || !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::InvalidSpec(format!("bad cell x = {x:?}, y = {y:?}, eps = {eps}")));
        }
        Ok(Self { x, y, eps })
    }

    /// The whole upper half-plane.
    pub fn everything() -> Self {
        Self { x: (f64::NEG_INFINITY, f64::INFINITY), y: (0.0, f64::INFINITY), eps: 0.0 }
    }

    pub fn value(&self, z: &UpperHalfPoint) -> f64 {
        let (x, y) = (z.x(), z.y());
        let inside = [x - self.x.0, self.x.1 - x, y - self.y.0, self.y.1 - y];
        if self.eps == 0.0 {
            return if inside.iter().all(|&d| d >= 0.0) { 1.0 } else { 0.0 };
        }
        inside.iter().map(|&d| (0.5 + d / self.eps).clamp(0.0, 1.0)).fold(1.0, f64::min)
    }

    fn covers_everything(&self, g: &FuchsianGroup) -> bool {
        let y_floor = if g.preset() == Preset::Psl2z { math::sqrt(3.0) / 2.0 } else { 0.0 };
        self.x.0 <= -0.5 && self.x.1 >= 0.5 && self.y.0 - 0.5 * self.eps <= y_floor && self.y.1 == f64::INFINITY
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Kind {
    CellIndicator(Cell),
    /// `Y_Γ(z)^γ`, `0 ≤ γ < 1`
    HeightPower(f64),
    /// `|θ_ψ(z)|²` on the section `θ = 0`
    ThetaModulusSquared(Psi),
    /// `base(z)·e^{ivθ}` on reduced coordinates
    FourierMode { v: i64, base: Cell },
}

/// A `Γ`-invariant function with `|f| ≤ C·Y_Γ^γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    kind: Kind,
    group: FuchsianGroup,
    growth_exponent: f64,
    growth_constant: f64,
    reflected: bool,
}

/// Empirical constant in `|θ_ψ|² ≤ C·Y^{1/2}`, in units of `(∫|ψ| + sup|ψ|)²`.
/// The largest ratio seen on cusp excursions is about 0.7.
const THETA_GROWTH: f64 = 2.0;

impl TestFunction {
    pub fn new(group: FuchsianGroup, kind: Kind) -> Result<Self> {
        let (gamma, c) = match &kind {
            Kind::CellIndicator(_) | Kind::FourierMode { .. } => (0.0, 1.0),
            Kind::HeightPower(g) => {
                if !(0.0..1.0).contains(g) {
                    return Err(Error::InvalidSpec(format!("height exponent must lie in [0, 1), got {g}")));
                }
                (*g, 1.0)
            }
            Kind::ThetaModulusSquared(psi) => {
                if group.preset() != Preset::GammaBar1of4 {
                    return Err(Error::InvalidSpec("theta modulus needs the gamma1_4 group".into()));
                }
                let scale = psi_l1(psi) + psi.eval(0.0).abs();
                (0.5, THETA_GROWTH * scale * scale)
            }
        };
        Ok(Self { kind, group, growth_exponent: gamma, growth_constant: c, reflected: false })
    }

    pub fn cell(group: FuchsianGroup, cell: Cell) -> Self {
        Self::new(group, Kind::CellIndicator(cell)).expect("cells are always valid")
    }

    /// `f ≡ 1`
    pub fn constant(group: FuchsianGroup) -> Self {
        Self::cell(group, Cell::everything())
    }

    /// `f∘V` with `V(z, θ) = (−z̄, −θ)`.
    pub fn reflected(mut self) -> Self {
        self.reflected = !self.reflected;
        self
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn group(&self) -> &FuchsianGroup {
        &self.group
    }

    /// `γ` in `|f| ≤ C·Y^γ`.
    pub fn growth_exponent(&self) -> f64 {
        self.growth_exponent
    }

    /// `C` in `|f| ≤ C·Y^γ`.
    pub fn growth_constant(&self) -> f64 {
        self.growth_constant
    }

    pub fn evaluate(&self, p: &UnitTangent) -> Result<Complex64> {
        let p = if self.reflected { p.reflect() } else { *p };
        let real = |v: f64| Ok(Complex64::new(v, 0.0));
        match &self.kind {
            Kind::CellIndicator(cell) => {
                if self.covers_everything() {
                    return real(1.0);
                }
                real(cell.value(&self.group.reduce(&p.z())?.point))
            }
            Kind::HeightPower(g) => {
                if *g == 0.0 {
                    return real(1.0);
                }
                real(math::pow(self.group.invariant_height(&p.z())?, *g))
            }
            Kind::ThetaModulusSquared(psi) => {
                if p.signed_theta() != 0.0 {
                    return Err(Error::UnsupportedPhase(p.theta()));
                }
                real(theta_sum(psi, p.z().x(), p.z().y())?.norm_sqr())
            }
            Kind::FourierMode { v, base } => {
                let q = self.group.reduce_tangent(&p)?;
                let b = base.value(&q.z());
                if b == 0.0 {
                    return real(0.0);
                }
                let t = *v as f64 * q.signed_theta();
                Ok(Complex64::new(b * math::cos(t), b * math::sin(t)))
            }
        }
    }

    fn covers_everything(&self) -> bool {
        matches!(&self.kind, Kind::CellIndicator(c) if c.covers_everything(&self.group))
    }

    /// `⟨f⟩` with a standard error; exact (error 0) where a closed form exists,
    /// otherwise Monte Carlo over `n_mc` points of the fundamental domain.
    pub fn reference_mean(&self, n_mc: usize, seed: u64) -> Result<(f64, f64)> {
        if n_mc < 1000 {
            return Err(Error::InvalidSpec(format!("need at least 1000 Monte Carlo points, got {n_mc}")));
        }
        match &self.kind {
            Kind::CellIndicator(cell) => self.cell_mean(cell, n_mc, seed),
            Kind::HeightPower(g) if *g == 0.0 => Ok((1.0, 0.0)),
            Kind::HeightPower(_) => self.monte_carlo(n_mc, seed, |z| {
                Ok(self.evaluate(&UnitTangent::upright(*z))?.re)
            }),
            Kind::ThetaModulusSquared(psi) => Ok((2.0 * psi.square_integral(), 0.0)),
            Kind::FourierMode { v: 0, base } => self.cell_mean(base, n_mc, seed),
            Kind::FourierMode { .. } => Ok((0.0, 0.0)),
        }
    }

    fn cell_mean(&self, cell: &Cell, n_mc: usize, seed: u64) -> Result<(f64, f64)> {
        if cell.covers_everything(&self.group) {
            return Ok((1.0, 0.0));
        }
        if let Some(area) = closed_form_area(&self.group, cell) {
            return Ok((area / self.group.area(), 0.0));
        }
        self.monte_carlo(n_mc, seed, |z| Ok(cell.value(z)))
    }

    fn monte_carlo<F>(&self, n: usize, seed: u64, f: F) -> Result<(f64, f64)>
    where
        F: Fn(&UpperHalfPoint) -> Result<f64>,
    {
        let pts = self.group.sample_fundamental_domain(n, seed);
        let (mut s, mut s2) = (CompensatedSum::new(), CompensatedSum::new());
        for z in &pts {
            let v = f(z)?;
            s.add(v);
            s2.add(v * v);
        }
        let nf = n as f64;
        let mean = s.value() / nf;
        let var = (s2.value() / nf - mean * mean).max(0.0) * nf / (nf - 1.0);
        Ok((mean, math::sqrt(var / nf)))
    }
}

fn psi_l1(psi: &Psi) -> f64 {
    // ψ ≥ 0 for the bump; tables may change sign
    let n = 4000;
    let h = psi.support() / n as f64;
    2.0 * (0..n).map(|i| psi.eval((i as f64 + 0.5) * h).abs()).sum::<f64>() * h
}

/// Hyperbolic area of a sharp box inside the modular domain
/// `{|x| ≤ 1/2, |z| ≥ 1}`, or `None` when no closed form applies.
fn closed_form_area(g: &FuchsianGroup, cell: &Cell) -> Option<f64> {
    if cell.eps != 0.0 {
        return None;
    }
    let (xl, xh) = (cell.x.0.max(-0.5), cell.x.1.min(0.5));
    let (yl, yh) = cell.y;
    if g.preset() != Preset::Psl2z && !(cell.x.0 >= -0.5 && cell.x.1 <= 0.5 && yl >= 1.0) {
        return None;
    }
    if xl >= xh || yh <= yl {
        return Some(0.0);
    }
    Some(modular_box_area(xl, xh, yl, yh))
}

/// `∫_{xl}^{xh} max(0, 1/max(yl, √(1−x²)) − 1/yh) dx` for `|x| ≤ 1/2`.
fn modular_box_area(xl: f64, xh: f64, yl: f64, yh: f64) -> f64 {
    let inv_hi = if yh.is_infinite() { 0.0 } else { 1.0 / yh };
    let mut cuts = alloc::vec![xl, xh];
    for level in [yl, yh] {
        if level < 1.0 {
            let c = math::sqrt(1.0 - level * level);
            cuts.extend([-c, c].into_iter().filter(|&t| t > xl && t < xh));
        }
    }
    cuts.sort_by(f64::total_cmp);
    let mut area = 0.0;
    for w in cuts.windows(2) {
        let (u, v) = (w[0], w[1]);
        let mid = 0.5 * (u + v);
        let s = math::sqrt(1.0 - mid * mid);
        area += if s >= yh {
            0.0
        } else if s > yl {
            (math::asin(v) - math::asin(u)) - (v - u) * inv_hi
        } else {
            (v - u) * (1.0 / yl - inv_hi)
        };
    }
    area
}
