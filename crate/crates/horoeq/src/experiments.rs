//! One function per subcommand: read the config, compute, fill a table.

use horoeq_core::diophantine::{
    admissible_nu, continued_fraction, escape_window, estimate_type, make_counterexample, min_norm_sum_with, Alpha,
};
use horoeq_core::fuchsian::{FuchsianGroup, Preset};
use horoeq_core::hyperbolic::{hyperbolic_distance, UpperHalfPoint};
use horoeq_core::kronecker::{horocycle_fourier_with, pse_average_with, weighted_average_with, PointSetSpec};
use horoeq_core::paircorr::{
    r2_sharp_with, r2_smoothed_with, r2_via_theta_with, sharp_smoothed_bridge, theta_sum, WindowPair,
};
use horoeq_core::sum::blocks;
use horoeq_core::testfun::{Cell as Box2, Kind, TestFunction};
use horoeq_core::{Complex64, Error, Executor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::ExperimentConfig;
use crate::exec::Pool;
use crate::output::{Cell, Table};
use crate::{specs, RunError};

fn group(cfg: &ExperimentConfig) -> Result<FuchsianGroup, RunError> {
    let preset: Preset = cfg.get("run", "group")?;
    Ok(FuchsianGroup::from_preset(preset))
}

fn alpha(cfg: &ExperimentConfig) -> Result<Alpha, RunError> {
    Ok(cfg.get("run", "alpha")?)
}

fn seed(cfg: &ExperimentConfig) -> Result<u64, RunError> {
    Ok(cfg.get("run", "seed")?)
}

/// Reference mean; exact zero for nontrivial `θ`-modes.
fn mean_of(f: &TestFunction, cfg: &ExperimentConfig) -> Result<f64, RunError> {
    if let Kind::FourierMode { v, .. } = f.kind() {
        if *v != 0 {
            return Ok(0.0);
        }
    }
    Ok(f.reference_mean(cfg.get("function", "mc")?, seed(cfg)?)?.0)
}

pub fn equidistribute(cfg: &ExperimentConfig, pool: &Pool) -> Result<Table, RunError> {
    let f = specs::test_function(cfg, group(cfg)?)?;
    let mean = mean_of(&f, cfg)?;
    let weight = specs::weight(cfg)?;
    let target = match &weight {
        Some(h) => h.integral() * mean,
        None => mean,
    };
    let alpha = alpha(cfg)?;
    let nus: Vec<f64> = cfg.list("points", "nu")?;
    let delta: f64 = cfg.get("points", "delta")?;
    let include_zero: bool = cfg.get("points", "include_zero")?;
    let mut t = Table::new(&["nu", "c", "M", "y", "re_avg", "im_avg", "mean", "abs_err"]);
    for &nu in &nus {
        for c in cfg.list::<f64>("points", "c")? {
            for m in cfg.list::<u64>("points", "M")? {
                let spec = PointSetSpec::new(alpha, m, nu, c)?.with_delta(delta)?.with_include_zero(include_zero);
                let avg = match &weight {
                    Some(h) => weighted_average_with(pool, &spec, &f, h)?,
                    None => pse_average_with(pool, &spec, &f)?,
                };
                let err = (avg - Complex64::new(target, 0.0)).norm();
                t.push(vec![
                    nu.into(),
                    c.into(),
                    m.into(),
                    spec.y().into(),
                    avg.re.into(),
                    avg.im.into(),
                    target.into(),
                    err.into(),
                ]);
            }
        }
    }
    Ok(t)
}

pub fn horocycle(cfg: &ExperimentConfig, pool: &Pool) -> Result<Table, RunError> {
    let g = group(cfg)?;
    let f = specs::test_function(cfg, g.clone())?;
    let mean = mean_of(&f, cfg)?;
    let n_quad: usize = cfg.get("horocycle", "n_quad")?;
    let modes: Vec<i64> = cfg.list("horocycle", "modes")?;
    let mut t = Table::new(&["y", "n", "re", "im", "target", "abs_err"]);
    for y in cfg.list::<f64>("horocycle", "y")? {
        for &n in &modes {
            let a = horocycle_fourier_with(pool, &g, &f, y, n, n_quad)?;
            let target = if n == 0 { mean } else { 0.0 };
            let err = (a - Complex64::new(target, 0.0)).norm();
            t.push(vec![y.into(), n.into(), a.re.into(), a.im.into(), target.into(), err.into()]);
        }
    }
    Ok(t)
}

pub fn paircorr(cfg: &ExperimentConfig, pool: &Pool) -> Result<Table, RunError> {
    let phase = alpha(cfg)?.phase();
    let form = cfg.raw("paircorr", "form").to_string();
    let w = WindowPair { g: specs::window(cfg)?, psi: specs::psi(cfg, "paircorr")? };
    let intervals = specs::intervals(cfg)?;
    let mut t = Table::new(&["N", "form", "a", "b", "value", "target", "abs_err"]);
    let mut row = |n: u64, ab: Option<(f64, f64)>, value: f64, target: f64| {
        let (a, b) = match ab {
            Some((a, b)) => (a.into(), b.into()),
            None => (Cell::Empty, Cell::Empty),
        };
        t.push(vec![n.into(), form.as_str().into(), a, b, value.into(), target.into(), (value - target).abs().into()]);
    };
    for n in cfg.list::<u64>("paircorr", "N")? {
        match form.as_str() {
            "sharp" => {
                for &(a, b) in &intervals {
                    row(n, Some((a, b)), r2_sharp_with(pool, phase, n, a, b)?, b - a);
                }
            }
            "bridge" => {
                for &(a, b) in &intervals {
                    let (lhs, rhs) = sharp_smoothed_bridge(phase, n, a, b)?;
                    row(n, Some((a, b)), lhs, rhs);
                }
            }
            "smoothed" => row(n, None, r2_smoothed_with(pool, phase, n, &w)?, w.poisson_limit()),
            "theta" => row(n, None, r2_via_theta_with(pool, phase, n, &w)?, w.poisson_limit()),
            "theta_origin" => {
                let nf = n as f64;
                let v = theta_sum(&w.psi, 0.0, 1.0 / (nf * nf))?.re / nf.sqrt();
                row(n, None, v, w.psi.integral());
            }
            _ => {
                return Err(cfg
                    .error("paircorr", "form", "expected sharp, smoothed, theta, bridge or theta_origin")
                    .into())
            }
        }
    }
    Ok(t)
}

/// Up to `k` evenly spread integers in `[lo, hi]`, ends included.
fn spread(lo: u64, hi: u64, k: usize) -> Vec<u64> {
    let span = hi - lo;
    if k <= 1 {
        return vec![lo];
    }
    if span < k as u64 {
        return (lo..=hi).collect();
    }
    let mut v: Vec<u64> = (0..k as u64).map(|i| lo + (i as u128 * span as u128 / (k as u128 - 1)) as u64).collect();
    v.dedup();
    v
}

pub fn counterexample(cfg: &ExperimentConfig, pool: &Pool) -> Result<Table, RunError> {
    let nu: f64 = cfg.get("counterexample", "nu")?;
    let levels: usize = cfg.get("counterexample", "levels")?;
    let samples: usize = cfg.get("counterexample", "samples")?;
    let ce = make_counterexample(nu, levels)?;
    let g = FuchsianGroup::psl2z();
    // supported in {Y < 2}: for PSL(2,Z) the reduced height is Y itself
    let low = TestFunction::cell(g.clone(), Box2::new((-0.5, 0.5), (0.0, 1.9), 0.0)?);
    let quotients = ce.cf.quotients();
    let mut t = Table::new(&["level", "q", "next_quotient", "M_lo", "M_hi", "M", "min_height", "escaped", "cell_average"]);
    for (j, &q) in ce.level_denominators.iter().enumerate() {
        let next = quotients.get(j + 2).copied().map(Cell::from).unwrap_or(Cell::Empty);
        let (lo, hi) = match escape_window(q, nu) {
            Ok(w) => w,
            Err(Error::EmptyWindow { .. }) => {
                let mut r = vec![(j + 1).into(), q.into(), next];
                r.extend(std::iter::repeat_n(Cell::Empty, 6));
                t.push(r);
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        for m in spread(lo, hi, samples) {
            let spec = PointSetSpec::new(Alpha::Float(ce.alpha), m, nu, 1.0)?;
            let ranges: Vec<_> = blocks(1..m as i64 + 1, 1024).collect();
            let mins = pool.map_jobs(ranges.len(), |b| {
                ranges[b].clone().try_fold(f64::INFINITY, |acc, i| Ok::<_, Error>(acc.min(g.invariant_height(&spec.point(i).z())?)))
            });
            let mut min_h = f64::INFINITY;
            for v in mins {
                min_h = min_h.min(v?);
            }
            let avg = pse_average_with(pool, &spec, &low)?;
            t.push(vec![
                (j + 1).into(),
                q.into(),
                next.clone(),
                lo.into(),
                hi.into(),
                m.into(),
                min_h.into(),
                (min_h >= 2.0).into(),
                avg.re.into(),
            ]);
        }
    }
    Ok(t)
}

pub fn diophantine(cfg: &ExperimentConfig, pool: &Pool) -> Result<Table, RunError> {
    let a = alpha(cfg)?;
    let depth: usize = cfg.get("diophantine", "depth")?;
    let cf = continued_fraction(&a, depth)?;
    let est = estimate_type(&cf, a.value())?;
    let k = match cfg.raw("diophantine", "K") {
        "fit" => est.k,
        _ => cfg.get("diophantine", "K")?,
    };
    let mut t = Table::new(&["quantity", "beta", "N1", "N2", "M", "value", "ratio1", "ratio2"]);
    let e = || Cell::Empty;
    t.push(vec!["type_K".into(), e(), e(), e(), e(), est.k.into(), e(), e()]);
    t.push(vec!["type_C".into(), e(), e(), e(), e(), est.c.into(), e(), e()]);
    for beta in cfg.list::<f64>("diophantine", "beta")? {
        t.push(vec!["admissible_nu".into(), beta.into(), e(), e(), e(), admissible_nu(beta, k)?.into(), e(), e()]);
    }
    let n1: u64 = cfg.get("diophantine", "N1")?;
    let phase = a.phase();
    for m in cfg.list::<f64>("diophantine", "M")? {
        for n2 in cfg.list::<u64>("diophantine", "N2")? {
            let v = min_norm_sum_with(pool, phase, m, n1, n2)?;
            let n = n2 as f64;
            let first = n * (2.0 * n).ln();
            let second = m + ((n * m).powf((k - 1.0) / k) + n) * (n * m + 1.0).ln();
            t.push(vec![
                "min_sum".into(),
                e(),
                n1.into(),
                n2.into(),
                m.into(),
                v.into(),
                (v / first).into(),
                (v / second).into(),
            ]);
        }
    }
    Ok(t)
}

pub fn heights(cfg: &ExperimentConfig, _pool: &Pool) -> Result<Table, RunError> {
    let g = group(cfg)?;
    let s = seed(cfg)?;
    let c: f64 = cfg.get("heights", "exponent")?;
    let pairs: usize = cfg.get("heights", "pairs")?;
    let len: usize = cfg.get("heights", "word_length")?;
    let f = TestFunction::new(g.clone(), Kind::HeightPower(c))?;
    let mut t = Table::new(&["quantity", "n", "value", "stderr"]);
    for n in cfg.list::<usize>("heights", "n")? {
        let (m, se) = f.reference_mean(n, s)?;
        t.push(vec!["mean_height_power".into(), n.into(), m.into(), se.into()]);
    }
    // independent stream for the geometric checks
    let mut rng = ChaCha8Rng::seed_from_u64(s ^ 0x9e37_79b9_7f4a_7c15);
    let mut worst_inv = 0.0f64;
    let mut worst_lip = 0.0f64;
    for _ in 0..pairs {
        let z = g.random_element(&mut rng, len).apply_point(&g.sample_point(&mut rng))?;
        let gz = g.random_element(&mut rng, len).apply_point(&z)?;
        let yz = g.invariant_height(&z)?;
        worst_inv = worst_inv.max((g.invariant_height(&gz)? - yz).abs() / yz);
        let (u, v): (f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let w = UpperHalfPoint::new(z.x() + z.y() * u, z.y() * v.exp())?;
        let ratio = yz / (hyperbolic_distance(&z, &w).exp() * g.invariant_height(&w)?);
        worst_lip = worst_lip.max(ratio);
    }
    t.push(vec!["invariance_max_rel_err".into(), pairs.into(), worst_inv.into(), Cell::Empty]);
    t.push(vec!["lipschitz_max_ratio".into(), pairs.into(), worst_lip.into(), Cell::Empty]);
    Ok(t)
}
