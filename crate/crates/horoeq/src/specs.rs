//! Parsing of the structured values that appear inside config entries:
//! test functions, windows, weights and interval lists.

use horoeq_core::fuchsian::FuchsianGroup;
use horoeq_core::kronecker::Weight;
use horoeq_core::paircorr::{Psi, Window};
use horoeq_core::testfun::{Cell, Kind, TestFunction};

use crate::config::{ConfigError, ExperimentConfig};
use crate::RunError;

fn pairs(cfg: &ExperimentConfig, section: &str, key: &str, body: &str) -> Result<Vec<(f64, f64)>, ConfigError> {
    body.split(';')
        .map(|p| {
            let (u, v) = p
                .split_once(':')
                .ok_or_else(|| cfg.error(section, key, format!("table entry {p:?} is not `x:value`")))?;
            let u = u.trim().parse().map_err(|_| cfg.error(section, key, format!("bad number {u:?}")))?;
            let v = v.trim().parse().map_err(|_| cfg.error(section, key, format!("bad number {v:?}")))?;
            Ok((u, v))
        })
        .collect()
}

/// Splits `tag:rest`.
fn tagged(cfg: &ExperimentConfig, section: &str, key: &str) -> (String, String) {
    let raw = cfg.raw(section, key);
    match raw.split_once(':') {
        Some((tag, rest)) => (tag.trim().to_string(), rest.trim().to_string()),
        None => (raw.trim().to_string(), String::new()),
    }
}

fn number(cfg: &ExperimentConfig, section: &str, key: &str, s: &str) -> Result<f64, ConfigError> {
    s.trim().parse::<f64>().map_err(|_| cfg.error(section, key, format!("bad number {s:?}")))
}

/// `bump:w` or `table:x:v;x:v;…` (values of ψ on `x ≥ 0`).
pub fn psi(cfg: &ExperimentConfig, section: &str) -> Result<Psi, RunError> {
    let (tag, body) = tagged(cfg, section, "psi");
    Ok(match tag.as_str() {
        "bump" => Psi::bump(number(cfg, section, "psi", &body)?)?,
        "table" => Psi::table(pairs(cfg, section, "psi", &body)?)?,
        _ => return Err(cfg.error(section, "psi", "expected bump:<half width> or table:<x:v;...>").into()),
    })
}

/// `fejer:s` or `table:u:v;…` (values of ĝ on `u ≥ 0`).
pub fn window(cfg: &ExperimentConfig) -> Result<Window, RunError> {
    let (tag, body) = tagged(cfg, "paircorr", "g");
    Ok(match tag.as_str() {
        "fejer" => Window::fejer(number(cfg, "paircorr", "g", &body)?)?,
        "table" => Window::table(pairs(cfg, "paircorr", "g", &body)?)?,
        _ => return Err(cfg.error("paircorr", "g", "expected fejer:<scale> or table:<u:v;...>").into()),
    })
}

/// `none`, `triangle:s` or `indicator:a:b`.
pub fn weight(cfg: &ExperimentConfig) -> Result<Option<Weight>, RunError> {
    let (tag, body) = tagged(cfg, "points", "weight");
    Ok(match tag.as_str() {
        "none" if body.is_empty() => None,
        "triangle" => Some(Weight::triangle(number(cfg, "points", "weight", &body)?)?),
        "indicator" => {
            let (a, b) = body
                .split_once(':')
                .ok_or_else(|| cfg.error("points", "weight", "expected indicator:<a>:<b>"))?;
            Some(Weight::indicator(number(cfg, "points", "weight", a)?, number(cfg, "points", "weight", b)?)?)
        }
        _ => return Err(cfg.error("points", "weight", "expected none, triangle:<s> or indicator:<a>:<b>").into()),
    })
}

/// `a:b, a:b, …`
pub fn intervals(cfg: &ExperimentConfig) -> Result<Vec<(f64, f64)>, RunError> {
    Ok(pairs(cfg, "paircorr", "intervals", &cfg.raw("paircorr", "intervals").replace(',', ";"))?)
}

fn cell(cfg: &ExperimentConfig) -> Result<Cell, RunError> {
    let x: Vec<f64> = cfg.list("function", "x")?;
    let y: Vec<f64> = cfg.list("function", "y")?;
    if x.len() != 2 {
        return Err(cfg.error("function", "x", "expected two bounds").into());
    }
    if y.len() != 2 {
        return Err(cfg.error("function", "y", "expected two bounds").into());
    }
    Ok(Cell::new((x[0], x[1]), (y[0], y[1]), cfg.get("function", "eps")?)?)
}

/// The `[function]` section.
pub fn test_function(cfg: &ExperimentConfig, group: FuchsianGroup) -> Result<TestFunction, RunError> {
    let kind = match cfg.raw("function", "kind") {
        "constant" => return Ok(TestFunction::constant(group)),
        "cell" => Kind::CellIndicator(cell(cfg)?),
        "height" => Kind::HeightPower(cfg.get("function", "gamma")?),
        "theta" => Kind::ThetaModulusSquared(psi(cfg, "function")?),
        "fourier" => Kind::FourierMode { v: cfg.get("function", "v")?, base: cell(cfg)? },
        _ => {
            return Err(cfg
                .error("function", "kind", "expected constant, cell, height, theta or fourier")
                .into())
        }
    };
    Ok(TestFunction::new(group, kind)?)
}
