//! Line-oriented `key = value` configs with `[section]` headers.
//!
//! ```text
//! # comment
//! [run]
//! group = psl2z
//! alpha = sqrt2
//! ```
//!
//! Every subcommand declares a schema; anything outside it is rejected with
//! the offending line number, so a misspelt key never silently falls back to
//! a default.

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("[{section}] {key}: {msg}")]
    Field { section: String, key: String, msg: String },
}

fn at(line: usize, msg: impl Into<String>) -> ConfigError {
    ConfigError::Line { line, msg: msg.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Equidistribute,
    Horocycle,
    Paircorr,
    Counterexample,
    Diophantine,
    Heights,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Equidistribute => "equidistribute",
            Experiment::Horocycle => "horocycle",
            Experiment::Paircorr => "paircorr",
            Experiment::Counterexample => "counterexample",
            Experiment::Diophantine => "diophantine",
            Experiment::Heights => "heights",
        }
    }

    /// The accepted keys, in canonical order, with defaults. `None` marks a
    /// required key.
    pub fn schema(self) -> &'static [Key] {
        match self {
            Experiment::Equidistribute => EQUIDISTRIBUTE,
            Experiment::Horocycle => HOROCYCLE,
            Experiment::Paircorr => PAIRCORR,
            Experiment::Counterexample => COUNTEREXAMPLE,
            Experiment::Diophantine => DIOPHANTINE,
            Experiment::Heights => HEIGHTS,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Key {
    pub section: &'static str,
    pub name: &'static str,
    pub default: Option<&'static str>,
}

const fn k(section: &'static str, name: &'static str, default: Option<&'static str>) -> Key {
    Key { section, name, default }
}

// shared by the subcommands that build a test function
const F: [Key; 8] = [
    k("function", "kind", Some("cell")),
    k("function", "x", Some("-0.5, 0.5")),
    k("function", "y", Some("2, inf")),
    k("function", "eps", Some("0")),
    k("function", "gamma", Some("0.5")),
    k("function", "v", Some("0")),
    k("function", "psi", Some("bump:1")),
    k("function", "mc", Some("100000")),
];

const EQUIDISTRIBUTE: &[Key] = &[
    k("run", "group", Some("psl2z")),
    k("run", "alpha", None),
    k("run", "seed", Some("0")),
    k("points", "M", None),
    k("points", "nu", Some("1")),
    k("points", "c", Some("1")),
    k("points", "delta", Some("0")),
    k("points", "include_zero", Some("false")),
    k("points", "weight", Some("none")),
    F[0],
    F[1],
    F[2],
    F[3],
    F[4],
    F[5],
    F[6],
    F[7],
];

const HOROCYCLE: &[Key] = &[
    k("run", "group", Some("psl2z")),
    k("run", "seed", Some("0")),
    k("horocycle", "y", None),
    k("horocycle", "n_quad", Some("200000")),
    k("horocycle", "modes", Some("0")),
    F[0],
    F[1],
    F[2],
    F[3],
    F[4],
    F[5],
    F[6],
    F[7],
];

const PAIRCORR: &[Key] = &[
    k("run", "alpha", None),
    k("run", "seed", Some("0")),
    k("paircorr", "N", None),
    k("paircorr", "form", Some("sharp")),
    k("paircorr", "intervals", Some("0:1")),
    k("paircorr", "g", Some("fejer:1")),
    k("paircorr", "psi", Some("bump:1")),
];

const COUNTEREXAMPLE: &[Key] = &[
    k("run", "seed", Some("0")),
    k("counterexample", "nu", Some("2")),
    k("counterexample", "levels", Some("2")),
    k("counterexample", "samples", Some("5")),
];

const DIOPHANTINE: &[Key] = &[
    k("run", "alpha", None),
    k("run", "seed", Some("0")),
    k("diophantine", "depth", Some("20")),
    k("diophantine", "N1", Some("1")),
    k("diophantine", "N2", None),
    k("diophantine", "M", Some("1e9")),
    k("diophantine", "K", Some("fit")),
    k("diophantine", "beta", Some("0.5")),
];

const HEIGHTS: &[Key] = &[
    k("run", "group", Some("psl2z")),
    k("run", "seed", Some("0")),
    k("heights", "exponent", Some("0.9")),
    k("heights", "n", Some("100000")),
    k("heights", "pairs", Some("500")),
    k("heights", "word_length", Some("6")),
];

/// A parsed and schema-checked config. Values are kept as written (trimmed);
/// typed access goes through [`ExperimentConfig::get`] and friends.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    experiment: Experiment,
    // (key, value, line); line is 0 for defaults and overrides
    values: Vec<(Key, String, usize)>,
}

impl ExperimentConfig {
    pub fn parse(experiment: Experiment, text: &str) -> Result<Self, ConfigError> {
        let schema = experiment.schema();
        let mut given: Vec<Option<(String, usize)>> = vec![None; schema.len()];
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') || t.starts_with(';') {
                continue;
            }
            if let Some(rest) = t.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| at(line, format!("malformed section header {t:?}")))?
                    .trim();
                if !schema.iter().any(|key| key.section == name) {
                    return Err(at(
                        line,
                        format!("unknown section [{name}] for {}", experiment.name()),
                    ));
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = t
                .split_once('=')
                .ok_or_else(|| at(line, format!("expected `key = value`, got {t:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let sec = section
                .as_deref()
                .ok_or_else(|| at(line, format!("key {key:?} appears before any [section]")))?;
            let idx = schema
                .iter()
                .position(|s| s.section == sec && s.name == key)
                .ok_or_else(|| at(line, format!("unknown key {key:?} in [{sec}]")))?;
            if let Some((_, first)) = &given[idx] {
                return Err(at(line, format!("duplicate key {key:?} (first set on line {first})")));
            }
            if value.is_empty() {
                return Err(at(line, format!("key {key:?} has an empty value")));
            }
            given[idx] = Some((value.to_string(), line));
        }
        let mut values = Vec::with_capacity(schema.len());
        for (key, g) in schema.iter().zip(given) {
            match (g, key.default) {
                (Some((v, line)), _) => values.push((*key, v, line)),
                (None, Some(d)) => values.push((*key, d.to_string(), 0)),
                (None, None) => {
                    return Err(ConfigError::Field {
                        section: key.section.into(),
                        key: key.name.into(),
                        msg: "required key is missing".into(),
                    })
                }
            }
        }
        Ok(Self { experiment, values })
    }

    pub fn experiment(&self) -> Experiment {
        self.experiment
    }

    /// Replaces a value, e.g. from a command-line flag.
    pub fn set(&mut self, section: &str, key: &str, value: String) {
        if let Some(slot) = self.values.iter_mut().find(|(k, _, _)| k.section == section && k.name == key) {
            slot.1 = value;
            slot.2 = 0;
        }
    }

    pub fn raw(&self, section: &str, key: &str) -> &str {
        self.slot(section, key).1.as_str()
    }

    fn slot(&self, section: &str, key: &str) -> &(Key, String, usize) {
        self.values
            .iter()
            .find(|(k, _, _)| k.section == section && k.name == key)
            .unwrap_or_else(|| panic!("[{section}] {key} is not in the {} schema", self.experiment.name()))
    }

    /// A diagnostic pointing at the key's line if it came from the file.
    pub fn error(&self, section: &str, key: &str, msg: impl Into<String>) -> ConfigError {
        let (_, value, line) = self.slot(section, key);
        let msg = format!("invalid value {value:?} for {key:?}: {}", msg.into());
        if *line > 0 {
            at(*line, msg)
        } else {
            ConfigError::Field { section: section.into(), key: key.into(), msg }
        }
    }

    pub fn get<T: FromStr>(&self, section: &str, key: &str) -> Result<T, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        parse_one(self.raw(section, key)).map_err(|e| self.error(section, key, e))
    }

    /// A comma-separated list.
    pub fn list<T: FromStr>(&self, section: &str, key: &str) -> Result<Vec<T>, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(section, key)
            .split(',')
            .map(|s| parse_one(s.trim()))
            .collect::<Result<Vec<T>, String>>()
            .map_err(|e| self.error(section, key, e))
    }

    /// Every key with its effective value, in schema order, as config text.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        let mut current = "";
        for (key, value, _) in &self.values {
            if key.section != current {
                current = key.section;
                let _ = writeln!(out, "[{current}]");
            }
            let _ = writeln!(out, "{} = {}", key.name, value);
        }
        out
    }
}

/// Integers also accept float notation when it is exact, so `M = 1e5` works.
fn parse_one<T: FromStr>(s: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    match s.parse::<T>() {
        Ok(v) => Ok(v),
        Err(e) => {
            if let Ok(x) = s.parse::<f64>() {
                if x.is_finite() && x.fract() == 0.0 && x.abs() < 9.0e15 {
                    if let Ok(v) = format!("{}", x as i64).parse::<T>() {
                        return Ok(v);
                    }
                }
            }
            Err(e.to_string())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in_and_canonical_is_stable() {
        let text = "[run]\nalpha = sqrt2\n\n[points]\nM = 10, 100\n";
        let cfg = ExperimentConfig::parse(Experiment::Equidistribute, text).unwrap();
        assert_eq!(cfg.list::<u64>("points", "M").unwrap(), vec![10, 100]);
        assert_eq!(cfg.get::<f64>("points", "nu").unwrap(), 1.0);
        let again = ExperimentConfig::parse(Experiment::Equidistribute, &cfg.canonical()).unwrap();
        assert_eq!(again.canonical(), cfg.canonical());
    }

    #[test]
    fn unknown_key_names_line_and_key() {
        let text = "[run]\nalhpa = sqrt2\n";
        let err = ExperimentConfig::parse(Experiment::Equidistribute, text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2") && msg.contains("alhpa"), "{msg}");
    }

    #[test]
    fn structural_errors() {
        let e = Experiment::Paircorr;
        assert!(ExperimentConfig::parse(e, "alpha = 1\n").is_err());
        assert!(ExperimentConfig::parse(e, "[points]\n").is_err());
        assert!(ExperimentConfig::parse(e, "[run]\nalpha 1\n").is_err());
        assert!(ExperimentConfig::parse(e, "[run]\nalpha = 1\nalpha = 2\n").is_err());
        // N is required
        assert!(ExperimentConfig::parse(e, "[run]\nalpha = 1\n").is_err());
    }

    #[test]
    fn scientific_integers() {
        let cfg = ExperimentConfig::parse(Experiment::Paircorr, "[run]\nalpha=golden\n[paircorr]\nN = 1e3, 20\n").unwrap();
        assert_eq!(cfg.list::<u64>("paircorr", "N").unwrap(), vec![1000, 20]);
        let bad = ExperimentConfig::parse(Experiment::Paircorr, "[run]\nalpha=golden\n[paircorr]\nN = 1.5\n").unwrap();
        let msg = bad.list::<u64>("paircorr", "N").unwrap_err().to_string();
        assert!(msg.contains("line 4"), "{msg}");
    }
}
