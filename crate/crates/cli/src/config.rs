//! Flat `key = value` configuration with command-line overrides.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::check::{parse_check, Check};
use crate::scan::{parse_int_scan, parse_number, parse_scan, ScanError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("key `{key}`: {source}")]
    Scan { key: String, source: ScanError },
    #[error("key `{key}`: {reason}")]
    Value { key: String, reason: String },
    #[error("invalid check `{0}`: expected `name=target±tolerance`")]
    Check(String),
    #[error("cannot read config file {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Spectrum,
    LowerBound,
    MicrolocalResolvent,
    FullResolvent,
    Quasimode,
    Smoothing,
    Saturation,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Spectrum,
        Experiment::LowerBound,
        Experiment::MicrolocalResolvent,
        Experiment::FullResolvent,
        Experiment::Quasimode,
        Experiment::Smoothing,
        Experiment::Saturation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Spectrum => "spectrum",
            Experiment::LowerBound => "lower-bound",
            Experiment::MicrolocalResolvent => "microlocal-resolvent",
            Experiment::FullResolvent => "full-resolvent",
            Experiment::Quasimode => "quasimode",
            Experiment::Smoothing => "smoothing",
            Experiment::Saturation => "saturation",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| ConfigError::UnknownExperiment(s.to_string()))
    }
}

/// Every key accepted in a config file or as `--key`.
pub const KEYS: &[&str] = &[
    "m",
    "h",
    "lambda",
    "k",
    "z",
    "half_length",
    "n",
    "epsilon_factor",
    "layer_strength",
    "radius",
    "frequency_scale",
    "alpha",
    "beta",
    "a",
    "chi_radius",
    "seed",
    "data_count",
    "time",
    "away",
    "k_max",
    "out",
    "svg",
];

pub fn normalize_key(key: &str) -> String {
    key.trim().replace('-', "_").to_ascii_lowercase()
}

pub type RawConfig = BTreeMap<String, String>;

/// Parse `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<RawConfig, ConfigError> {
    let mut map = RawConfig::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::Syntax { line: i + 1, text: raw.to_string() })?;
        let key = normalize_key(k);
        if !KEYS.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey(key));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub m: u32,
    /// Semiclassical parameters.
    pub h: Vec<f64>,
    /// Frequencies for the full resolvent.
    pub lambda: Vec<f64>,
    /// Fourier modes.
    pub k: Vec<i64>,
    pub z: f64,
    /// Grid half-length `L`; `None` uses the experiment's default.
    pub half_length: Option<f64>,
    /// Grid points for the quasimode grid.
    pub n: usize,
    pub epsilon_factor: f64,
    pub layer_strength: f64,
    pub radius: f64,
    pub frequency_scale: Option<f64>,
    pub alpha: f64,
    pub beta: f64,
    pub a: f64,
    pub chi_radius: f64,
    pub seed: u64,
    pub data_count: usize,
    pub time: f64,
    pub away: bool,
    pub k_max: Option<i64>,
    pub out: PathBuf,
    pub svg: bool,
    pub checks: Vec<Check>,
}

fn dyadic_h(from: i32, to: i32) -> Vec<f64> {
    (from..=to).map(|j| 2f64.powi(-j)).collect()
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let h = match experiment {
            Experiment::MicrolocalResolvent => dyadic_h(3, 8),
            Experiment::Quasimode => dyadic_h(4, 10),
            _ => dyadic_h(4, 9),
        };
        let k = match experiment {
            Experiment::Saturation => vec![16, 32, 64, 128],
            _ => vec![0, 1, 4, 16, 64],
        };
        Self {
            experiment,
            m: 2,
            h,
            lambda: vec![8.0, 16.0, 32.0, 64.0, 128.0],
            k,
            z: 1.0,
            half_length: None,
            n: 2048,
            epsilon_factor: 1e-2,
            layer_strength: traplab_core::grid::DEFAULT_LAYER_STRENGTH,
            radius: 1.0,
            frequency_scale: Some(1.0),
            alpha: 1.0,
            beta: 1.0,
            a: 10.0,
            chi_radius: 4.0,
            seed: 0,
            data_count: 20,
            time: 0.02,
            away: false,
            k_max: None,
            out: PathBuf::from("traplab-out"),
            svg: false,
            checks: Vec::new(),
        }
    }

    /// Defaults for `experiment`, overridden by `raw`, then by `checks`.
    pub fn resolve(experiment: Experiment, raw: &RawConfig, checks: &[String]) -> Result<Self, ConfigError> {
        let mut c = Self::defaults(experiment);
        for (key, value) in raw {
            c.set(key, value)?;
        }
        c.checks = checks
            .iter()
            .map(|s| parse_check(s).ok_or_else(|| ConfigError::Check(s.clone())))
            .collect::<Result<_, _>>()?;
        Ok(c)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let key = key.to_string();
        let scan_err = |source| ConfigError::Scan { key: key.clone(), source };
        let value_err = |reason: &str| ConfigError::Value { key: key.clone(), reason: reason.to_string() };
        let real = |v: &str| parse_number(v).map_err(scan_err);
        let positive = |v: &str| -> Result<f64, ConfigError> {
            let x = real(v)?;
            if x > 0.0 {
                Ok(x)
            } else {
                Err(value_err("must be positive"))
            }
        };
        let integer = |v: &str| -> Result<i64, ConfigError> {
            match parse_int_scan(v).map_err(scan_err)?.as_slice() {
                [x] => Ok(*x),
                _ => Err(value_err("expected a single integer")),
            }
        };
        let optional = |v: &str| -> Result<Option<f64>, ConfigError> {
            if v.eq_ignore_ascii_case("none") {
                Ok(None)
            } else {
                positive(v).map(Some)
            }
        };
        let boolean = |v: &str| -> Result<bool, ConfigError> {
            match v.to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                _ => Err(value_err("expected true or false")),
            }
        };
        match key.as_str() {
            "m" => {
                let m = integer(value)?;
                if !(1..=8).contains(&m) {
                    return Err(value_err("m must be between 1 and 8"));
                }
                self.m = m as u32;
            }
            "h" => self.h = parse_scan(value).map_err(scan_err)?,
            "lambda" => self.lambda = parse_scan(value).map_err(scan_err)?,
            "k" => self.k = parse_int_scan(value).map_err(scan_err)?,
            "z" => self.z = real(value)?,
            "half_length" => self.half_length = Some(positive(value)?),
            "n" => {
                let n = integer(value)?;
                if n < 8 {
                    return Err(value_err("need at least 8 points"));
                }
                self.n = n as usize;
            }
            "epsilon_factor" => self.epsilon_factor = positive(value)?,
            "layer_strength" => self.layer_strength = positive(value)?,
            "radius" => self.radius = positive(value)?,
            "frequency_scale" => self.frequency_scale = optional(value)?,
            "alpha" => self.alpha = positive(value)?,
            "beta" => self.beta = positive(value)?,
            "a" => self.a = positive(value)?,
            "chi_radius" => self.chi_radius = positive(value)?,
            "seed" => {
                let s = integer(value)?;
                self.seed = u64::try_from(s).map_err(|_| value_err("must be non-negative"))?;
            }
            "data_count" => {
                let d = integer(value)?;
                if d < 1 {
                    return Err(value_err("must be positive"));
                }
                self.data_count = d as usize;
            }
            "time" => self.time = positive(value)?,
            "away" => self.away = boolean(value)?,
            "k_max" => self.k_max = Some(integer(value)?),
            "out" => self.out = PathBuf::from(value),
            "svg" => self.svg = boolean(value)?,
            _ => return Err(ConfigError::UnknownKey(key.clone())),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_override() {
        let mut raw = parse_config_text("# comment\nm = 3\nlambda = 8:32:dyadic\nfrequency-scale = none\n").unwrap();
        raw.insert("m".into(), "2".into());
        let c = ExperimentConfig::resolve(Experiment::FullResolvent, &raw, &["slope=-0.667±0.1".into()]).unwrap();
        assert_eq!(c.m, 2);
        assert_eq!(c.lambda, vec![8.0, 16.0, 32.0]);
        assert_eq!(c.frequency_scale, None);
        assert_eq!(c.checks.len(), 1);
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_config_text("m 2"), Err(ConfigError::Syntax { .. })));
        assert!(matches!(parse_config_text("colour = red"), Err(ConfigError::UnknownKey(_))));
        let raw = parse_config_text("h = 1:3:dyadic").unwrap();
        assert!(matches!(ExperimentConfig::resolve(Experiment::Spectrum, &raw, &[]), Err(ConfigError::Scan { .. })));
        let raw = parse_config_text("m = 0").unwrap();
        assert!(ExperimentConfig::resolve(Experiment::Spectrum, &raw, &[]).is_err());
        assert!("nonsense".parse::<Experiment>().is_err());
        assert_eq!("lower-bound".parse::<Experiment>().unwrap(), Experiment::LowerBound);
    }

    #[test]
    fn config_round_trips_through_json() {
        let c = ExperimentConfig::defaults(Experiment::Saturation);
        let back: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(c, back);
    }
}
