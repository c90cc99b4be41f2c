//! Flat `key = value` run-configuration files.
//!
//! Parsing is fail-closed: unknown keys, duplicate keys, and malformed
//! lines are hard errors with the offending line number, and every value is
//! validated before a [`RunConfig`] is produced. `#` starts a comment
//! (whole-line or trailing); blank lines are ignored. All values are SI.
//!
//! ```text
//! # fluorine-proton pair
//! gamma_i     = f19          # nuclide symbol or rad s^-1 T^-1
//! gamma_s     = h1
//! b0          = 0.705        # T
//! r           = 96.098e-12   # m
//! temperature = 293.0        # K
//!
//! model = isotropic
//! tau_c = 0.2391e-12         # s
//!
//! kind      = saturation_s
//! t_start   = 0.0            # s
//! t_stop    = 10.0           # s
//! t_count   = 200
//! t_spacing = linear
//! format    = csv
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;

use thiserror::Error;

use spinpair::experiment::ExperimentKind;
use spinpair::spectral::SpectralDensityModel;
use spinpair::system::{gyromagnetic, PhysicalConstants, SpinPairSystem};

/// Keys that must be present in every configuration.
pub const REQUIRED_KEYS: &[&str] = &["gamma_i", "gamma_s", "b0", "r", "temperature", "model"];

/// Every key the parser accepts.
const KNOWN_KEYS: &[&str] = &[
    "gamma_i",
    "gamma_s",
    "b0",
    "r",
    "temperature",
    "model",
    "tau_c",
    "s2",
    "tau_m",
    "tau_e",
    "kappa",
    "kind",
    "t_start",
    "t_stop",
    "t_count",
    "t_spacing",
    "format",
    "output",
];

/// Configuration errors: syntactic (with line number) or semantic (with
/// field name).
#[derive(Debug, Error)]
pub enum ConfigError {
    /// The document is not well-formed `key = value` text.
    #[error("config line {line}: {message}")]
    Parse {
        /// 1-based line number of the offending line.
        line: usize,
        /// What went wrong.
        message: String,
    },
    /// A value (or combination of values) is invalid.
    #[error("config field `{field}`: {message}")]
    Validation {
        /// The offending field (or comma-separated list).
        field: String,
        /// What went wrong.
        message: String,
    },
}

/// Spacing rule of the trajectory time grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeSpacing {
    /// Equidistant points from start to stop.
    Linear,
    /// Logarithmically spaced points (requires a positive start).
    Log,
}

/// Output serialization format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    /// Comma-separated values with a header row.
    Csv,
    /// Pretty-printed JSON mirroring the library type field names.
    Json,
}

/// A fully validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// The validated physical system.
    pub system: SpinPairSystem,
    /// The validated spectral-density model.
    pub model: SpectralDensityModel,
    /// Optional override of the dipolar coupling constant, s^-2 (for
    /// reproducing externally quoted rate scales); `None` derives it from
    /// the system geometry.
    pub kappa_override: Option<f64>,
    /// Experiment preparation (default: saturation of S).
    pub kind: ExperimentKind,
    /// First time-grid point, s.
    pub t_start: f64,
    /// Last time-grid point, s.
    pub t_stop: f64,
    /// Number of grid points (at least 2).
    pub t_count: usize,
    /// Grid spacing rule.
    pub t_spacing: TimeSpacing,
    /// Output format for trajectory-like results.
    pub format: OutputFormat,
    /// Output path; `None` writes to standard output.
    pub output: Option<PathBuf>,
}

impl RunConfig {
    /// The dipolar coupling constant to use: the configured override, or
    /// the value derived from the system geometry.
    pub fn kappa(&self, consts: &PhysicalConstants) -> f64 {
        self.kappa_override
            .unwrap_or_else(|| self.system.dipolar_constant(consts))
    }

    /// Materializes the time grid, s.
    pub fn time_grid(&self) -> Vec<f64> {
        let n = self.t_count;
        let steps = (n - 1) as f64;
        match self.t_spacing {
            TimeSpacing::Linear => (0..n)
                .map(|k| self.t_start + (self.t_stop - self.t_start) * k as f64 / steps)
                .collect(),
            TimeSpacing::Log => {
                let (la, lb) = (self.t_start.log10(), self.t_stop.log10());
                (0..n)
                    .map(|k| 10f64.powf(la + (lb - la) * k as f64 / steps))
                    .collect()
            }
        }
    }
}

fn parse_number(field: &str, value: &str) -> Result<f64, ConfigError> {
    value.parse::<f64>().map_err(|_| ConfigError::Validation {
        field: field.to_string(),
        message: format!("not a number: `{value}`"),
    })
}

fn parse_count(field: &str, value: &str) -> Result<usize, ConfigError> {
    value.parse::<usize>().map_err(|_| ConfigError::Validation {
        field: field.to_string(),
        message: format!("not a nonnegative integer: `{value}`"),
    })
}

/// A gyromagnetic ratio: either a nuclide symbol or a number in
/// rad s^-1 T^-1.
fn parse_gamma(field: &str, value: &str) -> Result<f64, ConfigError> {
    match value.to_ascii_lowercase().as_str() {
        "h1" | "1h" => Ok(gyromagnetic::H1),
        "f19" | "19f" => Ok(gyromagnetic::F19),
        "c13" | "13c" => Ok(gyromagnetic::C13),
        "n15" | "15n" => Ok(gyromagnetic::N15),
        _ => parse_number(field, value),
    }
}

fn validation(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Validation {
        field: field.to_string(),
        message: message.into(),
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut entries: BTreeMap<&str, String> = BTreeMap::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Parse {
            line,
            message: format!("expected `key = value`, got `{content}`"),
        })?;
        let key = key.trim();
        let value = value.trim();
        let known = KNOWN_KEYS
            .iter()
            .find(|&&k| k == key)
            .ok_or_else(|| ConfigError::Parse {
                line,
                message: format!("unknown key `{key}`"),
            })?;
        if value.is_empty() {
            return Err(ConfigError::Parse {
                line,
                message: format!("empty value for `{key}`"),
            });
        }
        if entries.insert(known, value.to_string()).is_some() {
            return Err(ConfigError::Parse {
                line,
                message: format!("duplicate key `{key}`"),
            });
        }
    }

    let missing: Vec<&str> = REQUIRED_KEYS
        .iter()
        .filter(|&&k| !entries.contains_key(k))
        .copied()
        .collect();
    if !missing.is_empty() {
        return Err(validation(
            &missing.join(", "),
            format!("missing; required keys: {}", REQUIRED_KEYS.join(", ")),
        ));
    }

    let gamma_i = parse_gamma("gamma_i", &entries["gamma_i"])?;
    let gamma_s = parse_gamma("gamma_s", &entries["gamma_s"])?;
    let b0 = parse_number("b0", &entries["b0"])?;
    let r = parse_number("r", &entries["r"])?;
    let temperature = parse_number("temperature", &entries["temperature"])?;
    let system = SpinPairSystem::new(gamma_i, gamma_s, b0, r, temperature)
        .map_err(|e| validation("gamma_i, gamma_s, b0, r, temperature", e.to_string()))?;

    let model_name = entries["model"].as_str();
    let forbid = |keys: &[&str], because: &str| -> Result<(), ConfigError> {
        for key in keys {
            if entries.contains_key(*key) {
                return Err(validation(key, format!("not valid for {because}")));
            }
        }
        Ok(())
    };
    let require = |key: &'static str, because: &str| -> Result<&String, ConfigError> {
        entries
            .get(key)
            .ok_or_else(|| validation(key, format!("required for {because}")))
    };
    let model = match model_name {
        "isotropic" => {
            forbid(&["s2", "tau_m", "tau_e"], "model = isotropic")?;
            let tau_c = parse_number("tau_c", require("tau_c", "model = isotropic")?)?;
            SpectralDensityModel::isotropic(tau_c)
                .map_err(|e| validation("tau_c", e.to_string()))?
        }
        "model_free" => {
            forbid(&["tau_c"], "model = model_free")?;
            let s2 = parse_number("s2", require("s2", "model = model_free")?)?;
            let tau_m = parse_number("tau_m", require("tau_m", "model = model_free")?)?;
            let tau_e = parse_number("tau_e", require("tau_e", "model = model_free")?)?;
            SpectralDensityModel::model_free(s2, tau_m, tau_e)
                .map_err(|e| validation("s2, tau_m, tau_e", e.to_string()))?
        }
        other => {
            return Err(validation(
                "model",
                format!("unknown model `{other}` (expected isotropic or model_free)"),
            ))
        }
    };

    let kappa_override = match entries.get("kappa") {
        Some(v) => {
            let kappa = parse_number("kappa", v)?;
            if !kappa.is_finite() || kappa <= 0.0 {
                return Err(validation("kappa", "must be a positive number (s^-2)"));
            }
            Some(kappa)
        }
        None => None,
    };

    let kind = match entries.get("kind") {
        None => ExperimentKind::SaturationS,
        Some(v) => match v.replace('-', "_").as_str() {
            "saturation_s" => ExperimentKind::SaturationS,
            "inversion_s" => ExperimentKind::InversionS,
            "inversion_both" => ExperimentKind::InversionBoth,
            other => {
                return Err(validation(
                    "kind",
                    format!(
                        "unknown experiment `{other}` (expected saturation_s, inversion_s, or inversion_both)"
                    ),
                ))
            }
        },
    };

    let t_start = match entries.get("t_start") {
        Some(v) => parse_number("t_start", v)?,
        None => 0.0,
    };
    let t_stop = match entries.get("t_stop") {
        Some(v) => parse_number("t_stop", v)?,
        None => 10.0,
    };
    let t_count = match entries.get("t_count") {
        Some(v) => parse_count("t_count", v)?,
        None => 200,
    };
    let t_spacing = match entries.get("t_spacing").map(String::as_str) {
        None | Some("linear") => TimeSpacing::Linear,
        Some("log") => TimeSpacing::Log,
        Some(other) => {
            return Err(validation(
                "t_spacing",
                format!("unknown spacing `{other}` (expected linear or log)"),
            ))
        }
    };
    if !t_start.is_finite() || t_start < 0.0 {
        return Err(validation("t_start", "must be finite and nonnegative"));
    }
    if !t_stop.is_finite() || t_stop <= t_start {
        return Err(validation("t_stop", "must be finite and greater than t_start"));
    }
    if t_count < 2 {
        return Err(validation("t_count", "must be at least 2"));
    }
    if t_spacing == TimeSpacing::Log && t_start == 0.0 {
        return Err(validation(
            "t_start",
            "log spacing requires a strictly positive t_start",
        ));
    }

    let format = match entries.get("format").map(String::as_str) {
        None | Some("csv") => OutputFormat::Csv,
        Some("json") => OutputFormat::Json,
        Some(other) => {
            return Err(validation(
                "format",
                format!("unknown format `{other}` (expected csv or json)"),
            ))
        }
    };

    let output = entries.get("output").map(PathBuf::from);

    Ok(RunConfig {
        system,
        model,
        kappa_override,
        kind,
        t_start,
        t_stop,
        t_count,
        t_spacing,
        format,
        output,
    })
}
