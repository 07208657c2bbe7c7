//! Optional `key = value` configuration. Command-line flags override it.
//!
//! ```text
//! # truncation of infinite-dimensional inputs
//! eps_trunc = 1e-10
//! n_max_cap = 4096
//! symmetry_tol = 1e-8
//! estimator_tol = 1e-8
//! # paper-report rows can have their target or tolerance replaced
//! report.db_equivalent.tolerance = 0.02
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use pathsym_core::{estimation, symmetry, Truncation};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{source_name}:{line}: {message}")]
pub struct ConfigError {
    pub source_name: String,
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RowOverride {
    pub target: Option<f64>,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub eps_trunc: f64,
    pub n_max_start: usize,
    pub n_max_cap: usize,
    pub symmetry_tol: f64,
    pub estimator_tol: f64,
    /// Keyed by report row id.
    pub report: BTreeMap<String, RowOverride>,
}

impl Default for Settings {
    fn default() -> Self {
        let t = Truncation::default();
        Self {
            eps_trunc: t.eps,
            n_max_start: t.n_max_start,
            n_max_cap: t.n_max_cap,
            symmetry_tol: symmetry::DEFAULT_TOL,
            estimator_tol: estimation::ESTIMATOR_TOL,
            report: BTreeMap::new(),
        }
    }
}

impl Settings {
    pub fn truncation(&self) -> Truncation {
        Truncation {
            eps: self.eps_trunc,
            n_max_start: self.n_max_start,
            n_max_cap: self.n_max_cap,
        }
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let name = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            source_name: name.clone(),
            line: 0,
            message: e.to_string(),
        })?;
        Self::parse(&text, &name)
    }

    pub fn parse(text: &str, source_name: &str) -> Result<Self, ConfigError> {
        let mut settings = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| ConfigError {
                source_name: source_name.to_string(),
                line: i + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| err(format!("expected `key = value`, found `{line}`")))?;
            settings.set(key, value).map_err(err)?;
        }
        Ok(settings)
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let positive = |v: &str| -> Result<f64, String> {
            match v.parse::<f64>() {
                Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
                _ => Err(format!("`{key}` needs a positive number, found `{v}`")),
            }
        };
        let count = |v: &str| -> Result<usize, String> {
            match v.parse::<usize>() {
                Ok(x) if x > 0 => Ok(x),
                _ => Err(format!("`{key}` needs a positive integer, found `{v}`")),
            }
        };
        match key {
            "eps_trunc" => self.eps_trunc = positive(value)?,
            "n_max_start" => self.n_max_start = count(value)?,
            "n_max_cap" => self.n_max_cap = count(value)?,
            "symmetry_tol" => self.symmetry_tol = positive(value)?,
            "estimator_tol" => self.estimator_tol = positive(value)?,
            _ => {
                let Some((row, field)) = key.strip_prefix("report.").and_then(|k| k.rsplit_once('.')) else {
                    return Err(format!("unknown key `{key}`"));
                };
                let x: f64 = value
                    .parse()
                    .ok()
                    .filter(|x: &f64| x.is_finite())
                    .ok_or_else(|| format!("`{key}` needs a number, found `{value}`"))?;
                let entry = self.report.entry(row.to_string()).or_default();
                match field {
                    "target" => entry.target = Some(x),
                    "tolerance" if x >= 0.0 => entry.tolerance = Some(x),
                    "tolerance" => return Err(format!("`{key}` must be non-negative")),
                    _ => return Err(format!("unknown report field `{field}` (use target or tolerance)")),
                }
            }
        }
        Ok(())
    }
}
