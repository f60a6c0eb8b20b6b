//! Flat `key = value` configuration files.
//!
//! Grammar, one entry per line:
//!
//! ```text
//! # comment            (also allowed after a value)
//! key = value
//! key = v1, v2, v3     (lists are comma separated)
//! ```
//!
//! Keys are lowercase identifiers. A key may appear once per file; later
//! overrides (command-line flags) replace file values.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{CouplingMode, SystemConfig};

/// Every key the parser accepts.
pub const KNOWN_KEYS: &[&str] = &[
    "n",
    "omega0",
    "omega",
    "j",
    "gamma",
    "mode",
    "mu",
    "delta_mu",
    "temperature",
    "preset",
    "axis",
    "start",
    "stop",
    "points",
    "family",
    "family_values",
    "output",
    "plot",
    "timing",
    "max_points",
];

/// Fraction of ω used in place of a requested zero temperature.
pub const ZERO_TEMPERATURE_FRACTION: f64 = 1e-3;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigMap {
    // key -> (raw value, source line; 0 for overrides)
    entries: BTreeMap<String, (String, usize)>,
}

impl ConfigMap {
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| Error::Parse { line, message: format!("expected `key = value`, got `{content}`") })?;
            let key = key.trim();
            check_key(key).map_err(|message| Error::Parse { line, message })?;
            let value = value.trim();
            if value.is_empty() {
                return Err(Error::Parse { line, message: format!("empty value for `{key}`") });
            }
            if map.entries.contains_key(key) {
                return Err(Error::Parse { line, message: format!("duplicate key `{key}`") });
            }
            map.entries.insert(key.to_string(), (value.to_string(), line));
        }
        Ok(map)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Sets or replaces a key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        check_key(key).map_err(|message| Error::Parse { line: 0, message })?;
        self.entries.insert(key.to_string(), (value.trim().to_string(), 0));
        Ok(())
    }

    /// Parses a `key=value` override.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::Parse { line: 0, message: format!("override `{pair}` is not key=value") })?;
        self.set(k.trim(), v)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    fn err(&self, key: &str, message: String) -> Error {
        let line = self.entries.get(key).map_or(0, |e| e.1);
        Error::Parse { line, message: format!("`{key}`: {message}") }
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key).map(|v| parse_f64(v).map_err(|m| self.err(key, m))).transpose()
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>> {
        self.get(key)
            .map(|v| v.parse::<usize>().map_err(|_| self.err(key, format!("expected a non-negative integer, got `{v}`"))))
            .transpose()
    }

    pub fn get_bool(&self, key: &str) -> Result<Option<bool>> {
        self.get(key)
            .map(|v| match v {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                _ => Err(self.err(key, format!("expected true or false, got `{v}`"))),
            })
            .transpose()
    }

    pub fn get_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.get(key)
            .map(|v| v.split(',').map(|s| parse_f64(s.trim()).map_err(|m| self.err(key, m))).collect())
            .transpose()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

fn check_key(key: &str) -> std::result::Result<(), String> {
    if KNOWN_KEYS.contains(&key) {
        Ok(())
    } else {
        Err(format!("unknown key `{key}`"))
    }
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("expected a finite number, got `{s}`")),
    }
}

/// Scalar physical parameters of one point; the reservoirs follow from
/// `mu`, `delta_mu` and `temperature`.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub n_qubits: usize,
    pub omega0: f64,
    pub omega: f64,
    pub coupling_j: f64,
    pub gamma: f64,
    pub mode: CouplingMode,
    pub mu: f64,
    /// Ancilla reservoirs sit at `mu + delta_mu` (individual coupling only).
    pub delta_mu: f64,
    pub temperature: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            n_qubits: 3,
            omega0: 10.0,
            omega: 1.0,
            coupling_j: 1.0,
            gamma: 1.0,
            mode: CouplingMode::EquilibriumCollective,
            mu: 0.0,
            delta_mu: 0.0,
            temperature: 1.0,
        }
    }
}

/// A non-fatal adjustment made while reading parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Warning(pub String);

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Maps a requested `T = 0` to `1e-3·ω`; negative temperatures are errors.
pub fn effective_temperature(t: f64, omega: f64) -> Result<(f64, Option<Warning>)> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::NonPositiveTemperature(t));
    }
    if t == 0.0 {
        let sub = ZERO_TEMPERATURE_FRACTION * omega.abs();
        return Ok((sub, Some(Warning(format!("temperature 0 is not representable; using {sub}")))));
    }
    Ok((t, None))
}

pub fn parse_mode(s: &str) -> Result<CouplingMode> {
    match s {
        "equilibrium" | "collective" => Ok(CouplingMode::EquilibriumCollective),
        "nonequilibrium" | "individual" => Ok(CouplingMode::NonEquilibriumIndividual),
        _ => Err(Error::InvalidConfig(format!("unknown mode `{s}` (equilibrium or nonequilibrium)"))),
    }
}

impl Scenario {
    /// Applies the physics keys present in `map` on top of `self`.
    pub fn apply(mut self, map: &ConfigMap) -> Result<(Self, Vec<Warning>)> {
        if let Some(n) = map.get_usize("n")? {
            self.n_qubits = n;
        }
        for (key, slot) in [
            ("omega0", &mut self.omega0),
            ("omega", &mut self.omega),
            ("j", &mut self.coupling_j),
            ("gamma", &mut self.gamma),
            ("mu", &mut self.mu),
            ("delta_mu", &mut self.delta_mu),
            ("temperature", &mut self.temperature),
        ] {
            if let Some(v) = map.get_f64(key)? {
                *slot = v;
            }
        }
        if let Some(m) = map.get("mode") {
            self.mode = parse_mode(m)?;
        }
        let (t, w) = effective_temperature(self.temperature, self.omega)?;
        self.temperature = t;
        Ok((self, w.into_iter().collect()))
    }

    pub fn from_map(map: &ConfigMap) -> Result<(Self, Vec<Warning>)> {
        Self::default().apply(map)
    }

    pub fn to_config(&self) -> Result<SystemConfig> {
        let cfg = match self.mode {
            CouplingMode::EquilibriumCollective => {
                if self.delta_mu != 0.0 {
                    return Err(Error::InvalidConfig(
                        "delta_mu needs individual reservoirs (mode = nonequilibrium)".into(),
                    ));
                }
                SystemConfig::equilibrium(self.n_qubits, self.mu, self.temperature)
            }
            CouplingMode::NonEquilibriumIndividual => {
                SystemConfig::biased(self.n_qubits, self.mu, self.delta_mu, self.temperature)
            }
        }
        .with_omega0(self.omega0)
        .with_omega(self.omega)
        .with_coupling(self.coupling_j)
        .with_gamma(self.gamma);
        cfg.validate()?;
        Ok(cfg)
    }
}
