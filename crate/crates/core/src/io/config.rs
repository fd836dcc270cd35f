//! Line-oriented run configuration.
//!
//! ```text
//! # comments start with '#'
//! [system]
//! kappa = 0.1
//! phi = pi/2
//!
//! [grid]
//! start = 0.95
//! stop = 1.05
//! points = 501
//! ```
//!
//! Sections: `[system]`, `[grid]`, `[sweep]`, `[validate]`, `[output]`.
//! Real values accept plain numbers and multiples of `pi` (`pi`, `3*pi/4`,
//! `-pi/2`). Unknown sections or keys are rejected with their line number.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

use crate::closed_form::ClosedFormVariant;
use crate::model::{
    Occupation, ParamError, SystemParams, DEFAULT_OMEGA_M_PHYS, DEFAULT_TEMPERATURE,
};
use crate::sweep::{FrequencyGrid, SweepParameter};

/// Where a configuration value came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Line(usize),
    Override,
    Default,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Line(n) => write!(f, "line {n}"),
            Source::Override => f.write_str("--set"),
            Source::Default => f.write_str("default"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown section `[{name}]`")]
    UnknownSection { line: usize, name: String },
    #[error("{origin}: unknown key `{key}`")]
    UnknownKey { origin: Source, key: String },
    #[error("{origin}: key `{key}` is ambiguous, qualify it as `section.key`")]
    AmbiguousKey { origin: Source, key: String },
    #[error("{origin}: duplicate key `{key}`")]
    Duplicate { origin: Source, key: String },
    #[error("{origin}: `{key}` expects {expected}, got `{value}`")]
    Type {
        origin: Source,
        key: String,
        value: String,
        expected: &'static str,
    },
    #[error("{origin}: `{key}` {message}")]
    Constraint {
        origin: Source,
        key: String,
        message: String,
    },
}

const SCHEMA: &[(&str, &[&str])] = &[
    (
        "system",
        &[
            "kappa",
            "gamma",
            "delta_eff",
            "g_eff",
            "v_hop",
            "phi",
            "theta",
            "n_bar",
            "temperature",
            "omega_m_phys",
            "s_fex",
        ],
    ),
    ("grid", &["start", "stop", "points"]),
    ("sweep", &["parameter", "start", "stop", "points"]),
    ("validate", &["variants", "points"]),
    ("output", &["path", "plot", "bandwidth_threshold"]),
];

fn known(section: &str, key: &str) -> bool {
    SCHEMA
        .iter()
        .any(|(s, keys)| *s == section && keys.contains(&key))
}

/// Parse a real number or a rational multiple of π.
pub fn parse_real(text: &str) -> Option<f64> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if let Ok(v) = t.parse::<f64>() {
        return Some(v);
    }
    let lower = t.to_ascii_lowercase();
    let (sign, body) = match lower.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, lower.strip_prefix('+').unwrap_or(&lower)),
    };
    let (numer, denom) = match body.split_once('/') {
        Some((n, d)) => (n, Some(d.parse::<f64>().ok()?)),
        None => (body, None),
    };
    let coeff = if numer == "pi" {
        1.0
    } else {
        let c = numer
            .strip_suffix("*pi")
            .or_else(|| numer.strip_suffix("pi"))?;
        c.parse::<f64>().ok()?
    };
    Some(sign * coeff * PI / denom.unwrap_or(1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let n = self.points - 1;
        (0..=n)
            .map(|i| {
                if i == n {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / n as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidateSpec {
    pub variants: Vec<ClosedFormVariant>,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub plot: Option<PathBuf>,
    pub bandwidth_threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: SystemParams,
    pub s_fex: f64,
    pub grid: FrequencyGrid,
    pub sweep: SweepSpec,
    pub validate: ValidateSpec,
    pub output: OutputSpec,
    /// `section.key` -> where its value came from, for every known key.
    pub provenance: BTreeMap<String, Source>,
}

impl RunConfig {
    pub fn defaults() -> Self {
        parse_config("").expect("empty configuration is valid")
    }

    /// Human-readable provenance listing, one key per line.
    pub fn provenance_report(&self) -> String {
        self.provenance
            .iter()
            .map(|(k, s)| format!("{k}: {s}\n"))
            .collect()
    }
}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    source: Source,
}

/// Raw `section.key` entries before typing and validation.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, Entry>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        let mut section: Option<String> = None;
        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw_line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| ConfigError::Syntax {
                    line,
                    message: format!("unterminated section header `{content}`"),
                })?;
                let name = name.trim();
                if !SCHEMA.iter().any(|(s, _)| *s == name) {
                    return Err(ConfigError::UnknownSection {
                        line,
                        name: name.to_string(),
                    });
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
            let key = key.trim();
            let source = Source::Line(line);
            let Some(sec) = &section else {
                return Err(ConfigError::Syntax {
                    line,
                    message: format!("key `{key}` appears before any section header"),
                });
            };
            if !known(sec, key) {
                return Err(ConfigError::UnknownKey {
                    origin: source,
                    key: format!("{sec}.{key}"),
                });
            }
            let full = format!("{sec}.{key}");
            if entries.contains_key(&full) {
                return Err(ConfigError::Duplicate {
                    origin: source,
                    key: full,
                });
            }
            entries.insert(
                full,
                Entry {
                    value: value.trim().to_string(),
                    source,
                },
            );
        }
        Ok(Self { entries })
    }

    /// Apply a `key=value` override. `key` may be `section.key` or a bare
    /// key that belongs to exactly one section.
    pub fn set(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| ConfigError::Type {
                origin: Source::Override,
                key: assignment.to_string(),
                value: String::new(),
                expected: "`key=value`",
            })?;
        let key = key.trim();
        let full = match key.split_once('.') {
            Some((sec, k)) if known(sec, k) => key.to_string(),
            Some(_) => {
                return Err(ConfigError::UnknownKey {
                    origin: Source::Override,
                    key: key.to_string(),
                })
            }
            None => {
                let owners: Vec<&str> = SCHEMA
                    .iter()
                    .filter(|(_, keys)| keys.contains(&key))
                    .map(|(s, _)| *s)
                    .collect();
                match owners.as_slice() {
                    [one] => format!("{one}.{key}"),
                    [] => {
                        return Err(ConfigError::UnknownKey {
                            origin: Source::Override,
                            key: key.to_string(),
                        })
                    }
                    _ => {
                        return Err(ConfigError::AmbiguousKey {
                            origin: Source::Override,
                            key: key.to_string(),
                        })
                    }
                }
            }
        };
        self.entries.insert(
            full,
            Entry {
                value: value.trim().to_string(),
                source: Source::Override,
            },
        );
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    fn real(
        &self,
        key: &str,
        default: f64,
        prov: &mut BTreeMap<String, Source>,
    ) -> Result<f64, ConfigError> {
        match self.get(key) {
            None => {
                prov.insert(key.to_string(), Source::Default);
                Ok(default)
            }
            Some(e) => {
                prov.insert(key.to_string(), e.source.clone());
                let v = parse_real(&e.value).ok_or_else(|| ConfigError::Type {
                    origin: e.source.clone(),
                    key: key.to_string(),
                    value: e.value.clone(),
                    expected: "a real number",
                })?;
                if !v.is_finite() {
                    return Err(ConfigError::Constraint {
                        origin: e.source.clone(),
                        key: key.to_string(),
                        message: "must be finite".into(),
                    });
                }
                Ok(v)
            }
        }
    }

    fn optional_real(
        &self,
        key: &str,
        prov: &mut BTreeMap<String, Source>,
    ) -> Result<Option<f64>, ConfigError> {
        if self.get(key).is_some() {
            self.real(key, 0.0, prov).map(Some)
        } else {
            prov.insert(key.to_string(), Source::Default);
            Ok(None)
        }
    }

    fn count(
        &self,
        key: &str,
        default: usize,
        prov: &mut BTreeMap<String, Source>,
    ) -> Result<usize, ConfigError> {
        match self.get(key) {
            None => {
                prov.insert(key.to_string(), Source::Default);
                Ok(default)
            }
            Some(e) => {
                prov.insert(key.to_string(), e.source.clone());
                e.value.parse::<usize>().map_err(|_| ConfigError::Type {
                    origin: e.source.clone(),
                    key: key.to_string(),
                    value: e.value.clone(),
                    expected: "a non-negative integer",
                })
            }
        }
    }

    fn text(&self, key: &str, prov: &mut BTreeMap<String, Source>) -> Option<(String, Source)> {
        match self.get(key) {
            None => {
                prov.insert(key.to_string(), Source::Default);
                None
            }
            Some(e) => {
                prov.insert(key.to_string(), e.source.clone());
                Some((e.value.clone(), e.source.clone()))
            }
        }
    }

    fn source_of(&self, key: &str) -> Source {
        self.get(key).map_or(Source::Default, |e| e.source.clone())
    }

    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let mut prov = BTreeMap::new();
        let defaults = SystemParams::reference();

        let kappa = self.real("system.kappa", defaults.kappa(), &mut prov)?;
        let gamma = self.real("system.gamma", defaults.gamma(), &mut prov)?;
        let delta_eff = self.real("system.delta_eff", defaults.delta_eff(), &mut prov)?;
        let g_eff = self.real("system.g_eff", defaults.g_eff(), &mut prov)?;
        let v_hop = self.real("system.v_hop", defaults.v_hop(), &mut prov)?;
        let phi = self.real("system.phi", defaults.phi(), &mut prov)?;
        let theta = self.real("system.theta", defaults.theta(), &mut prov)?;
        let s_fex = self.real("system.s_fex", 0.0, &mut prov)?;
        if s_fex < 0.0 {
            return Err(ConfigError::Constraint {
                origin: self.source_of("system.s_fex"),
                key: "system.s_fex".into(),
                message: "must be >= 0".into(),
            });
        }

        let n_bar = self.optional_real("system.n_bar", &mut prov)?;
        let temperature = self.optional_real("system.temperature", &mut prov)?;
        let omega_m_phys = self.optional_real("system.omega_m_phys", &mut prov)?;
        let mut builder = SystemParams::builder()
            .kappa(kappa)
            .gamma(gamma)
            .delta_eff(delta_eff)
            .g_eff(g_eff)
            .v_hop(v_hop)
            .phi(phi)
            .theta(theta);
        builder = match (n_bar, temperature) {
            (Some(_), Some(_)) => {
                return Err(ConfigError::Constraint {
                    origin: self.source_of("system.n_bar"),
                    key: "system.n_bar".into(),
                    message: "cannot be combined with `temperature`; give one or the other".into(),
                })
            }
            (Some(n), None) => {
                let b = builder.n_bar(n);
                match omega_m_phys {
                    Some(w) => b.omega_m_phys(w),
                    None => b,
                }
            }
            (None, t) => builder.occupation(Occupation::Thermal {
                temperature: t.unwrap_or(DEFAULT_TEMPERATURE),
                omega_m_phys: omega_m_phys.unwrap_or(DEFAULT_OMEGA_M_PHYS),
            }),
        };
        let params = builder.build().map_err(|e| {
            let name = match &e {
                ParamError::NonFinite { name, .. } | ParamError::Constraint { name, .. } => *name,
                ParamError::ConflictingOccupation => "n_bar",
            };
            let key = format!("system.{name}");
            ConfigError::Constraint {
                origin: self.source_of(&key),
                key,
                message: e.to_string(),
            }
        })?;

        let gstart = self.real("grid.start", 0.95, &mut prov)?;
        let gstop = self.real("grid.stop", 1.05, &mut prov)?;
        let gpoints = self.count("grid.points", 501, &mut prov)?;
        let grid =
            FrequencyGrid::new(gstart, gstop, gpoints).map_err(|e| ConfigError::Constraint {
                origin: self.source_of("grid.points"),
                key: "grid".into(),
                message: e.to_string(),
            })?;

        let parameter = match self.text("sweep.parameter", &mut prov) {
            None => SweepParameter::GEff,
            Some((v, source)) => v.parse().map_err(|_| ConfigError::Type {
                origin: source,
                key: "sweep.parameter".into(),
                value: v,
                expected: "one of g_eff, kappa, v_hop, phi",
            })?,
        };
        let sweep = SweepSpec {
            parameter,
            start: self.real("sweep.start", 1e-3, &mut prov)?,
            stop: self.real("sweep.stop", 1e-2, &mut prov)?,
            points: self.count("sweep.points", 19, &mut prov)?,
        };
        let sweep_ok = sweep.points >= 1 && (sweep.points == 1 || sweep.start < sweep.stop);
        if !sweep_ok {
            return Err(ConfigError::Constraint {
                origin: self.source_of("sweep.points"),
                key: "sweep".into(),
                message: "needs points >= 1 and start < stop".into(),
            });
        }

        let variants = match self.text("validate.variants", &mut prov) {
            None => ClosedFormVariant::ALL.to_vec(),
            Some((v, _)) if v.trim() == "all" => ClosedFormVariant::ALL.to_vec(),
            Some((v, source)) => v
                .split(',')
                .map(|s| s.parse::<ClosedFormVariant>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| ConfigError::Type {
                    origin: source,
                    key: "validate.variants".into(),
                    value: v.clone(),
                    expected: "`all` or a comma list like e5-plus/tilde-1-6",
                })?,
        };
        let vpoints = self.count("validate.points", 201, &mut prov)?;
        if vpoints == 0 {
            return Err(ConfigError::Constraint {
                origin: self.source_of("validate.points"),
                key: "validate.points".into(),
                message: "must be >= 1".into(),
            });
        }

        let path = self
            .text("output.path", &mut prov)
            .map(|(v, _)| PathBuf::from(v));
        let plot = self
            .text("output.plot", &mut prov)
            .map(|(v, _)| PathBuf::from(v));
        let bandwidth_threshold = self.optional_real("output.bandwidth_threshold", &mut prov)?;
        if let Some(t) = bandwidth_threshold {
            if t <= 0.0 {
                return Err(ConfigError::Constraint {
                    origin: self.source_of("output.bandwidth_threshold"),
                    key: "output.bandwidth_threshold".into(),
                    message: "must be > 0".into(),
                });
            }
        }

        Ok(RunConfig {
            params,
            s_fex,
            grid,
            sweep,
            validate: ValidateSpec {
                variants,
                points: vpoints,
            },
            output: OutputSpec {
                path,
                plot,
                bandwidth_threshold,
            },
            provenance: prov,
        })
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    RawConfig::parse(text)?.resolve()
}

/// Parse `text`, apply `overrides` in order, then validate.
pub fn parse_config_with_overrides<S: AsRef<str>>(
    text: &str,
    overrides: &[S],
) -> Result<RunConfig, ConfigError> {
    let mut raw = RawConfig::parse(text)?;
    for o in overrides {
        raw.set(o.as_ref())?;
    }
    raw.resolve()
}
