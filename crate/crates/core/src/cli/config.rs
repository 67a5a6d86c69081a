use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{GeoError, Result};
use crate::geometry_core::GeometryId;
use crate::preservation_lab::DEFAULT_TOL;

/// Environment variable naming a `key=value` config file.
pub const CONFIG_ENV: &str = "GEOLAB_CONFIG";

/// Keys accepted in a config file.
pub const CONFIG_KEYS: [&str; 8] = ["geometry", "seed", "tol", "steps", "t", "out", "format", "suite"];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = GeoError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(GeoError::Parse(format!("unknown format `{s}` (expected csv or json)"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// Parsed `key=value` lines; `#` starts a comment.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConfigFile {
    pub values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| GeoError::Parse(format!("config line {}: expected key=value", n + 1)))?;
            let key = k.trim().to_ascii_lowercase();
            if !CONFIG_KEYS.contains(&key.as_str()) {
                return Err(GeoError::Parse(format!("config line {}: unknown key `{key}`", n + 1)));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GeoError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The file named by `GEOLAB_CONFIG`, or an empty config.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(CONFIG_ENV) {
            Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
            _ => Ok(ConfigFile::default()),
        }
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        self.values
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| GeoError::Parse(format!("config `{key}`: {e}")))
            })
            .transpose()
    }
}

/// Settings shared by every command after merging flags, the config file
/// and defaults, in that order of precedence.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub geometry: Option<GeometryId>,
    pub seed: u64,
    pub tol: f64,
    /// RK4 steps; `None` picks them from the arc length.
    pub steps: Option<usize>,
    pub t: f64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub suite: Option<String>,
}

/// Flag values as given on the command line.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub geometry: Option<GeometryId>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub steps: Option<usize>,
    pub t: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub suite: Option<String>,
}

pub const DEFAULT_T: f64 = 10.0;

impl RunConfig {
    pub fn resolve(command: &str, flags: Overrides, file: &ConfigFile) -> Result<Self> {
        let cfg = RunConfig {
            command: command.to_string(),
            geometry: flags.geometry.or(file.get("geometry")?),
            seed: flags.seed.or(file.get("seed")?).unwrap_or(0),
            tol: flags.tol.or(file.get("tol")?).unwrap_or(DEFAULT_TOL),
            steps: flags.steps.or(file.get("steps")?),
            t: flags.t.or(file.get("t")?).unwrap_or(DEFAULT_T),
            out: flags.out.or(file.get("out")?),
            format: flags.format.or(file.get("format")?).unwrap_or_default(),
            suite: flags.suite.or(file.get("suite")?),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(GeoError::InvalidArgument(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.steps == Some(0) {
            return Err(GeoError::InvalidArgument("steps must be positive".into()));
        }
        if !(self.t > 0.0) || !self.t.is_finite() {
            return Err(GeoError::InvalidArgument(format!("t must be positive, got {}", self.t)));
        }
        Ok(())
    }

    pub fn require_geometry(&self) -> Result<GeometryId> {
        self.geometry
            .ok_or_else(|| GeoError::InvalidArgument("--geometry is required".into()))
    }
}

/// Comma-separated reals, e.g. `1,0,2`.
pub fn parse_reals(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|e| GeoError::Parse(format!("`{x}` in `{s}`: {e}")))
        })
        .collect()
}
