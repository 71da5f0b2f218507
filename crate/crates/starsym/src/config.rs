//! Resolved run configuration. Every artifact embeds it, minus paths.

use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::body::BodySpec;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Analyze,
    Sections,
    Verify,
    Harmonics,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(CliError::Usage(format!("unknown format '{other}' (expected csv, json or svg)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    Conical,
    Hyperplane,
}

impl CurveKind {
    pub fn name(self) -> &'static str {
        match self {
            CurveKind::Conical => "conical",
            CurveKind::Hyperplane => "hyperplane",
        }
    }
}

impl FromStr for CurveKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim() {
            "conical" => Ok(CurveKind::Conical),
            "hyperplane" => Ok(CurveKind::Hyperplane),
            other => Err(CliError::Usage(format!("unknown section kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerName {
    Antipodal,
    Fibonacci,
    Random,
}

impl FromStr for SamplerName {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "antipodal" => Ok(SamplerName::Antipodal),
            "fibonacci" => Ok(SamplerName::Fibonacci),
            "random" => Ok(SamplerName::Random),
            other => Err(CliError::Usage(format!("unknown sampler '{other}'"))),
        }
    }
}

/// `start:stop:step`, both ends included when they fall on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl ZRange {
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.start + i as f64 * self.step).collect()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.step > 0.0 && self.step.is_finite()) || !(self.start <= self.stop) {
            return Err(CliError::Usage(format!(
                "z grid needs start <= stop and step > 0, got {}:{}:{}",
                self.start, self.stop, self.step
            )));
        }
        if let Some(z) = self.values().into_iter().find(|z| !(*z > -1.0 && *z < 1.0)) {
            return Err(CliError::Usage(format!("z = {z} is outside (-1, 1)")));
        }
        Ok(())
    }
}

impl FromStr for ZRange {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad number '{t}' in z grid '{s}'")))
        };
        let range = match parts.as_slice() {
            [z] => {
                let z = num(z)?;
                ZRange { start: z, stop: z, step: 1.0 }
            }
            [a, b, c] => ZRange { start: num(a)?, stop: num(b)?, step: num(c)? },
            _ => return Err(CliError::Usage(format!("z grid must be start:stop:step, got '{s}'"))),
        };
        range.validate()?;
        Ok(range)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body_spec: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<BodySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_dirs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler: Option<SamplerName>,
    pub seed: u64,
    pub fd_step: f64,
    pub fd_levels: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_grid: Option<ZRange>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub kinds: Vec<CurveKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub only: Option<String>,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub formats: Vec<Format>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            body_spec: None,
            body: None,
            dim: None,
            resolution: None,
            num_dirs: None,
            sampler: None,
            seed: 0,
            fd_step: 1e-2,
            fd_levels: 4,
            z_grid: None,
            kinds: Vec::new(),
            xi: None,
            threshold: None,
            l_max: None,
            only: None,
            output_dir: PathBuf::from("."),
            formats: Vec::new(),
        }
    }

    pub fn parse_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Parameters as embedded in output files: everything except paths, so
    /// that reruns into another directory give identical bytes.
    pub fn recorded_parameters(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Some(map) = v.as_object_mut() {
            map.remove("output_dir");
            map.remove("body_spec");
        }
        v
    }

    pub fn fd_options(&self) -> starsym_core::fd::FdOptions {
        starsym_core::fd::FdOptions { h0: self.fd_step, levels: self.fd_levels }
    }
}

/// Comma-separated list parser shared by the command line flags.
pub fn parse_list<T: FromStr<Err = CliError>>(s: &str) -> Result<Vec<T>, CliError> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(T::from_str).collect()
}
