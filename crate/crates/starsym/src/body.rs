//! Body specification files.
//!
//! ```json
//! {"kind": "shifted_ball", "dim": 3, "params": {"radius": 1.0, "center": [0.1, 0.0, 0.0]}}
//! ```
//!
//! | kind            | params                                      |
//! |-----------------|---------------------------------------------|
//! | `ball`          | `radius` (default 1)                        |
//! | `shifted_ball`  | `radius` (default 1), `center` (length dim) |
//! | `ellipsoid`     | `semiaxes` (length dim)                     |
//! | `harmonic_ball` | `epsilon`, `degree`, `order` (dim 3 only)   |

use std::path::Path;

use serde::{Deserialize, Serialize};
use starsym_core::{bodies, RadialField};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BodyKind {
    Ball,
    ShiftedBall,
    Ellipsoid,
    HarmonicBall,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodySpec {
    pub kind: BodyKind,
    pub dim: usize,
    #[serde(default = "empty_params")]
    pub params: serde_json::Value,
}

fn empty_params() -> serde_json::Value {
    serde_json::Value::Object(Default::default())
}

fn default_radius() -> f64 {
    1.0
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BallParams {
    #[serde(default = "default_radius")]
    radius: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ShiftedBallParams {
    #[serde(default = "default_radius")]
    radius: f64,
    center: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EllipsoidParams {
    semiaxes: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HarmonicBallParams {
    epsilon: f64,
    degree: usize,
    #[serde(default)]
    order: i64,
}

fn params<T: serde::de::DeserializeOwned>(kind: &str, v: &serde_json::Value) -> Result<T, CliError> {
    serde_json::from_value(v.clone()).map_err(|e| CliError::Spec(format!("{kind} params: {e}")))
}

fn check_len(what: &str, len: usize, dim: usize) -> Result<(), CliError> {
    if len == dim {
        Ok(())
    } else {
        Err(CliError::Spec(format!("{what} has {len} entries but dim is {dim}")))
    }
}

impl BodySpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Spec(format!("body spec: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Spec(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn build(&self) -> Result<RadialField, CliError> {
        let n = self.dim;
        let body = match self.kind {
            BodyKind::Ball => {
                let p: BallParams = params("ball", &self.params)?;
                bodies::ball(n, p.radius)
            }
            BodyKind::ShiftedBall => {
                let p: ShiftedBallParams = params("shifted_ball", &self.params)?;
                check_len("center", p.center.len(), n)?;
                bodies::shifted_ball(p.radius, &p.center)
            }
            BodyKind::Ellipsoid => {
                let p: EllipsoidParams = params("ellipsoid", &self.params)?;
                check_len("semiaxes", p.semiaxes.len(), n)?;
                bodies::ellipsoid(&p.semiaxes)
            }
            BodyKind::HarmonicBall => {
                let p: HarmonicBallParams = params("harmonic_ball", &self.params)?;
                if n != 3 {
                    return Err(CliError::Spec(format!("harmonic_ball needs dim 3, got {n}")));
                }
                bodies::harmonic_ball(p.epsilon, p.degree, p.order)
            }
        };
        body.map_err(|e| CliError::Spec(e.to_string()))
    }
}
