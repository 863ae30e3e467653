//! Declarative JSON description of one or more redundant systems.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "family": "lomax",
//!   "structure": {"k_of_n": [3, 4]},
//!   "copula": "gumbel",
//!   "systems": [
//!     {"level": "component", "b": [1.2, 0.5, 0.4, 0.2], "theta": 20},
//!     {"level": "component", "b": [1.0, 0.5, 0.3, 0.2], "theta": 25}
//!   ],
//!   "theta_range": [15, 30]
//! }
//! ```
//!
//! Component-level systems take a scalar `theta`; system-level systems take
//! either a scalar (shared by every subsystem) or one value per subsystem.

use serde::{Deserialize, Serialize};

use crate::conditions::TheoremSpec;
use crate::copulas::CopulaFamily;
use crate::distributions::LifetimeFamily;
use crate::error::{Error, Result};
use crate::structure::{CoherentStructure, Distortion};
use crate::systems::{
    ComponentLevelSystem, EvalGrid, RedundantSystem, SystemLevelSystem, DEFAULT_GRID_POINTS, DEFAULT_Y_MAX,
    DEFAULT_Y_MIN,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Component,
    System,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StructureSpec {
    KOfN([usize; 2]),
    /// Minimal path sets over components `1..=n`.
    PathSets(Vec<Vec<usize>>),
}

impl StructureSpec {
    pub fn build(&self) -> Result<CoherentStructure> {
        match self {
            StructureSpec::KOfN([k, n]) => CoherentStructure::k_out_of_n(*k, *n),
            StructureSpec::PathSets(sets) => {
                let n = sets.iter().flatten().copied().max().unwrap_or(0);
                CoherentStructure::new(n, sets.clone())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThetaSpec {
    Scalar(f64),
    PerSubsystem(Vec<f64>),
}

impl ThetaSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            ThetaSpec::Scalar(t) => vec![*t],
            ThetaSpec::PerSubsystem(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub level: Level,
    pub b: Vec<f64>,
    pub theta: ThetaSpec,
}

impl SystemSpec {
    /// One θ per block or subsystem; a scalar is broadcast.
    pub fn thetas(&self) -> Vec<f64> {
        match &self.theta {
            ThetaSpec::Scalar(t) => vec![*t; self.b.len().max(1)],
            ThetaSpec::PerSubsystem(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub points: usize,
    #[serde(default = "default_y_min")]
    pub y_min: f64,
    #[serde(default = "default_y_max")]
    pub y_max: f64,
}

fn default_y_min() -> f64 {
    DEFAULT_Y_MIN
}

fn default_y_max() -> f64 {
    DEFAULT_Y_MAX
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { points: DEFAULT_GRID_POINTS, y_min: DEFAULT_Y_MIN, y_max: DEFAULT_Y_MAX }
    }
}

/// Spare candidates for the allocation recommender. The base unit of every
/// allocation is `systems[0].b[0]` with the copula parameter of `systems[0]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoolSpec {
    pub candidates: Vec<f64>,
    pub slots: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub structure: StructureSpec,
    pub copula: String,
    pub systems: Vec<SystemSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_range: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theorem: Option<TheoremSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pool: Option<PoolSpec>,
}

impl Scenario {
    /// Parses and validates a scenario.
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Scenario(format!(
                "unsupported schema_version {}, expected {SCHEMA_VERSION}",
                self.schema_version
            )));
        }
        if self.systems.is_empty() {
            return Err(Error::Scenario("at least one system is required".into()));
        }
        self.lifetime_family()?;
        self.copula_family()?;
        self.coherent_structure()?;
        for i in 0..self.systems.len() {
            self.build_system(i)?;
        }
        if let Some([lo, hi]) = self.theta_range {
            if !(lo <= hi) {
                return Err(Error::Scenario(format!("theta_range [{lo}, {hi}] is empty")));
            }
            let family = self.copula_family()?;
            family.check_theta(lo)?;
            family.check_theta(hi)?;
        }
        self.grid()?;
        if let Some(pool) = &self.pool {
            if pool.slots > pool.candidates.len() {
                return Err(Error::Scenario(format!(
                    "pool has {} candidates for {} slots",
                    pool.candidates.len(),
                    pool.slots
                )));
            }
        }
        Ok(())
    }

    pub fn lifetime_family(&self) -> Result<LifetimeFamily> {
        LifetimeFamily::from_token(&self.family, self.alpha)
    }

    pub fn copula_family(&self) -> Result<CopulaFamily> {
        CopulaFamily::from_token(&self.copula)
    }

    pub fn coherent_structure(&self) -> Result<CoherentStructure> {
        self.structure.build()
    }

    pub fn grid(&self) -> Result<EvalGrid> {
        let g = self.grid.clone().unwrap_or_default();
        EvalGrid::uniform_y(g.points, g.y_min, g.y_max)
    }

    /// Interval for conditions quantified over θ: the stated range, widened
    /// to contain every θ used by the systems.
    pub fn theta_interval(&self) -> [f64; 2] {
        let thetas = self.systems.iter().flat_map(|s| s.theta.values());
        let (lo, hi) = thetas.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| (lo.min(t), hi.max(t)));
        match self.theta_range {
            Some([a, b]) => [a.min(lo), b.max(hi)],
            None => [lo, hi],
        }
    }

    pub fn system(&self, i: usize) -> Result<&SystemSpec> {
        self.systems
            .get(i)
            .ok_or_else(|| Error::Shape(format!("scenario has {} systems, system {i} requested", self.systems.len())))
    }

    pub fn build_system(&self, i: usize) -> Result<RedundantSystem> {
        let spec = self.system(i)?;
        build(
            spec,
            &self.coherent_structure()?,
            self.copula_family()?,
            self.lifetime_family()?,
        )
    }
}

/// Builds one system from its spec and the shared model pieces.
pub fn build(
    spec: &SystemSpec,
    structure: &CoherentStructure,
    copula: CopulaFamily,
    family: LifetimeFamily,
) -> Result<RedundantSystem> {
    if spec.b.is_empty() {
        return Err(Error::Scenario("a system needs at least one b value".into()));
    }
    match spec.level {
        Level::Component => {
            let theta = match &spec.theta {
                ThetaSpec::Scalar(t) => *t,
                ThetaSpec::PerSubsystem(v) if v.len() == 1 => v[0],
                ThetaSpec::PerSubsystem(v) => {
                    return Err(Error::Scenario(format!(
                        "component-level systems take one theta, got {}",
                        v.len()
                    )))
                }
            };
            let d = Distortion::new(structure, copula, theta)?;
            Ok(RedundantSystem::Component(ComponentLevelSystem::new(d, family, spec.b.clone())?))
        }
        Level::System => Ok(RedundantSystem::System(SystemLevelSystem::new(
            structure.clone(),
            copula,
            spec.thetas(),
            family,
            spec.b.clone(),
        )?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"{
        "schema_version": 1,
        "family": "lomax",
        "structure": {"k_of_n": [3, 4]},
        "copula": "gumbel",
        "systems": [
            {"level": "component", "b": [1.2, 0.5, 0.4, 0.2], "theta": 20},
            {"level": "system", "b": [1.0, 0.5], "theta": [20, 25]}
        ],
        "theta_range": [15, 30]
    }"#;

    #[test]
    fn parse_and_round_trip() {
        let s = Scenario::from_json(SAMPLE).unwrap();
        assert_eq!(s.systems[1].thetas(), vec![20.0, 25.0]);
        assert_eq!(s.theta_interval(), [15.0, 30.0]);
        let again = Scenario::from_json(&s.to_json()).unwrap();
        assert_eq!(s, again);
        assert!(matches!(s.build_system(0).unwrap(), RedundantSystem::Component(_)));
        assert!(matches!(s.build_system(1).unwrap(), RedundantSystem::System(_)));
    }

    #[test]
    fn rejects_bad_input() {
        let unknown = SAMPLE.replace("\"copula\"", "\"colour\": 1, \"copula\"");
        assert!(matches!(Scenario::from_json(&unknown), Err(Error::Scenario(_))));
        let version = SAMPLE.replace("\"schema_version\": 1", "\"schema_version\": 7");
        assert!(matches!(Scenario::from_json(&version), Err(Error::Scenario(_))));
        let theta = SAMPLE.replace("\"theta\": [20, 25]", "\"theta\": [20, 25, 30]");
        assert!(matches!(Scenario::from_json(&theta), Err(Error::LengthMismatch { .. })));
        let gumbel = SAMPLE.replace("\"theta\": 20", "\"theta\": 0.5");
        assert!(matches!(Scenario::from_json(&gumbel), Err(Error::Parameter(_))));
        let family = SAMPLE.replace("lomax", "gamma");
        assert!(matches!(Scenario::from_json(&family), Err(Error::Parameter(_))));
    }

    #[test]
    fn path_sets_structure() {
        let s = SAMPLE.replace("{\"k_of_n\": [3, 4]}", "{\"path_sets\": [[1], [2, 3, 4]]}");
        let s = Scenario::from_json(&s).unwrap();
        assert_eq!(s.coherent_structure().unwrap().n(), 4);
    }
}
