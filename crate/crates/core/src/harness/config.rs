//! Sectioned TOML configuration for a closed-loop run.
//!
//! Every key is optional; anything missing takes the reference-scenario
//! default. Unknown keys are rejected so typos do not silently fall back.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cftoc::{InputBounds, SolverOptions, Weights};
use crate::controller::SimConfig;
use crate::error::{Error, Result};
use crate::estimator::EstimatorInit;
use crate::model::{PhysicalParams, State};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioSection {
    pub mass: f64,
    pub drag_linear: f64,
    pub inertia: f64,
    pub drag_angular: f64,
    pub dt: f64,
    #[serde(rename = "total_steps_M")]
    pub total_steps: i64,
    #[serde(rename = "horizon_N")]
    pub horizon: i64,
    pub x_init: [f64; 5],
    pub x_goal: [f64; 5],
    pub adaptive: bool,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        Self::from(&SimConfig::default())
    }
}

impl From<&SimConfig> for ScenarioSection {
    fn from(cfg: &SimConfig) -> Self {
        Self {
            mass: cfg.true_params.mass,
            drag_linear: cfg.true_params.drag_linear,
            inertia: cfg.true_params.inertia,
            drag_angular: cfg.true_params.drag_angular,
            dt: cfg.dt,
            total_steps: cfg.total_steps as i64,
            horizon: cfg.horizon as i64,
            x_init: cfg.x_init.to_array(),
            x_goal: cfg.x_goal.to_array(),
            adaptive: cfg.adaptive,
        }
    }
}

/// On-disk layout of a config file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfigFile {
    pub scenario: ScenarioSection,
    pub weights: Weights,
    pub bounds: InputBounds,
    pub solver: SolverOptions,
    pub estimator: EstimatorInit,
}

impl From<&SimConfig> for ConfigFile {
    fn from(cfg: &SimConfig) -> Self {
        Self {
            scenario: ScenarioSection::from(cfg),
            weights: cfg.weights,
            bounds: cfg.bounds,
            solver: cfg.solver,
            estimator: cfg.estimator,
        }
    }
}

fn invalid(field: &str, reason: impl Into<String>) -> Error {
    Error::ConfigInvalid {
        field: field.to_string(),
        reason: reason.into(),
    }
}

fn count(field: &str, value: i64) -> Result<usize> {
    if value < 1 {
        return Err(invalid(field, format!("must be at least 1, got {value}")));
    }
    Ok(value as usize)
}

impl ConfigFile {
    pub fn into_sim_config(self) -> Result<SimConfig> {
        let s = self.scenario;
        let cfg = SimConfig {
            true_params: PhysicalParams::new(s.mass, s.drag_linear, s.inertia, s.drag_angular),
            dt: s.dt,
            total_steps: count("scenario.total_steps_M", s.total_steps)?,
            horizon: count("scenario.horizon_N", s.horizon)?,
            x_init: State::from_array(s.x_init),
            x_goal: State::from_array(s.x_goal),
            weights: self.weights,
            bounds: self.bounds,
            estimator: self.estimator,
            solver: self.solver,
            adaptive: s.adaptive,
        };
        cfg.validate().map_err(|e| match e {
            Error::InvalidParameter { field, reason } => invalid(qualified(field), reason),
            Error::NonFinite(what) => invalid(qualified_non_finite(what), "must be finite"),
            other => other,
        })?;
        Ok(cfg)
    }
}

fn qualified(field: &str) -> &'static str {
    match field {
        "mass" => "scenario.mass",
        "drag_linear" => "scenario.drag_linear",
        "inertia" => "scenario.inertia",
        "drag_angular" => "scenario.drag_angular",
        "dt" => "scenario.dt",
        "total_steps_M" => "scenario.total_steps_M",
        "horizon_N" | "horizon" => "scenario.horizon_N",
        "gamma" => "estimator.gamma",
        "weights" => "weights",
        "bounds.thrust" => "bounds.thrust",
        "bounds.moment" => "bounds.moment",
        "solver" => "solver",
        _ => "config",
    }
}

fn qualified_non_finite(what: &str) -> &'static str {
    match what {
        "initial state" => "scenario.x_init",
        "goal state" | "reference state" => "scenario.x_goal",
        "initial estimate" => "estimator",
        _ => "config",
    }
}

/// Parses config text; `origin` names the source in error messages.
pub fn parse_config(text: &str, origin: &str) -> Result<SimConfig> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| Error::ConfigParse {
        path: origin.to_string(),
        message: e.to_string(),
    })?;
    file.into_sim_config()
}

pub fn load_config(path: impl AsRef<Path>) -> Result<SimConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, &path.display().to_string())
}

pub fn to_toml(cfg: &SimConfig) -> String {
    toml::to_string(&ConfigFile::from(cfg)).expect("config is always representable as TOML")
}
