//! Scenario files: the JSON schema, strict validation, and defaults.
//!
//! Unknown keys are rejected outright so a typo in a rate name fails the
//! run instead of silently corrupting a study. `q_r` is never a file key;
//! it is derived from `q_e`.

use std::path::Path;

use serde::Deserialize;

use exclusion_core::integrator::IntegratorConfig;
use exclusion_core::model::{IdeologyParams, ModelParams, State};

use crate::CliError;

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKindField {
    BareBones,
    TwoIdeology,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IdeologyFile {
    beta: f64,
    d_e: f64,
    d_r: f64,
    c_e: f64,
    c_r: f64,
    q_e: f64,
}

impl IdeologyFile {
    fn into_params(self) -> IdeologyParams {
        IdeologyParams {
            beta: self.beta,
            d_e: self.d_e,
            d_r: self.d_r,
            c_e: self.c_e,
            c_r: self.c_r,
            q_e: self.q_e,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IntegratorFile {
    #[serde(default)]
    rtol: Option<f64>,
    #[serde(default)]
    atol: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    model: ModelKindField,
    lambda: f64,
    mu: f64,
    ideology1: IdeologyFile,
    #[serde(default)]
    ideology2: Option<IdeologyFile>,
    #[serde(default)]
    delta: Option<f64>,
    #[serde(default)]
    initial: Option<Vec<f64>>,
    #[serde(default)]
    integrator: Option<IntegratorFile>,
    #[serde(default)]
    seed: Option<u64>,
}

/// A validated scenario ready to run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub params: ModelParams,
    pub initial: State,
    pub config: IntegratorConfig,
    pub seed: u64,
}

/// Fraction of `lambda/mu` used to seed each adopter compartment when no
/// initial state is given: a small introduction into an almost fully
/// susceptible population.
const DEFAULT_SEEDING: f64 = 1e-3;

pub fn load(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path)?;
    let file: ScenarioFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    build(file)
}

fn build(file: ScenarioFile) -> Result<Scenario, CliError> {
    let params = match file.model {
        ModelKindField::BareBones => {
            if file.ideology2.is_some() {
                return Err(CliError::Validation(
                    "ideology2: not allowed for model \"bare_bones\"".into(),
                ));
            }
            if file.delta.is_some() {
                return Err(CliError::Validation(
                    "delta: not allowed for model \"bare_bones\"".into(),
                ));
            }
            ModelParams::bare(file.lambda, file.mu, file.ideology1.into_params())
        }
        ModelKindField::TwoIdeology => {
            let second = file.ideology2.ok_or_else(|| {
                CliError::Validation("ideology2: required for model \"two_ideology\"".into())
            })?;
            ModelParams::two_ideology(
                file.lambda,
                file.mu,
                file.ideology1.into_params(),
                second.into_params(),
                file.delta.unwrap_or(0.0),
            )
        }
    }
    .map_err(|e| CliError::Validation(e.to_string()))?;

    let dim = if params.is_two_ideology() { 5 } else { 3 };
    let initial = match file.initial {
        None => default_initial(&params),
        Some(values) => {
            if values.len() != dim {
                return Err(CliError::Validation(format!(
                    "initial: expected {dim} components, got {}",
                    values.len()
                )));
            }
            if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(CliError::Validation(
                    "initial: components must be finite and nonnegative".into(),
                ));
            }
            if dim == 3 {
                State::Bare([values[0], values[1], values[2]])
            } else {
                State::Two([values[0], values[1], values[2], values[3], values[4]])
            }
        }
    };

    let mut config = IntegratorConfig::default();
    if let Some(i) = file.integrator {
        if let Some(rtol) = i.rtol {
            if !(rtol > 0.0) {
                return Err(CliError::Validation("integrator.rtol: must be positive".into()));
            }
            config.rtol = rtol;
        }
        if let Some(atol) = i.atol {
            if !(atol > 0.0) {
                return Err(CliError::Validation("integrator.atol: must be positive".into()));
            }
            config.atol = atol;
        }
    }

    Ok(Scenario {
        params,
        initial,
        config,
        seed: file.seed.unwrap_or(0),
    })
}

/// Default start: the ideology-free susceptible level with a small
/// seeding of every adopter compartment.
pub fn default_initial(params: &ModelParams) -> State {
    let s0 = params.s0();
    let seed = DEFAULT_SEEDING * s0;
    if params.is_two_ideology() {
        State::Two([s0, seed, seed, seed, seed])
    } else {
        State::Bare([s0, seed, seed])
    }
}
