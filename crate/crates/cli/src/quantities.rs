//! Dotted parameter paths for sweeps and the vocabulary of recordable
//! quantities.

use exclusion_core::analysis::{
    self, coexistence_equilibria, delta_thresholds, invasion_numbers_delta, r0_bare,
    reproduction_numbers_two,
};
use exclusion_core::model::{IdeologyParams, ModelParams};

use crate::CliError;

/// A settable scalar parameter, resolved from a dotted path such as
/// `delta`, `lambda` or `ideology2.beta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamPath {
    Lambda,
    Mu,
    Delta,
    Ideology(usize, IdeologyField),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdeologyField {
    Beta,
    DE,
    DR,
    CE,
    CR,
    QE,
}

impl ParamPath {
    pub fn parse(path: &str, params: &ModelParams) -> Result<Self, CliError> {
        let resolved = match path {
            "lambda" => ParamPath::Lambda,
            "mu" => ParamPath::Mu,
            "delta" => ParamPath::Delta,
            other => match other.split_once('.') {
                Some((block, field)) => {
                    let idx = match block {
                        "ideology1" => 0,
                        "ideology2" => 1,
                        _ => {
                            return Err(CliError::Validation(format!(
                                "unknown parameter path {path:?}"
                            )))
                        }
                    };
                    let field = match field {
                        "beta" => IdeologyField::Beta,
                        "d_e" => IdeologyField::DE,
                        "d_r" => IdeologyField::DR,
                        "c_e" => IdeologyField::CE,
                        "c_r" => IdeologyField::CR,
                        "q_e" => IdeologyField::QE,
                        _ => {
                            return Err(CliError::Validation(format!(
                                "unknown parameter path {path:?}"
                            )))
                        }
                    };
                    ParamPath::Ideology(idx, field)
                }
                None => {
                    return Err(CliError::Validation(format!(
                        "unknown parameter path {path:?}"
                    )))
                }
            },
        };
        match resolved {
            ParamPath::Delta | ParamPath::Ideology(1, _) if !params.is_two_ideology() => {
                Err(CliError::Validation(format!(
                    "parameter path {path:?} requires a two-ideology scenario"
                )))
            }
            ok => Ok(ok),
        }
    }

    /// New parameter set with this path set to `value`; re-validated.
    pub fn apply(&self, params: &ModelParams, value: f64) -> Result<ModelParams, String> {
        let mut p = *params;
        match self {
            ParamPath::Lambda => p.lambda = value,
            ParamPath::Mu => p.mu = value,
            ParamPath::Delta => p.delta = value,
            ParamPath::Ideology(idx, field) => {
                let block: &mut IdeologyParams = if *idx == 0 {
                    &mut p.ideology1
                } else {
                    p.ideology2.as_mut().expect("checked at parse time")
                };
                match field {
                    IdeologyField::Beta => block.beta = value,
                    IdeologyField::DE => block.d_e = value,
                    IdeologyField::DR => block.d_r = value,
                    IdeologyField::CE => block.c_e = value,
                    IdeologyField::CR => block.c_r = value,
                    IdeologyField::QE => block.q_e = value,
                }
            }
        }
        p.validate().map_err(|e| e.to_string())?;
        Ok(p)
    }
}

/// Scalar quantities a sweep can record per grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    R0,
    R1,
    R2,
    I1Delta,
    I2Delta,
    DeltaStar,
    DeltaStarStar,
    Sigma,
    XStarPresent,
    XStarStarPresent,
    CoexistencePresent,
}

impl Quantity {
    pub const ALL_NAMES: &'static [&'static str] = &[
        "r0",
        "r1",
        "r2",
        "i1_delta",
        "i2_delta",
        "delta_star",
        "delta_star_star",
        "sigma",
        "xstar_present",
        "xstarstar_present",
        "coexistence_present",
    ];

    pub fn parse(name: &str) -> Result<Self, CliError> {
        Ok(match name {
            "r0" => Quantity::R0,
            "r1" => Quantity::R1,
            "r2" => Quantity::R2,
            "i1_delta" => Quantity::I1Delta,
            "i2_delta" => Quantity::I2Delta,
            "delta_star" => Quantity::DeltaStar,
            "delta_star_star" => Quantity::DeltaStarStar,
            "sigma" => Quantity::Sigma,
            "xstar_present" => Quantity::XStarPresent,
            "xstarstar_present" => Quantity::XStarStarPresent,
            "coexistence_present" => Quantity::CoexistencePresent,
            other => {
                return Err(CliError::Validation(format!(
                    "unknown quantity {other:?}; expected one of {}",
                    Self::ALL_NAMES.join(", ")
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Quantity::R0 => "r0",
            Quantity::R1 => "r1",
            Quantity::R2 => "r2",
            Quantity::I1Delta => "i1_delta",
            Quantity::I2Delta => "i2_delta",
            Quantity::DeltaStar => "delta_star",
            Quantity::DeltaStarStar => "delta_star_star",
            Quantity::Sigma => "sigma",
            Quantity::XStarPresent => "xstar_present",
            Quantity::XStarStarPresent => "xstarstar_present",
            Quantity::CoexistencePresent => "coexistence_present",
        }
    }

    /// Evaluate at one parameter set. `Ok(None)` means undefined there;
    /// `Err` carries a warning for the per-point failure summary.
    pub fn evaluate(&self, p: &ModelParams) -> Result<Option<f64>, String> {
        let two = p.is_two_ideology();
        Ok(match self {
            Quantity::R0 => (!two).then(|| r0_bare(p)),
            Quantity::R1 => two.then(|| reproduction_numbers_two(p).0),
            Quantity::R2 => two.then(|| reproduction_numbers_two(p).1),
            Quantity::I1Delta => two.then(|| invasion_numbers_delta(p).i1).flatten(),
            Quantity::I2Delta => two.then(|| invasion_numbers_delta(p).i2).flatten(),
            Quantity::DeltaStar => two
                .then(|| delta_thresholds(p).delta_star.value())
                .flatten(),
            Quantity::DeltaStarStar => two
                .then(|| delta_thresholds(p).delta_star_star.value())
                .flatten(),
            Quantity::Sigma => two.then(|| delta_thresholds(p).sigma).flatten(),
            Quantity::XStarPresent => Some(presence(
                analysis::endemic_state(p.lambda, p.mu, &p.ideology1).is_some(),
            )),
            Quantity::XStarStarPresent => {
                if !two {
                    None
                } else {
                    Some(presence(
                        analysis::endemic_state(p.lambda, p.mu, p.second()).is_some(),
                    ))
                }
            }
            Quantity::CoexistencePresent => {
                if !two {
                    None
                } else {
                    let roots = coexistence_equilibria(p).map_err(|e| e.to_string())?;
                    Some(presence(!roots.is_empty()))
                }
            }
        })
    }
}

fn presence(yes: bool) -> f64 {
    if yes {
        1.0
    } else {
        0.0
    }
}

pub fn parse_record_list(list: &str) -> Result<Vec<Quantity>, CliError> {
    let names: Vec<&str> = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if names.is_empty() {
        return Err(CliError::Validation(
            "record list must name at least one quantity".into(),
        ));
    }
    names.into_iter().map(Quantity::parse).collect()
}
