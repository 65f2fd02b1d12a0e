//! Parameters, states, right-hand sides and analytical Jacobians for the
//! one- and two-ideology radicalization models.
//!
//! The bare model tracks susceptibles `S`, extremists `E` and recruiters
//! `R`. Susceptibles flow in at rate `lambda` and die at per-capita rate
//! `mu`; recruitment is mass-action `beta * S * R` split between the two
//! adopter classes by `q_e` / `q_r`; adopters switch classes at rates
//! `c_e`, `c_r` and carry extra removal rates `d_e`, `d_r`. The
//! two-ideology model duplicates the adopter classes and couples them
//! only through `S`, plus an optional one-way conversion `delta * E1 * E2`
//! from extremists of ideology one to ideology two.

use serde::Serialize;
use thiserror::Error;

use crate::linalg::Matrix;

/// Rates and fractions describing a single ideology.
///
/// `q_r` is not stored: it is always `1 - q_e`, so the pair sums to one
/// exactly. All rate fields must be strictly positive; `q_e` may take the
/// boundary values 0 and 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdeologyParams {
    /// Mass-action transmission coefficient (1/(population * time)).
    pub beta: f64,
    /// Extra removal rate of extremists (1/time).
    pub d_e: f64,
    /// Extra removal rate of recruiters (1/time).
    pub d_r: f64,
    /// Extremist -> recruiter switch rate (1/time).
    pub c_e: f64,
    /// Recruiter -> extremist switch rate (1/time).
    pub c_r: f64,
    /// Fraction of new recruits entering the extremist class.
    pub q_e: f64,
}

impl IdeologyParams {
    /// Fraction of new recruits entering the recruiter class.
    pub fn q_r(&self) -> f64 {
        1.0 - self.q_e
    }

    fn collect_offenses(&self, prefix: &str, out: &mut Vec<FieldError>) {
        let mut rate = |name: &str, v: f64| {
            if !(v > 0.0) || !v.is_finite() {
                out.push(FieldError::new(
                    format!("{prefix}{name}"),
                    format!("must be strictly positive and finite (got {v})"),
                ));
            }
        };
        rate("beta", self.beta);
        rate("d_e", self.d_e);
        rate("d_r", self.d_r);
        rate("c_e", self.c_e);
        rate("c_r", self.c_r);
        if !(0.0..=1.0).contains(&self.q_e) {
            out.push(FieldError::new(
                format!("{prefix}q_e"),
                format!("must lie in [0, 1] (got {})", self.q_e),
            ));
        }
    }
}

/// One offending field inside a [`ValidationError`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl FieldError {
    fn new(field: String, message: String) -> Self {
        Self { field, message }
    }
}

/// Parameter validation failure listing every offending field.
#[derive(Debug, Clone, Error, Serialize)]
#[error("invalid parameters: {}", self.describe())]
pub struct ValidationError {
    pub offenses: Vec<FieldError>,
}

impl ValidationError {
    fn describe(&self) -> String {
        self.offenses
            .iter()
            .map(|o| format!("{}: {}", o.field, o.message))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// Full parameter set for one model instance.
///
/// `ideology2` absent means the bare three-compartment model; present
/// with `delta = 0` is the pure competition model and `delta > 0` adds
/// the one-way extremist conversion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    /// Susceptible inflow (population/time).
    pub lambda: f64,
    /// Natural per-capita death rate (1/time).
    pub mu: f64,
    pub ideology1: IdeologyParams,
    pub ideology2: Option<IdeologyParams>,
    /// Extremist conversion rate ideology 1 -> 2 (1/(population * time)).
    /// Always zero when `ideology2` is absent.
    pub delta: f64,
}

impl ModelParams {
    /// Validated bare-model parameters.
    pub fn bare(
        lambda: f64,
        mu: f64,
        ideology1: IdeologyParams,
    ) -> Result<Self, ValidationError> {
        let p = Self {
            lambda,
            mu,
            ideology1,
            ideology2: None,
            delta: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Validated two-ideology parameters with cross-interaction `delta`.
    pub fn two_ideology(
        lambda: f64,
        mu: f64,
        ideology1: IdeologyParams,
        ideology2: IdeologyParams,
        delta: f64,
    ) -> Result<Self, ValidationError> {
        let p = Self {
            lambda,
            mu,
            ideology1,
            ideology2: Some(ideology2),
            delta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        let mut offenses = Vec::new();
        let mut positive = |name: &str, v: f64| {
            if !(v > 0.0) || !v.is_finite() {
                offenses.push(FieldError::new(
                    name.to_string(),
                    format!("must be strictly positive and finite (got {v})"),
                ));
            }
        };
        positive("lambda", self.lambda);
        positive("mu", self.mu);
        self.ideology1.collect_offenses("ideology1.", &mut offenses);
        if let Some(i2) = &self.ideology2 {
            i2.collect_offenses("ideology2.", &mut offenses);
            if !(self.delta >= 0.0) || !self.delta.is_finite() {
                offenses.push(FieldError::new(
                    "delta".to_string(),
                    format!("must be finite and >= 0 (got {})", self.delta),
                ));
            }
        } else if self.delta != 0.0 {
            offenses.push(FieldError::new(
                "delta".to_string(),
                "requires ideology2".to_string(),
            ));
        }
        if offenses.is_empty() {
            Ok(())
        } else {
            Err(ValidationError { offenses })
        }
    }

    pub fn is_two_ideology(&self) -> bool {
        self.ideology2.is_some()
    }

    /// Susceptible level of the ideology-free equilibrium, `lambda / mu`.
    /// Also the ceiling of the invariant region for the total population.
    pub fn s0(&self) -> f64 {
        self.lambda / self.mu
    }

    /// Second ideology parameters; panics on bare-model parameters.
    pub fn second(&self) -> &IdeologyParams {
        self.ideology2
            .as_ref()
            .expect("two-ideology parameters required")
    }
}

/// Compartment populations, tagged by model dimension.
///
/// Layouts: bare `(S, E, R)`, two-ideology `(S, E1, R1, E2, R2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum State {
    Bare([f64; 3]),
    Two([f64; 5]),
}

impl State {
    pub fn components(&self) -> &[f64] {
        match self {
            State::Bare(x) => x,
            State::Two(x) => x,
        }
    }

    pub fn dim(&self) -> usize {
        self.components().len()
    }

    /// Total population `T`.
    pub fn total(&self) -> f64 {
        self.components().iter().sum()
    }

    /// All components nonnegative.
    pub fn is_admissible(&self) -> bool {
        self.components().iter().all(|&c| c >= 0.0)
    }

    pub fn as_bare(&self) -> Option<&[f64; 3]> {
        match self {
            State::Bare(x) => Some(x),
            State::Two(_) => None,
        }
    }

    pub fn as_two(&self) -> Option<&[f64; 5]> {
        match self {
            State::Two(x) => Some(x),
            State::Bare(_) => None,
        }
    }
}

/// Combinations of rates that recur in every closed form: `c_tilde`,
/// the transfer-matrix determinant `big_d`, and their ratio scaled by
/// the transmission coefficient, `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedQuantities {
    /// c_e + q_r * (mu + d_e)  (1/time)
    pub c_tilde: f64,
    /// (mu + d_r + c_r)(mu + d_e + c_e) - c_e * c_r  (1/time^2), always > 0
    pub big_d: f64,
    /// beta * c_tilde / big_d  (1/population)
    pub gamma: f64,
}

/// Evaluate the derived rate combinations for one ideology.
pub fn derived_quantities(ip: &IdeologyParams, mu: f64) -> DerivedQuantities {
    let c_tilde = ip.c_e + ip.q_r() * (mu + ip.d_e);
    let big_d = (mu + ip.d_r + ip.c_r) * (mu + ip.d_e + ip.c_e) - ip.c_e * ip.c_r;
    DerivedQuantities {
        c_tilde,
        big_d,
        gamma: ip.beta * c_tilde / big_d,
    }
}

/// Right-hand side of the bare model at `x = (S, E, R)`.
///
/// Total on finite inputs; negative components are tolerated so adaptive
/// integrators may probe slightly outside the orthant.
pub fn rhs_bare(p: &ModelParams, x: &[f64; 3]) -> [f64; 3] {
    let i = &p.ideology1;
    let [s, e, r] = *x;
    let recruit = i.beta * s * r;
    [
        p.lambda - p.mu * s - recruit,
        i.q_e * recruit - (p.mu + i.d_e + i.c_e) * e + i.c_r * r,
        i.q_r() * recruit + i.c_e * e - (p.mu + i.d_r + i.c_r) * r,
    ]
}

/// Right-hand side of the two-ideology model at `x = (S, E1, R1, E2, R2)`.
///
/// With `delta = 0` the two adopter blocks interact only through `S`;
/// `delta > 0` moves extremists from ideology one to ideology two at rate
/// `delta * E1 * E2` and changes nothing else.
pub fn rhs_two(p: &ModelParams, x: &[f64; 5]) -> [f64; 5] {
    let i1 = &p.ideology1;
    let i2 = p.second();
    let [s, e1, r1, e2, r2] = *x;
    let recruit1 = i1.beta * s * r1;
    let recruit2 = i2.beta * s * r2;
    let conversion = p.delta * e1 * e2;
    [
        p.lambda - p.mu * s - recruit1 - recruit2,
        i1.q_e * recruit1 - (p.mu + i1.d_e + i1.c_e) * e1 + i1.c_r * r1 - conversion,
        i1.q_r() * recruit1 + i1.c_e * e1 - (p.mu + i1.d_r + i1.c_r) * r1,
        i2.q_e * recruit2 - (p.mu + i2.d_e + i2.c_e) * e2 + i2.c_r * r2 + conversion,
        i2.q_r() * recruit2 + i2.c_e * e2 - (p.mu + i2.d_r + i2.c_r) * r2,
    ]
}

/// RHS of whichever model matches the state's dimension.
pub fn rhs(p: &ModelParams, x: &State) -> State {
    match x {
        State::Bare(x) => State::Bare(rhs_bare(p, x)),
        State::Two(x) => State::Two(rhs_two(p, x)),
    }
}

/// Max-norm of the RHS; the residual used to accept equilibria.
pub fn residual(p: &ModelParams, x: &State) -> f64 {
    let f = rhs(p, x);
    f.components().iter().fold(0.0_f64, |m, c| m.max(c.abs()))
}

/// Analytical Jacobian of [`rhs_bare`].
pub fn jacobian_bare(p: &ModelParams, x: &[f64; 3]) -> Matrix<3> {
    let i = &p.ideology1;
    let [s, _e, r] = *x;
    let a = p.mu + i.d_e + i.c_e;
    let b = p.mu + i.d_r + i.c_r;
    Matrix::new([
        [-p.mu - i.beta * r, 0.0, -i.beta * s],
        [i.q_e * i.beta * r, -a, i.q_e * i.beta * s + i.c_r],
        [i.q_r() * i.beta * r, i.c_e, i.q_r() * i.beta * s - b],
    ])
}

/// Analytical Jacobian of [`rhs_two`].
pub fn jacobian_two(p: &ModelParams, x: &[f64; 5]) -> Matrix<5> {
    let i1 = &p.ideology1;
    let i2 = p.second();
    let [s, e1, _r1, e2, _r2] = *x;
    let a1 = p.mu + i1.d_e + i1.c_e;
    let b1 = p.mu + i1.d_r + i1.c_r;
    let a2 = p.mu + i2.d_e + i2.c_e;
    let b2 = p.mu + i2.d_r + i2.c_r;
    let (r1, r2) = (x[2], x[4]);
    Matrix::new([
        [
            -p.mu - i1.beta * r1 - i2.beta * r2,
            0.0,
            -i1.beta * s,
            0.0,
            -i2.beta * s,
        ],
        [
            i1.q_e * i1.beta * r1,
            -a1 - p.delta * e2,
            i1.q_e * i1.beta * s + i1.c_r,
            -p.delta * e1,
            0.0,
        ],
        [
            i1.q_r() * i1.beta * r1,
            i1.c_e,
            i1.q_r() * i1.beta * s - b1,
            0.0,
            0.0,
        ],
        [
            i2.q_e * i2.beta * r2,
            p.delta * e2,
            0.0,
            -a2 + p.delta * e1,
            i2.q_e * i2.beta * s + i2.c_r,
        ],
        [
            i2.q_r() * i2.beta * r2,
            0.0,
            0.0,
            i2.c_e,
            i2.q_r() * i2.beta * s - b2,
        ],
    ])
}
