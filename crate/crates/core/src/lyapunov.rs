//! Lyapunov functions for the three models and a sampled monotone-decrease
//! check along integrated trajectories.
//!
//! Every function is built from the convex barrier `g(x) = x - 1 - ln x`
//! and/or weighted linear terms in the adopter compartments. Each one
//! vanishes at its anchor equilibrium and is positive on the rest of its
//! admissible domain, and is nonincreasing along solutions whenever the
//! corresponding stability theorem's hypotheses hold; the decrease is
//! verified here discretely on dense trajectory samples rather than by
//! re-deriving the dissipation identities.

use serde::Serialize;
use thiserror::Error;

use crate::analysis::endemic_state;
use crate::integrator::Trajectory;
use crate::linalg::{solve_linear, Matrix};
use crate::model::{derived_quantities, IdeologyParams, ModelParams, State};

/// Per-step tolerance for the sampled decrease check; absorbs integrator
/// local error at the default tolerances.
pub const DECREASE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum LyapunovError {
    #[error("g requires a strictly positive argument (got {0})")]
    DomainError(f64),
    #[error("weight conditions are singular for this anchor")]
    DegenerateWeights,
    #[error("anchor is not an endemic equilibrium with positive components")]
    AnchorNotEndemic,
}

/// x - 1 - ln x: zero at one, positive elsewhere, convex.
pub fn g(x: f64) -> Result<f64, LyapunovError> {
    if x <= 0.0 {
        return Err(LyapunovError::DomainError(x));
    }
    Ok(x - 1.0 - x.ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ModelKind {
    Bare,
    TwoIdeology,
    Cross,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FunctionKind {
    /// Anchored at the ideology-free equilibrium.
    IdeologyFree,
    /// Anchored at an endemic/dominance equilibrium; carries weights (A, B).
    Endemic,
}

/// Which ideology persists at the anchor of an endemic certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Dominant {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, Serialize)]
enum Term {
    /// coef * x[idx]
    Linear { idx: usize, coef: f64 },
    /// outer * g(x[idx] / anchor)
    Anchored { idx: usize, outer: f64, anchor: f64 },
}

/// One concrete Lyapunov function: model, kind, anchor, weights, and the
/// evaluation plan.
#[derive(Debug, Clone, Serialize)]
pub struct LyapunovSpec {
    pub model: ModelKind,
    pub kind: FunctionKind,
    pub anchor: State,
    /// (A, B) for endemic certificates.
    pub weights: Option<(f64, f64)>,
    terms: Vec<Term>,
}

/// Weighted linear adopter terms `(c_e/c~) E + ((mu+d_e+c_e)/c~) R`.
fn adopter_pair(ip: &IdeologyParams, mu: f64, e_idx: usize, r_idx: usize) -> [Term; 2] {
    let d = derived_quantities(ip, mu);
    [
        Term::Linear {
            idx: e_idx,
            coef: ip.c_e / d.c_tilde,
        },
        Term::Linear {
            idx: r_idx,
            coef: (mu + ip.d_e + ip.c_e) / d.c_tilde,
        },
    ]
}

fn anchored(idx: usize, outer: f64, anchor: f64) -> Term {
    Term::Anchored { idx, outer, anchor }
}

impl LyapunovSpec {
    /// Bare-model certificate for the ideology-free equilibrium:
    /// `S0 g(S/S0) + (c_e/c~) E + ((mu+d_e+c_e)/c~) R`.
    pub fn bare_ideology_free(p: &ModelParams) -> Self {
        let s0 = p.s0();
        let mut terms = vec![anchored(0, s0, s0)];
        terms.extend(adopter_pair(&p.ideology1, p.mu, 1, 2));
        Self {
            model: ModelKind::Bare,
            kind: FunctionKind::IdeologyFree,
            anchor: State::Bare([s0, 0.0, 0.0]),
            weights: None,
            terms,
        }
    }

    /// Bare-model certificate for the endemic equilibrium:
    /// `S* g(S/S*) + A E* g(E/E*) + B R* g(R/R*)` with solved weights.
    pub fn bare_endemic(p: &ModelParams) -> Result<Self, LyapunovError> {
        let x = endemic_state(p.lambda, p.mu, &p.ideology1).ok_or(LyapunovError::AnchorNotEndemic)?;
        let anchor = State::Bare(x);
        let (a, b) = solve_weights(p, &anchor)?;
        Ok(Self {
            model: ModelKind::Bare,
            kind: FunctionKind::Endemic,
            anchor,
            weights: Some((a, b)),
            terms: vec![
                anchored(0, x[0], x[0]),
                anchored(1, a * x[1], x[1]),
                anchored(2, b * x[2], x[2]),
            ],
        })
    }

    /// Two-ideology certificate for the ideology-free equilibrium: the
    /// bare form plus the second ideology's weighted adopter terms.
    pub fn two_ideology_free(p: &ModelParams) -> Self {
        let s0 = p.s0();
        let mut terms = vec![anchored(0, s0, s0)];
        terms.extend(adopter_pair(&p.ideology1, p.mu, 1, 2));
        terms.extend(adopter_pair(p.second(), p.mu, 3, 4));
        Self {
            model: ModelKind::TwoIdeology,
            kind: FunctionKind::IdeologyFree,
            anchor: State::Two([s0, 0.0, 0.0, 0.0, 0.0]),
            weights: None,
            terms,
        }
    }

    /// Two-ideology certificate for a dominance equilibrium: anchored
    /// barrier terms on the persisting ideology plus weighted linear
    /// terms on the vanishing one.
    pub fn two_endemic(p: &ModelParams, dominant: Dominant) -> Result<Self, LyapunovError> {
        let (own, own_e, own_r, other, other_e, other_r) = match dominant {
            Dominant::First => (&p.ideology1, 1, 2, p.second(), 3, 4),
            Dominant::Second => (p.second(), 3, 4, &p.ideology1, 1, 2),
        };
        let x3 = endemic_state(p.lambda, p.mu, own).ok_or(LyapunovError::AnchorNotEndemic)?;
        let mut full = [0.0; 5];
        full[0] = x3[0];
        full[own_e] = x3[1];
        full[own_r] = x3[2];
        let anchor = State::Two(full);
        let (a, b) = solve_weights(p, &anchor)?;
        let mut terms = vec![
            anchored(0, x3[0], x3[0]),
            anchored(own_e, a * x3[1], x3[1]),
            anchored(own_r, b * x3[2], x3[2]),
        ];
        terms.extend(adopter_pair(other, p.mu, other_e, other_r));
        Ok(Self {
            model: ModelKind::TwoIdeology,
            kind: FunctionKind::Endemic,
            anchor,
            weights: Some((a, b)),
            terms,
        })
    }

    /// Cross-model certificate for the ideology-free equilibrium:
    /// `E1 + ((mu+d_e1+c_e1)/c_e1) R1 + E2 + ((mu+d_e2+c_e2)/c_e2) R2`.
    /// Purely linear; it vanishes on the whole adopter-free face, which
    /// within the invariant region still certifies the equilibrium.
    pub fn cross_ideology_free(p: &ModelParams) -> Self {
        let i1 = &p.ideology1;
        let i2 = p.second();
        Self {
            model: ModelKind::Cross,
            kind: FunctionKind::IdeologyFree,
            anchor: State::Two([p.s0(), 0.0, 0.0, 0.0, 0.0]),
            weights: None,
            terms: vec![
                Term::Linear { idx: 1, coef: 1.0 },
                Term::Linear {
                    idx: 2,
                    coef: (p.mu + i1.d_e + i1.c_e) / i1.c_e,
                },
                Term::Linear { idx: 3, coef: 1.0 },
                Term::Linear {
                    idx: 4,
                    coef: (p.mu + i2.d_e + i2.c_e) / i2.c_e,
                },
            ],
        }
    }

    /// Cross-model certificate for the ideology-two dominance equilibrium:
    /// the same function as the two-ideology one, valid for `delta > 0`
    /// under the weight condition `c_e2/c~2 < c_e1/c~1`.
    pub fn cross_endemic(p: &ModelParams) -> Result<Self, LyapunovError> {
        let mut spec = Self::two_endemic(p, Dominant::Second)?;
        spec.model = ModelKind::Cross;
        Ok(spec)
    }

    /// Evaluate on a raw component slice (dimension must match the anchor).
    pub fn value_on(&self, x: &[f64]) -> Result<f64, LyapunovError> {
        assert_eq!(
            x.len(),
            self.anchor.dim(),
            "state dimension does not match the certificate"
        );
        let mut total = 0.0;
        for term in &self.terms {
            match *term {
                Term::Linear { idx, coef } => total += coef * x[idx],
                Term::Anchored { idx, outer, anchor } => {
                    total += outer * g(x[idx] / anchor)?;
                }
            }
        }
        Ok(total)
    }
}

/// Evaluate a certificate at a state.
pub fn lyapunov_value(spec: &LyapunovSpec, x: &State) -> Result<f64, LyapunovError> {
    spec.value_on(x.components())
}

/// Solve the weight conditions `A q_e + B q_r = 1` and
/// `B c_e E = A (c_r R + q_e beta S R)` at a dominance anchor.
///
/// The solved pair always agrees with the closed forms `A = c_e/c~`,
/// `B = (mu+d_e+c_e)/c~` because the anchor is an equilibrium.
pub fn solve_weights(p: &ModelParams, anchor: &State) -> Result<(f64, f64), LyapunovError> {
    let (ip, s, e, r) = anchor_block(p, anchor)?;
    let system = Matrix::new([
        [ip.q_e, ip.q_r()],
        [ip.c_r * r + ip.q_e * ip.beta * s * r, -ip.c_e * e],
    ]);
    let solved =
        solve_linear(&system, &[1.0, 0.0]).map_err(|_| LyapunovError::DegenerateWeights)?;
    let (a, b) = (solved[0], solved[1]);
    if !(a > 0.0 && b > 0.0) {
        return Err(LyapunovError::DegenerateWeights);
    }
    Ok((a, b))
}

/// Identify the persisting ideology and its (S, E, R) block at an anchor.
fn anchor_block<'p>(
    p: &'p ModelParams,
    anchor: &State,
) -> Result<(&'p IdeologyParams, f64, f64, f64), LyapunovError> {
    match anchor {
        State::Bare([s, e, r]) => {
            if *e > 0.0 && *r > 0.0 {
                Ok((&p.ideology1, *s, *e, *r))
            } else {
                Err(LyapunovError::AnchorNotEndemic)
            }
        }
        State::Two([s, e1, r1, e2, r2]) => {
            if *e1 > 0.0 && *r1 > 0.0 && *e2 == 0.0 && *r2 == 0.0 {
                Ok((&p.ideology1, *s, *e1, *r1))
            } else if *e2 > 0.0 && *r2 > 0.0 && *e1 == 0.0 && *r1 == 0.0 {
                Ok((p.second(), *s, *e2, *r2))
            } else {
                Err(LyapunovError::AnchorNotEndemic)
            }
        }
    }
}

/// Hypotheses of the cross-model dominance theorem for ideology two.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CrossConditions {
    /// `R2 > max(1, R1)`.
    pub dominance: bool,
    /// Weight condition valid on the whole positive orthant:
    /// `c_e2/c~2 < c_e1/c~1`.
    pub strict_weights: bool,
    /// Weaker condition valid inside the invariant region:
    /// `c_e2/c~2 <= (c_e1/c~1) / (1 - (mu/lambda) E2**)`.
    pub relaxed_weights: bool,
}

/// Evaluate both the strict and the relaxed hypothesis sets; which one to
/// prefer is left open, so both are reported.
pub fn cross_endemic_conditions(p: &ModelParams) -> CrossConditions {
    let d1 = derived_quantities(&p.ideology1, p.mu);
    let d2 = derived_quantities(p.second(), p.mu);
    let (r1, r2) = crate::analysis::reproduction_numbers_two(p);
    let a = p.second().c_e / d2.c_tilde;
    let bound = p.ideology1.c_e / d1.c_tilde;
    let relaxed = match endemic_state(p.lambda, p.mu, p.second()) {
        Some(xss) => {
            let factor = 1.0 - p.mu / p.lambda * xss[1];
            factor > 0.0 && a <= bound / factor
        }
        None => false,
    };
    CrossConditions {
        dominance: r2 > r1.max(1.0),
        strict_weights: a < bound,
        relaxed_weights: relaxed,
    }
}

/// Result of the sampled decrease check.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecreaseReport {
    pub pass: bool,
    /// Max over consecutive samples of `(v_next - v) / (1 + |v|)`.
    pub max_scaled_increase: f64,
    pub initial_value: f64,
    pub final_value: f64,
}

/// Check that a certificate is nonincreasing along a trajectory, allowing
/// `DECREASE_TOLERANCE` per step for integrator noise.
pub fn decrease_check<const N: usize>(
    spec: &LyapunovSpec,
    traj: &Trajectory<N>,
) -> Result<DecreaseReport, LyapunovError> {
    assert!(!traj.states.is_empty());
    let mut prev = spec.value_on(&traj.states[0])?;
    let initial_value = prev;
    let mut max_scaled_increase = f64::NEG_INFINITY;
    for x in &traj.states[1..] {
        let v = spec.value_on(x)?;
        let scaled = (v - prev) / (1.0 + prev.abs());
        max_scaled_increase = max_scaled_increase.max(scaled);
        prev = v;
    }
    if traj.states.len() == 1 {
        max_scaled_increase = 0.0;
    }
    Ok(DecreaseReport {
        pass: max_scaled_increase <= DECREASE_TOLERANCE,
        max_scaled_increase,
        initial_value,
        final_value: prev,
    })
}
