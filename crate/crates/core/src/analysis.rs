//! Equilibrium and threshold analysis: closed-form equilibria, basic
//! reproduction numbers with their next-generation-matrix oracle,
//! invasion numbers of the cross-interaction model, the bifurcation
//! thresholds in the conversion rate `delta`, regime classification, and
//! a damped-Newton search for coexistence equilibria.

use serde::Serialize;
use thiserror::Error;

use crate::linalg::{self, solve_linear, EigenSet, LinalgError, Matrix};
use crate::model::{
    derived_quantities, jacobian_bare, jacobian_two, residual, rhs_two, IdeologyParams,
    ModelParams, State,
};

/// Eigenvalue real parts inside this margin are classified Marginal
/// rather than silently rounded to stable/unstable; threshold cases are
/// meaningful here.
pub const STABILITY_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("coexistence search did not converge and could not certify absence")]
    NoConvergence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EquilibriumKind {
    IdeologyFree,
    BareEndemic,
    Dominance1,
    Dominance2,
    Coexistence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

/// One equilibrium with its spectrum, stability class and RHS residual.
#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumReport {
    pub kind: EquilibriumKind,
    pub state: State,
    pub eigenvalues: EigenSet,
    pub stability: Stability,
    pub residual: f64,
}

/// Basic reproduction number of the bare model, `(lambda/mu) * gamma`.
pub fn r0_bare(p: &ModelParams) -> f64 {
    p.s0() * derived_quantities(&p.ideology1, p.mu).gamma
}

/// Reproduction number of one ideology considered in isolation.
pub fn reproduction_number(lambda: f64, mu: f64, ip: &IdeologyParams) -> f64 {
    lambda / mu * derived_quantities(ip, mu).gamma
}

/// `(R1, R2)` for the two-ideology model. The cross-interaction rate does
/// not enter: both numbers are computed at the ideology-free equilibrium.
pub fn reproduction_numbers_two(p: &ModelParams) -> (f64, f64) {
    (
        reproduction_number(p.lambda, p.mu, &p.ideology1),
        reproduction_number(p.lambda, p.mu, p.second()),
    )
}

/// `(S, E, R)` of the endemic state of one ideology in isolation, present
/// exactly when its reproduction number exceeds one.
pub fn endemic_state(lambda: f64, mu: f64, ip: &IdeologyParams) -> Option<[f64; 3]> {
    let d = derived_quantities(ip, mu);
    let r_number = lambda / mu * d.gamma;
    if r_number <= 1.0 {
        return None;
    }
    let s = 1.0 / d.gamma;
    let r = mu / ip.beta * (r_number - 1.0);
    // beta * S = big_d / c_tilde at the endemic susceptible level.
    let e = (d.big_d / d.c_tilde - (mu + ip.d_r)) / (mu + ip.d_e) * r;
    Some([s, e, r])
}

/// Ideology-one dominance equilibrium embedded in the 5-dim state space.
pub fn dominance_first(p: &ModelParams) -> Option<[f64; 5]> {
    endemic_state(p.lambda, p.mu, &p.ideology1).map(|[s, e, r]| [s, e, r, 0.0, 0.0])
}

/// Ideology-two dominance equilibrium embedded in the 5-dim state space.
pub fn dominance_second(p: &ModelParams) -> Option<[f64; 5]> {
    endemic_state(p.lambda, p.mu, p.second()).map(|[s, e, r]| [s, 0.0, 0.0, e, r])
}

/// Where the extremist-conversion flow enters an invading ideology's
/// next-generation matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CrossTerm {
    /// No conversion term (ideology-free anchor, or `delta = 0`).
    None,
    /// The invader gains converts from the established extremists:
    /// `delta * e_established` enters the new-adoption matrix `F`.
    GainFromEstablished {
        delta: f64,
        established_extremists: f64,
    },
    /// The invader loses extremists to the established ideology:
    /// `delta * e_established` enters the removal matrix `V`.
    LossToEstablished {
        delta: f64,
        established_extremists: f64,
    },
}

/// Build the next-generation pair `(F, V)` for one ideology linearized at
/// susceptible level `s_bar`. `F` collects rates of new adoptions, `V`
/// transfers between the adopter classes; the invasion variants add the
/// conversion flow per [`CrossTerm`].
pub fn ngm_build(ip: &IdeologyParams, mu: f64, s_bar: f64, cross: CrossTerm) -> (Matrix<2>, Matrix<2>) {
    let phi = ip.beta * s_bar;
    let mut f = Matrix::new([[0.0, ip.q_e * phi], [0.0, ip.q_r() * phi]]);
    let mut v = Matrix::new([
        [mu + ip.d_e + ip.c_e, -ip.c_r],
        [-ip.c_e, mu + ip.d_r + ip.c_r],
    ]);
    match cross {
        CrossTerm::None => {}
        CrossTerm::GainFromEstablished {
            delta,
            established_extremists,
        } => f.0[0][0] += delta * established_extremists,
        CrossTerm::LossToEstablished {
            delta,
            established_extremists,
        } => v.0[0][0] += delta * established_extremists,
    }
    (f, v)
}

/// Next-generation matrix `N = F V^{-1}`, guarded against a degenerate
/// transfer matrix (cannot occur for valid positive parameters).
pub fn ngm_matrix(f: &Matrix<2>, v: &Matrix<2>) -> Result<Matrix<2>, LinalgError> {
    // Row j of N solves V^T n_j = (row j of F).
    let vt = v.transpose();
    let mut n = Matrix::<2>::zeros();
    for j in 0..2 {
        n.0[j] = solve_linear(&vt, &f.0[j])?;
    }
    Ok(n)
}

/// Eigenvalues and stability class of the Jacobian at `eq`.
///
/// Callers must pass a state whose RHS residual is already small; the
/// classification is meaningless away from an equilibrium.
pub fn local_stability(
    p: &ModelParams,
    eq: &State,
) -> Result<(EigenSet, Stability), AnalysisError> {
    let eigen = match eq {
        State::Bare(x) => linalg::eigenvalues(&jacobian_bare(p, x))?,
        State::Two(x) => linalg::eigenvalues(&jacobian_two(p, x))?,
    };
    let max_re = eigen.max_real_part();
    let stability = if max_re < -STABILITY_MARGIN {
        Stability::Stable
    } else if max_re > STABILITY_MARGIN {
        Stability::Unstable
    } else {
        Stability::Marginal
    };
    Ok((eigen, stability))
}

fn report(
    p: &ModelParams,
    kind: EquilibriumKind,
    state: State,
) -> Result<EquilibriumReport, AnalysisError> {
    let (eigenvalues, stability) = local_stability(p, &state)?;
    Ok(EquilibriumReport {
        kind,
        state,
        eigenvalues,
        stability,
        residual: residual(p, &state),
    })
}

/// All equilibria of the bare model: the ideology-free point always, the
/// endemic point exactly when `R0 > 1`.
pub fn equilibria_bare(p: &ModelParams) -> Result<Vec<EquilibriumReport>, AnalysisError> {
    let mut out = vec![report(
        p,
        EquilibriumKind::IdeologyFree,
        State::Bare([p.s0(), 0.0, 0.0]),
    )?];
    if let Some(x) = endemic_state(p.lambda, p.mu, &p.ideology1) {
        out.push(report(p, EquilibriumKind::BareEndemic, State::Bare(x))?);
    }
    Ok(out)
}

/// The ideology-free and dominance equilibria of the two-ideology model.
/// These are equilibria for every `delta >= 0` because the conversion
/// term vanishes on both boundary faces.
pub fn boundary_equilibria_two(p: &ModelParams) -> Result<Vec<EquilibriumReport>, AnalysisError> {
    let mut out = vec![report(
        p,
        EquilibriumKind::IdeologyFree,
        State::Two([p.s0(), 0.0, 0.0, 0.0, 0.0]),
    )?];
    if let Some(x) = dominance_first(p) {
        out.push(report(p, EquilibriumKind::Dominance1, State::Two(x))?);
    }
    if let Some(x) = dominance_second(p) {
        out.push(report(p, EquilibriumKind::Dominance2, State::Two(x))?);
    }
    Ok(out)
}

/// Invasion numbers of the cross-interaction model; each is defined only
/// when the opposing dominance equilibrium exists.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvasionNumbers {
    /// Invasion number of ideology one near the ideology-two dominance
    /// equilibrium; defined when `R2 > 1`.
    pub i1: Option<f64>,
    /// Invasion number of ideology two near the ideology-one dominance
    /// equilibrium; defined when `R1 > 1`.
    pub i2: Option<f64>,
}

/// Compute both invasion numbers at the model's `delta`.
pub fn invasion_numbers_delta(p: &ModelParams) -> InvasionNumbers {
    InvasionNumbers {
        i1: invasion_first(p),
        i2: invasion_second(p),
    }
}

/// Invasion number of ideology two at the ideology-one dominance
/// equilibrium: the spectral radius of its 2x2 next-generation matrix,
/// written out as `((A+D) + sqrt((A-D)^2 + 4BC)) / 2`.
fn invasion_second(p: &ModelParams) -> Option<f64> {
    let xs = endemic_state(p.lambda, p.mu, &p.ideology1)?;
    let (f, v) = ngm_build(
        p.second(),
        p.mu,
        xs[0],
        CrossTerm::GainFromEstablished {
            delta: p.delta,
            established_extremists: xs[1],
        },
    );
    let n = ngm_matrix(&f, &v).ok()?;
    let (a, b, c, d) = (n.0[0][0], n.0[0][1], n.0[1][0], n.0[1][1]);
    Some(0.5 * ((a + d) + ((a - d) * (a - d) + 4.0 * b * c).max(0.0).sqrt()))
}

/// Invasion number of ideology one at the ideology-two dominance
/// equilibrium. Its next-generation matrix has rank one, so the spectral
/// radius is the trace.
fn invasion_first(p: &ModelParams) -> Option<f64> {
    let xss = endemic_state(p.lambda, p.mu, p.second())?;
    let (f, v) = ngm_build(
        &p.ideology1,
        p.mu,
        xss[0],
        CrossTerm::LossToEstablished {
            delta: p.delta,
            established_extremists: xss[1],
        },
    );
    let n = ngm_matrix(&f, &v).ok()?;
    Some(n.trace())
}

/// A bifurcation threshold in `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", content = "value", rename_all = "snake_case")]
pub enum Threshold {
    /// The prerequisite dominance equilibrium does not exist.
    Undefined,
    /// The closed-form denominator vanishes; no finite threshold.
    Indeterminate,
    /// The formula yields a nonpositive value: the invasion number never
    /// crosses one at positive `delta`. The value is still reported.
    NonPositive(f64),
    /// The formula yields a positive value, but the unit eigenvalue there
    /// is not the spectral radius (happens for the `I2` threshold when
    /// `R1 < R2`, where the invasion number starts above one and grows).
    /// No stability change occurs at this `delta`.
    NotACrossing(f64),
    /// Genuine crossing: the invasion number equals one at this `delta`.
    Crossing(f64),
}

impl Threshold {
    /// The formula value, whenever one exists.
    pub fn value(&self) -> Option<f64> {
        match *self {
            Threshold::Undefined | Threshold::Indeterminate => None,
            Threshold::NonPositive(v) | Threshold::NotACrossing(v) | Threshold::Crossing(v) => {
                Some(v)
            }
        }
    }

    pub fn is_crossing(&self) -> bool {
        matches!(self, Threshold::Crossing(_))
    }
}

/// The two thresholds together with `sigma`, their difference, defined
/// only when both are genuine positive crossings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdReport {
    /// `delta` at which ideology two's invasion number reaches one
    /// (computed at the ideology-one dominance equilibrium).
    pub delta_star: Threshold,
    /// `delta` at which ideology one's invasion number reaches one
    /// (computed at the ideology-two dominance equilibrium).
    pub delta_star_star: Threshold,
    pub sigma: Option<f64>,
}

/// Closed-form thresholds. `delta_star` solves `I2(delta) = 1`,
/// `delta_star_star` solves `I1(delta) = 1`; both come from requiring a
/// unit eigenvalue of the corresponding next-generation matrix, which
/// linearizes in `delta`.
pub fn delta_thresholds(p: &ModelParams) -> ThresholdReport {
    let (r1, r2) = reproduction_numbers_two(p);
    let delta_star = threshold_star(p, r1, r2);
    let delta_star_star = threshold_star_star(p, r1, r2);
    let sigma = match (delta_star, delta_star_star) {
        (Threshold::Crossing(a), Threshold::Crossing(b)) => Some(b - a),
        _ => None,
    };
    ThresholdReport {
        delta_star,
        delta_star_star,
        sigma,
    }
}

fn threshold_star(p: &ModelParams, r1: f64, r2: f64) -> Threshold {
    let Some(xs) = endemic_state(p.lambda, p.mu, &p.ideology1) else {
        return Threshold::Undefined;
    };
    let i2 = p.second();
    let d2 = derived_quantities(i2, p.mu);
    // Unit spectral radius of the I2 next-generation matrix reduces to a
    // linear equation in delta * E1:
    //   [q_r2 D2 (R1 - R2) + R1 c_e2 (c_r2 + q_e2 (mu + d_r2))] x
    //     = c_tilde2 D2 (R1 - R2).
    let term_a = i2.q_r() * d2.big_d * (r1 - r2);
    let term_b = r1 * i2.c_e * (i2.c_r + i2.q_e * (p.mu + i2.d_r));
    let den = term_a + term_b;
    let scale = term_a.abs() + term_b.abs();
    if den.abs() <= 1e-14 * scale {
        return Threshold::Indeterminate;
    }
    let value = d2.c_tilde * d2.big_d * (r1 - r2) / den / xs[1];
    if value <= 0.0 {
        Threshold::NonPositive(value)
    } else if r2 >= r1 {
        // I2 starts at R2/R1 >= 1 and is strictly increasing, so it never
        // crosses one from below; the unit eigenvalue at this root is the
        // subdominant one.
        Threshold::NotACrossing(value)
    } else {
        Threshold::Crossing(value)
    }
}

fn threshold_star_star(p: &ModelParams, r1: f64, r2: f64) -> Threshold {
    let Some(xss) = endemic_state(p.lambda, p.mu, p.second()) else {
        return Threshold::Undefined;
    };
    let i1 = &p.ideology1;
    let d1 = derived_quantities(i1, p.mu);
    // Unit trace of the I1 next-generation matrix:
    //   [R2 c_e1 (c_r1 + q_e1 (mu + d_r1)) - q_r1 D1 (R1 - R2)] x
    //     = c_tilde1 D1 (R1 - R2).
    let term_a = r2 * i1.c_e * (i1.c_r + i1.q_e * (p.mu + i1.d_r));
    let term_b = i1.q_r() * d1.big_d * (r1 - r2);
    let den = term_a - term_b;
    let scale = term_a.abs() + term_b.abs();
    if den.abs() <= 1e-14 * scale {
        return Threshold::Indeterminate;
    }
    let value = d1.c_tilde * d1.big_d * (r1 - r2) / den / xss[1];
    if value <= 0.0 {
        Threshold::NonPositive(value)
    } else {
        // The I1 matrix has rank one, so any root of trace = 1 is the
        // spectral radius itself.
        Threshold::Crossing(value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RegimeLabel {
    /// 1 < R1 < R2: ideology two dominates at every conversion rate.
    Situation1,
    /// 1 < R2 < R1, threshold for ideology one never positive: raising
    /// `delta` destabilizes the first dominance equilibrium into a stable
    /// coexistence.
    Situation2A,
    /// 1 < R2 < R1, 0 < delta** < delta*: bistability window with an
    /// unstable coexistence equilibrium inside.
    Situation2B,
    /// 1 < R2 < R1, 0 < delta* < delta**: both dominance equilibria
    /// unstable inside the window, with a stable coexistence equilibrium.
    Situation2C,
    /// R2 < 1 < R1: above delta* a stable coexistence appears and stays.
    Situation3,
    /// R1 < 1 < R2: no qualitative change at any conversion rate.
    Situation4,
    /// max(R1, R2) <= 1: only the ideology-free equilibrium.
    AllSubcritical,
}

/// Everything that goes into the regime decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeReport {
    pub r1: f64,
    pub r2: f64,
    pub i1_delta: Option<f64>,
    pub i2_delta: Option<f64>,
    pub delta_star: Threshold,
    pub delta_star_star: Threshold,
    pub sigma: Option<f64>,
    pub label: RegimeLabel,
    /// Set when the parameters sit on a measure-zero boundary of the
    /// classification (R1 = R2, some R = 1, or delta at a threshold).
    pub degenerate: bool,
}

/// Classify two-ideology parameters into the regime taxonomy.
pub fn classify_regime(p: &ModelParams) -> RegimeReport {
    let (r1, r2) = reproduction_numbers_two(p);
    let inv = invasion_numbers_delta(p);
    let th = delta_thresholds(p);

    let tol = 1e-12;
    let mut degenerate = (r1 - r2).abs() <= tol * r1.abs().max(r2.abs());
    degenerate |= (r1 - 1.0).abs() <= tol || (r2 - 1.0).abs() <= tol;
    for t in [th.delta_star, th.delta_star_star] {
        if let Some(v) = t.value() {
            if v > 0.0 && (p.delta - v).abs() <= tol * v.max(1.0) {
                degenerate = true;
            }
        }
    }
    if matches!(th.delta_star, Threshold::Indeterminate)
        || matches!(th.delta_star_star, Threshold::Indeterminate)
    {
        degenerate = true;
    }

    let label = if r1 <= 1.0 && r2 <= 1.0 {
        RegimeLabel::AllSubcritical
    } else if r2 <= 1.0 {
        RegimeLabel::Situation3
    } else if r1 <= 1.0 {
        RegimeLabel::Situation4
    } else if r1 <= r2 {
        // The tie R1 = R2 is degenerate (continuum of equilibria at
        // delta = 0); for delta > 0 it behaves like Situation 1.
        RegimeLabel::Situation1
    } else {
        match th.delta_star_star {
            Threshold::Crossing(dss) => match th.delta_star {
                Threshold::Crossing(ds) if dss < ds => RegimeLabel::Situation2B,
                Threshold::Crossing(ds) if dss > ds => RegimeLabel::Situation2C,
                _ => {
                    degenerate = true;
                    RegimeLabel::Situation2B
                }
            },
            // delta** nonpositive or at infinity: the second dominance
            // equilibrium never stabilizes.
            _ => RegimeLabel::Situation2A,
        }
    };

    RegimeReport {
        r1,
        r2,
        i1_delta: inv.i1,
        i2_delta: inv.i2,
        delta_star: th.delta_star,
        delta_star_star: th.delta_star_star,
        sigma: th.sigma,
        label,
        degenerate,
    }
}

const NEWTON_MAX_ITERS: usize = 100;
const NEWTON_MAX_HALVINGS: usize = 30;

enum NewtonOutcome {
    Converged([f64; 5]),
    /// Left a generous bounding box around the invariant region.
    Exited,
    /// Ran out of iterations or damping could not reduce the residual.
    Stalled,
}

fn damped_newton(p: &ModelParams, mut x: [f64; 5], tol: f64) -> NewtonOutcome {
    let cap = p.s0();
    let inf = |f: &[f64; 5]| f.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut fx = rhs_two(p, &x);
    let mut fnorm = inf(&fx);
    for _ in 0..NEWTON_MAX_ITERS {
        if fnorm <= tol {
            return NewtonOutcome::Converged(x);
        }
        let j = jacobian_two(p, &x);
        let neg_f = [-fx[0], -fx[1], -fx[2], -fx[3], -fx[4]];
        let step = match solve_linear(&j, &neg_f) {
            Ok(s) => s,
            Err(_) => return NewtonOutcome::Stalled,
        };
        // Halve the step until the residual strictly decreases.
        let mut damping = 1.0;
        let mut advanced = false;
        for _ in 0..NEWTON_MAX_HALVINGS {
            let mut trial = x;
            for i in 0..5 {
                trial[i] += damping * step[i];
            }
            if trial.iter().all(|v| v.is_finite()) {
                let ft = rhs_two(p, &trial);
                let fnt = inf(&ft);
                if fnt < fnorm {
                    x = trial;
                    fx = ft;
                    fnorm = fnt;
                    advanced = true;
                    break;
                }
            }
            damping *= 0.5;
        }
        if !advanced {
            return stall_outcome(&x, cap);
        }
        if x.iter().any(|&v| v < -0.25 * cap || v > 50.0 * cap) {
            return NewtonOutcome::Exited;
        }
    }
    if fnorm <= tol {
        NewtonOutcome::Converged(x)
    } else {
        stall_outcome(&x, cap)
    }
}

/// A stall at a point that has left the nonnegative orthant certifies
/// that this start found no interior root; a stall strictly inside is
/// inconclusive.
fn stall_outcome(x: &[f64; 5], cap: f64) -> NewtonOutcome {
    if x.iter().any(|&v| v < -1e-9 * cap) {
        NewtonOutcome::Exited
    } else {
        NewtonOutcome::Stalled
    }
}

/// Search for interior (coexistence) equilibria of the cross-interaction
/// model by damped Newton from a deterministic multistart grid.
///
/// Returns every distinct interior root found (empirically unique, but
/// not assumed so). An empty list is an absence certificate in the
/// heuristic sense: every start either converged to a boundary
/// equilibrium or left the region of interest. `NoConvergence` is
/// returned instead when some start was inconclusive and no interior
/// root was found.
pub fn coexistence_equilibria(p: &ModelParams) -> Result<Vec<EquilibriumReport>, AnalysisError> {
    let _ = p.second();
    // Without conversion, interior equilibria require the two reproduction
    // numbers to coincide exactly (a degenerate continuum); generically
    // absent, and reported as such.
    if p.delta == 0.0 {
        return Ok(Vec::new());
    }

    let cap = p.s0();
    let tol = 1e-12 * p.lambda.max(1.0);
    let x_star = dominance_first(p);
    let x_ss = dominance_second(p);
    let mut boundary: Vec<[f64; 5]> = vec![[cap, 0.0, 0.0, 0.0, 0.0]];
    boundary.extend(x_star);
    boundary.extend(x_ss);

    // Start grid: 9 susceptible levels, each with (a) the adopter blocks
    // blended from the two dominance equilibria and (b) blocks scaled to
    // a fraction of the population ceiling. The second family matters
    // when a dominance equilibrium is barely supercritical: the
    // conversion flow can hold the interior adopter level far above the
    // isolated one, out of reach of any blend of the boundary states.
    let ratio = |x: Option<[f64; 5]>, e_idx: usize, r_idx: usize| -> (f64, f64) {
        match x {
            Some(x) if x[e_idx] + x[r_idx] > 0.0 => {
                let t = x[e_idx] + x[r_idx];
                (x[e_idx] / t, x[r_idx] / t)
            }
            _ => (0.7, 0.3),
        }
    };
    let (e1_frac, r1_frac) = ratio(x_star, 1, 2);
    let (e2_frac, r2_frac) = ratio(x_ss, 3, 4);
    let mut starts: Vec<[f64; 5]> = Vec::with_capacity(54);
    for family in 0..2 {
        for k in 1..=9 {
            let s = k as f64 / 10.0 * cap;
            for w in [0.25, 0.5, 0.75] {
                let start = if family == 0 {
                    let (e1, r1) = match x_star {
                        Some(x) => (w * x[1], w * x[2]),
                        None => (0.05 * cap, 0.05 * cap),
                    };
                    let (e2, r2) = match x_ss {
                        Some(x) => ((1.0 - w) * x[3], (1.0 - w) * x[4]),
                        None => (0.05 * cap, 0.05 * cap),
                    };
                    [s, e1, r1, e2, r2]
                } else {
                    let m1 = w * 0.15 * cap;
                    let m2 = (1.0 - w) * 0.15 * cap;
                    [s, m1 * e1_frac, m1 * r1_frac, m2 * e2_frac, m2 * r2_frac]
                };
                starts.push(start);
            }
        }
    }

    let mut roots: Vec<[f64; 5]> = Vec::new();
    let mut inconclusive = false;
    for start in starts {
        match damped_newton(p, start, tol) {
            NewtonOutcome::Converged(root) => {
                let interior = root.iter().all(|&v| v > 1e-10)
                    && boundary.iter().all(|b| max_norm_dist(&root, b) > 1e-6);
                if interior && roots.iter().all(|r| max_norm_dist(&root, r) > 1e-6) {
                    roots.push(root);
                }
            }
            NewtonOutcome::Exited => {}
            NewtonOutcome::Stalled => inconclusive = true,
        }
    }

    if roots.is_empty() && inconclusive {
        return Err(AnalysisError::NoConvergence);
    }
    roots
        .into_iter()
        .map(|x| report(p, EquilibriumKind::Coexistence, State::Two(x)))
        .collect()
}

fn max_norm_dist(a: &[f64; 5], b: &[f64; 5]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
