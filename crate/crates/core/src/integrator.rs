//! Adaptive explicit Runge-Kutta integration and trajectory-level checks.
//!
//! The method is the Dormand-Prince 5(4) embedded pair with the standard
//! PI step-size controller and fourth-order dense output, which is ample
//! for these smooth non-stiff vector fields. Sampled states are produced
//! at a fixed interval from the dense interpolant, so trajectory checks
//! see the solution between accepted steps too.

use thiserror::Error;

use crate::model::{rhs_bare, rhs_two, ModelParams};

// Dormand-Prince 5(4) tableau (FSAL: the last stage is the next step's first).
const A: [[f64; 6]; 6] = [
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
// Difference between the 5th- and embedded 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
// Dense-output weights for the quartic interpolant.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

// PI controller constants (Hairer's DOPRI5 defaults).
const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;
const FAC_MIN: f64 = 0.2; // max shrink per step
const FAC_MAX: f64 = 10.0; // max growth per step

/// Most negative component tolerated before an integration is failed.
/// Undershoot beyond local-error scale indicates a defect, and clamping
/// would silently violate the population balance.
pub const NEGATIVE_FLOOR: f64 = -1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    /// Step to start with; estimated from the initial derivative if None.
    pub initial_step: Option<f64>,
    pub max_step: f64,
    pub max_steps: u64,
    /// Spacing of dense-output samples recorded in the trajectory.
    pub sample_interval: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-10,
            initial_step: None,
            max_step: f64::INFINITY,
            max_steps: 10_000_000,
            sample_interval: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct StepStats {
    pub accepted: u64,
    pub rejected: u64,
    /// Largest scaled local error estimate among accepted steps (<= 1).
    pub max_error_estimate: f64,
}

/// Time-ordered dense samples of one integration.
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    pub times: Vec<f64>,
    pub states: Vec<[f64; N]>,
    pub stats: StepStats,
}

impl<const N: usize> Trajectory<N> {
    pub fn final_state(&self) -> &[f64; N] {
        self.states.last().expect("trajectory is never empty")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory is never empty")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum IntegrateError {
    #[error("step limit exceeded at t = {t}")]
    StepLimitExceeded { t: f64 },
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("component {component} fell below {NEGATIVE_FLOOR} at t = {t}")]
    NegativeOvershoot { t: f64, component: usize },
}

/// Integrate the bare model from an admissible state.
pub fn integrate_bare(
    p: &ModelParams,
    x0: [f64; 3],
    t_span: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<Trajectory<3>, IntegrateError> {
    let p = *p;
    integrate_ode(move |_, x| rhs_bare(&p, x), x0, t_span, cfg, true)
}

/// Integrate the two-ideology model from an admissible state.
pub fn integrate_two(
    p: &ModelParams,
    x0: [f64; 5],
    t_span: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<Trajectory<5>, IntegrateError> {
    let p = *p;
    integrate_ode(move |_, x| rhs_two(&p, x), x0, t_span, cfg, true)
}

/// General explicit integration of `x' = f(t, x)`.
///
/// With `enforce_floor` the run fails if any accepted or sampled component
/// drops below [`NEGATIVE_FLOOR`]; model wrappers enable this, generic test
/// problems need not.
pub fn integrate_ode<const N: usize>(
    f: impl Fn(f64, &[f64; N]) -> [f64; N],
    x0: [f64; N],
    t_span: (f64, f64),
    cfg: &IntegratorConfig,
    enforce_floor: bool,
) -> Result<Trajectory<N>, IntegrateError> {
    let (t0, t_end) = t_span;
    assert!(t_end >= t0, "backward integration is not supported");
    assert!(cfg.rtol > 0.0 && cfg.atol > 0.0, "tolerances must be positive");
    assert!(cfg.sample_interval > 0.0, "sample interval must be positive");

    let span = t_end - t0;
    let mut times = vec![t0];
    let mut states = vec![x0];
    let mut stats = StepStats::default();
    if span == 0.0 {
        return Ok(Trajectory { times, states, stats });
    }

    let mut t = t0;
    let mut y = x0;
    let mut k1 = f(t, &y);
    let mut h = cfg
        .initial_step
        .unwrap_or_else(|| estimate_initial_step(&f, t0, &y, &k1, cfg))
        .min(cfg.max_step)
        .min(span);
    let mut facold: f64 = 1e-4;
    let mut last_rejected = false;
    // Next dense sample is an integer multiple of the interval past t0.
    let mut sample_index: u64 = 1;

    let time_floor = span * 1e-12;
    loop {
        if t_end - t <= time_floor {
            break;
        }
        if stats.accepted + stats.rejected >= cfg.max_steps {
            return Err(IntegrateError::StepLimitExceeded { t });
        }
        h = h.min(cfg.max_step).min(t_end - t);
        if h < 1e-14 * span {
            return Err(IntegrateError::StepUnderflow { t });
        }

        // Six new stages; k1 is carried over (FSAL).
        let mut k = [[0.0; N]; 7];
        k[0] = k1;
        for stage in 0..6 {
            let mut xs = y;
            for (j, kj) in k.iter().enumerate().take(stage + 1) {
                let a = A[stage][j];
                if a != 0.0 {
                    for i in 0..N {
                        xs[i] += h * a * kj[i];
                    }
                }
            }
            k[stage + 1] = f(t + C[stage] * h, &xs);
        }
        // k[6] is f at the 5th-order solution because the last A row
        // equals the weights; reuse it for the new state.
        let mut y_new = y;
        for (j, kj) in k.iter().enumerate().take(6) {
            let b = A[5][j];
            if b != 0.0 {
                for i in 0..N {
                    y_new[i] += h * b * kj[i];
                }
            }
        }

        // Scaled RMS error of the embedded difference.
        let mut err_sq = 0.0;
        for i in 0..N {
            let sc = cfg.atol + cfg.rtol * y[i].abs().max(y_new[i].abs());
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                if E[j] != 0.0 {
                    e += E[j] * kj[i];
                }
            }
            let scaled = h * e / sc;
            err_sq += scaled * scaled;
        }
        let err = (err_sq / N as f64).sqrt();

        let fac11 = err.powf(EXPO1);
        if err <= 1.0 {
            // Accept: emit dense samples that fall inside this step.
            let cont = dense_coefficients(&y, &y_new, &k, h);
            loop {
                let ts = t0 + sample_index as f64 * cfg.sample_interval;
                if ts > t + h + time_floor || ts > t_end - time_floor {
                    break;
                }
                let theta = ((ts - t) / h).clamp(0.0, 1.0);
                let xs = dense_eval(&cont, theta);
                if enforce_floor {
                    check_floor(&xs, ts)?;
                }
                times.push(ts);
                states.push(xs);
                sample_index += 1;
            }
            if enforce_floor {
                check_floor(&y_new, t + h)?;
            }

            stats.accepted += 1;
            stats.max_error_estimate = stats.max_error_estimate.max(err);
            t += h;
            y = y_new;
            k1 = k[6];

            let fac = (fac11 / facold.powf(BETA) / SAFETY)
                .clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut h_new = h / fac;
            if last_rejected {
                h_new = h_new.min(h);
            }
            h = h_new;
            facold = err.max(1e-4);
            last_rejected = false;
        } else {
            stats.rejected += 1;
            h /= (fac11 / SAFETY).min(1.0 / FAC_MIN);
            last_rejected = true;
        }
    }

    // Close the trajectory exactly at t_end.
    if *times.last().unwrap() < t_end - time_floor.min(1e-12) {
        times.push(t_end);
        states.push(y);
    } else {
        *times.last_mut().unwrap() = t_end;
        *states.last_mut().unwrap() = y;
    }
    Ok(Trajectory { times, states, stats })
}

fn check_floor<const N: usize>(x: &[f64; N], t: f64) -> Result<(), IntegrateError> {
    for (component, &v) in x.iter().enumerate() {
        if v < NEGATIVE_FLOOR {
            return Err(IntegrateError::NegativeOvershoot { t, component });
        }
    }
    Ok(())
}

/// Hairer-style starting step from the scaled size of x0, f(x0) and one
/// trial Euler step.
fn estimate_initial_step<const N: usize>(
    f: &impl Fn(f64, &[f64; N]) -> [f64; N],
    t0: f64,
    y: &[f64; N],
    f0: &[f64; N],
    cfg: &IntegratorConfig,
) -> f64 {
    let sc: Vec<f64> = (0..N)
        .map(|i| cfg.atol + cfg.rtol * y[i].abs())
        .collect();
    let d0 = rms(y.iter().zip(&sc).map(|(v, s)| v / s), N);
    let d1 = rms(f0.iter().zip(&sc).map(|(v, s)| v / s), N);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let mut y1 = *y;
    for i in 0..N {
        y1[i] += h0 * f0[i];
    }
    let f1 = f(t0 + h0, &y1);
    let d2 = rms(
        (0..N).map(|i| (f1[i] - f0[i]) / sc[i]),
        N,
    ) / h0;
    let d_max = d1.max(d2);
    let h1 = if d_max <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d_max).powf(0.2)
    };
    (100.0 * h0).min(h1)
}

fn rms(values: impl Iterator<Item = f64>, n: usize) -> f64 {
    (values.map(|v| v * v).sum::<f64>() / n as f64).sqrt()
}

type DenseCont<const N: usize> = [[f64; N]; 5];

fn dense_coefficients<const N: usize>(
    y: &[f64; N],
    y_new: &[f64; N],
    k: &[[f64; N]; 7],
    h: f64,
) -> DenseCont<N> {
    let mut cont = [[0.0; N]; 5];
    for i in 0..N {
        let ydiff = y_new[i] - y[i];
        let bspl = h * k[0][i] - ydiff;
        cont[0][i] = y[i];
        cont[1][i] = ydiff;
        cont[2][i] = bspl;
        cont[3][i] = ydiff - h * k[6][i] - bspl;
        let mut dsum = 0.0;
        for (j, kj) in k.iter().enumerate() {
            if D[j] != 0.0 {
                dsum += D[j] * kj[i];
            }
        }
        cont[4][i] = h * dsum;
    }
    cont
}

fn dense_eval<const N: usize>(cont: &DenseCont<N>, theta: f64) -> [f64; N] {
    let s1 = 1.0 - theta;
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = cont[0][i]
            + theta
                * (cont[1][i]
                    + s1 * (cont[2][i] + theta * (cont[3][i] + s1 * cont[4][i])));
    }
    out
}

/// Outcome of the invariant-region and attraction-bound checks.
#[derive(Debug, Clone, Copy)]
pub struct InvariantReport {
    pub pass: bool,
    pub started_inside: bool,
    /// Most negative component seen (0 if none went negative).
    pub worst_component: f64,
    /// Largest excess of T over lambda/mu for trajectories started inside.
    pub region_excess: f64,
    /// Largest excess of T(t) over the comparison bound
    /// (T(0) - lambda/mu) e^{-mu t} + lambda/mu.
    pub attraction_excess: f64,
}

/// Check positivity, containment in the invariant region and the
/// exponential attraction bound for the total population.
pub fn invariant_region_check<const N: usize>(
    traj: &Trajectory<N>,
    p: &ModelParams,
) -> InvariantReport {
    let cap = p.s0();
    let t0 = traj.times[0];
    let total0: f64 = traj.states[0].iter().sum();
    let started_inside = total0 <= cap && traj.states[0].iter().all(|&c| c >= 0.0);
    let slack = 1e-8;
    let attraction_tol = slack * cap.max(total0).max(1.0);

    let mut worst_component = 0.0_f64;
    let mut region_excess = 0.0_f64;
    let mut attraction_excess = 0.0_f64;
    for (tt, x) in traj.times.iter().zip(&traj.states) {
        for &c in x.iter() {
            worst_component = worst_component.min(c);
        }
        let total: f64 = x.iter().sum();
        if started_inside {
            region_excess = region_excess.max(total - cap);
        }
        let bound = (total0 - cap) * (-p.mu * (tt - t0)).exp() + cap;
        attraction_excess = attraction_excess.max(total - bound);
    }
    let pass = worst_component >= NEGATIVE_FLOOR
        && (!started_inside || region_excess <= slack * cap)
        && attraction_excess <= attraction_tol;
    InvariantReport {
        pass,
        started_inside,
        worst_component,
        region_excess,
        attraction_excess,
    }
}

/// Convergence of a trajectory to a target state in max-norm.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceReport {
    pub converged: bool,
    /// Sample time of first entry into the tolerance ball, if any.
    pub first_entry: Option<f64>,
}

/// A trajectory converges when its final state lies within `tol` of the
/// target and it never leaves the ball after first entering it.
pub fn convergence_check<const N: usize>(
    traj: &Trajectory<N>,
    target: &[f64; N],
    tol: f64,
) -> ConvergenceReport {
    let dist = |x: &[f64; N]| -> f64 {
        x.iter()
            .zip(target)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    };
    let first = traj
        .states
        .iter()
        .position(|x| dist(x) <= tol);
    let converged = match first {
        None => false,
        Some(idx) => traj.states[idx..].iter().all(|x| dist(x) <= tol),
    };
    ConvergenceReport {
        converged,
        first_entry: first.map(|idx| traj.times[idx]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{IdeologyParams, ModelParams};

    fn baseline() -> ModelParams {
        ModelParams::bare(
            1.0,
            0.1,
            IdeologyParams {
                beta: 0.2,
                d_e: 0.2,
                d_r: 0.3,
                c_e: 0.1,
                c_r: 0.05,
                q_e: 0.6,
            },
        )
        .unwrap()
    }

    #[test]
    fn exponential_decay_matches_exact_solution() {
        let cfg = IntegratorConfig {
            rtol: 1e-10,
            atol: 1e-12,
            sample_interval: 0.25,
            ..Default::default()
        };
        let traj = integrate_ode(|_, x: &[f64; 1]| [-x[0]], [1.0], (0.0, 1.0), &cfg, false)
            .unwrap();
        let got = traj.final_state()[0];
        assert!((got - (-1.0_f64).exp()).abs() < 1e-9, "got {got}");
        // Dense samples hit the exact exponential too.
        for (t, x) in traj.times.iter().zip(&traj.states) {
            assert!((x[0] - (-t).exp()).abs() < 1e-8);
        }
    }

    #[test]
    fn equilibrium_start_stays_constant() {
        let p = baseline();
        let cfg = IntegratorConfig::default();
        let traj = integrate_bare(&p, [10.0, 0.0, 0.0], (0.0, 200.0), &cfg).unwrap();
        for x in &traj.states {
            for (a, b) in x.iter().zip([10.0, 0.0, 0.0]) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn small_seeding_reaches_endemic_point() {
        let p = baseline();
        let traj = integrate_bare(&p, [10.0, 0.01, 0.01], (0.0, 5000.0), &Default::default())
            .unwrap();
        let target = [3.9772727272727275, 0.9980519480519480, 0.7571428571428571];
        for (a, b) in traj.final_state().iter().zip(target) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn zero_span_returns_single_sample() {
        let p = baseline();
        let traj =
            integrate_bare(&p, [5.0, 1.0, 1.0], (0.0, 0.0), &IntegratorConfig::default())
                .unwrap();
        assert_eq!(traj.times, vec![0.0]);
        assert_eq!(traj.states.len(), 1);
    }

    #[test]
    fn sample_grid_is_regular_and_ends_at_t_end() {
        let p = baseline();
        let cfg = IntegratorConfig {
            sample_interval: 0.5,
            ..Default::default()
        };
        let traj = integrate_bare(&p, [8.0, 0.5, 0.5], (0.0, 10.3), &cfg).unwrap();
        assert_eq!(traj.times[0], 0.0);
        assert!((traj.times[1] - 0.5).abs() < 1e-12);
        assert!((traj.final_time() - 10.3).abs() < 1e-12);
        for w in traj.times.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn step_limit_is_reported() {
        let p = baseline();
        let cfg = IntegratorConfig {
            max_steps: 3,
            ..Default::default()
        };
        let err = integrate_bare(&p, [1.0, 1.0, 1.0], (0.0, 1000.0), &cfg).unwrap_err();
        assert!(matches!(err, IntegrateError::StepLimitExceeded { .. }));
    }

    #[test]
    fn invariant_region_holds_from_inside() {
        let p = baseline();
        let traj = integrate_bare(&p, [5.0, 2.0, 1.0], (0.0, 300.0), &Default::default())
            .unwrap();
        let rep = invariant_region_check(&traj, &p);
        assert!(rep.started_inside);
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn attraction_bound_holds_from_outside() {
        let p = baseline();
        // T(0) = 2 * lambda / mu.
        let traj = integrate_bare(&p, [12.0, 5.0, 3.0], (0.0, 300.0), &Default::default())
            .unwrap();
        let rep = invariant_region_check(&traj, &p);
        assert!(!rep.started_inside);
        assert!(rep.pass, "{rep:?}");
        let final_total: f64 = traj.final_state().iter().sum();
        assert!(final_total <= p.s0() + 1e-6);
    }

    #[test]
    fn origin_start_is_admissible() {
        let p = baseline();
        let traj = integrate_bare(&p, [0.0, 0.0, 0.0], (0.0, 50.0), &Default::default())
            .unwrap();
        let rep = invariant_region_check(&traj, &p);
        assert!(rep.pass);
        assert!(traj.final_state()[0] > 0.0);
    }

    #[test]
    fn convergence_check_exact_target() {
        let p = baseline();
        let traj = integrate_bare(&p, [10.0, 0.0, 0.0], (0.0, 10.0), &Default::default())
            .unwrap();
        let rep = convergence_check(&traj, &[10.0, 0.0, 0.0], 1e-9);
        assert!(rep.converged);
        assert_eq!(rep.first_entry, Some(0.0));
    }

    #[test]
    fn convergence_check_rejects_transient_visit() {
        let traj = Trajectory::<1> {
            times: vec![0.0, 1.0, 2.0, 3.0],
            states: vec![[0.0], [1.0], [0.0], [0.05]],
            stats: StepStats::default(),
        };
        // Enters the ball at t=0, leaves at t=1, so not converged even
        // though the final state is inside.
        let rep = convergence_check(&traj, &[0.0], 0.1);
        assert!(!rep.converged);
        assert_eq!(rep.first_entry, Some(0.0));
    }
}
