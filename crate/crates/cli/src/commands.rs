//! The five subcommands: analyze, simulate, sweep, bifurcate, verify.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use exclusion_core::analysis::{
    boundary_equilibria_two, classify_regime, coexistence_equilibria, delta_thresholds,
    dominance_first, dominance_second, equilibria_bare, invasion_numbers_delta, r0_bare,
    reproduction_numbers_two, EquilibriumKind, EquilibriumReport, RegimeReport, Stability,
    Threshold,
};
use exclusion_core::integrator::{
    integrate_bare, integrate_two, invariant_region_check, Trajectory,
};
use exclusion_core::lyapunov::{
    cross_endemic_conditions, decrease_check, CrossConditions, Dominant, LyapunovSpec,
};
use exclusion_core::model::{ModelParams, State};
use exclusion_core::rng::{sample_in_region, SplitMix64};

use crate::quantities::{parse_record_list, ParamPath};
use crate::render::{equilibrium_table, fmt_f64, fmt_short, kind_name, stability_name, threshold_line};
use crate::scenario::Scenario;
use crate::{CliError, Format};

/// Convergence tolerance used by verification runs.
const VERIFY_TOL: f64 = 1e-6;

fn model_name(p: &ModelParams) -> &'static str {
    if p.is_two_ideology() {
        "two_ideology"
    } else {
        "bare_bones"
    }
}

/// Write `content` to `output` when given, otherwise to stdout.
/// Returns true when a file was written.
fn emit(output: Option<&Path>, content: &str) -> Result<bool, CliError> {
    match output {
        Some(path) => {
            std::fs::write(path, content)?;
            Ok(true)
        }
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
            Ok(false)
        }
    }
}

fn numerical<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Numerical(e.to_string())
}

// ---------------------------------------------------------------- analyze

#[derive(Serialize)]
struct AnalyzeReport {
    model: &'static str,
    lambda: f64,
    mu: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    regime: Option<RegimeReport>,
    equilibria: Vec<EquilibriumReport>,
}

fn build_analyze(p: &ModelParams) -> Result<AnalyzeReport, CliError> {
    if p.is_two_ideology() {
        let regime = classify_regime(p);
        let mut equilibria = boundary_equilibria_two(p).map_err(numerical)?;
        equilibria.extend(coexistence_equilibria(p).map_err(numerical)?);
        Ok(AnalyzeReport {
            model: model_name(p),
            lambda: p.lambda,
            mu: p.mu,
            delta: Some(p.delta),
            r0: None,
            regime: Some(regime),
            equilibria,
        })
    } else {
        Ok(AnalyzeReport {
            model: model_name(p),
            lambda: p.lambda,
            mu: p.mu,
            delta: None,
            r0: Some(r0_bare(p)),
            regime: None,
            equilibria: equilibria_bare(p).map_err(numerical)?,
        })
    }
}

fn render_analyze_text(p: &ModelParams, rep: &AnalyzeReport) -> String {
    let mut out = String::new();
    match &rep.regime {
        None => {
            out.push_str(&format!(
                "model: bare_bones (lambda = {}, mu = {})\n",
                fmt_short(p.lambda),
                fmt_short(p.mu)
            ));
            out.push_str(&format!("R0 = {}\n", fmt_short(rep.r0.unwrap())));
        }
        Some(r) => {
            out.push_str(&format!(
                "model: two_ideology (lambda = {}, mu = {}, delta = {})\n",
                fmt_short(p.lambda),
                fmt_short(p.mu),
                fmt_short(p.delta)
            ));
            out.push_str(&format!(
                "R1 = {}   R2 = {}\n",
                fmt_short(r.r1),
                fmt_short(r.r2)
            ));
            let fmt_opt = |v: Option<f64>| match v {
                Some(v) => fmt_short(v),
                None => "undefined".into(),
            };
            out.push_str(&format!(
                "I1(delta) = {}   I2(delta) = {}\n",
                fmt_opt(r.i1_delta),
                fmt_opt(r.i2_delta)
            ));
            out.push_str(&format!("delta*  = {}\n", threshold_line(&r.delta_star)));
            out.push_str(&format!("delta** = {}\n", threshold_line(&r.delta_star_star)));
            if let Some(s) = r.sigma {
                out.push_str(&format!("sigma   = {}\n", fmt_short(s)));
            }
            out.push_str(&format!(
                "regime: {:?}{}\n",
                r.label,
                if r.degenerate {
                    " (degenerate: on a classification boundary)"
                } else {
                    ""
                }
            ));
        }
    }
    out.push_str("equilibria:\n");
    out.push_str(&equilibrium_table(p, &rep.equilibria));
    out
}

pub fn analyze(
    scenario: &Scenario,
    output: Option<&Path>,
    format: Format,
) -> Result<(), CliError> {
    let rep = build_analyze(&scenario.params)?;
    let json = serde_json::to_string_pretty(&rep).expect("report serializes");
    if let Some(path) = output {
        std::fs::write(path, format!("{json}\n"))?;
    }
    match format {
        Format::Json => println!("{json}"),
        Format::Text => print!("{}", render_analyze_text(&scenario.params, &rep)),
    }
    Ok(())
}

// --------------------------------------------------------------- simulate

enum AnyTrajectory {
    Bare(Trajectory<3>),
    Two(Trajectory<5>),
}

fn run_trajectory(scenario: &Scenario, t_end: f64) -> Result<AnyTrajectory, CliError> {
    let p = &scenario.params;
    Ok(match &scenario.initial {
        State::Bare(x0) => AnyTrajectory::Bare(
            integrate_bare(p, *x0, (0.0, t_end), &scenario.config).map_err(numerical)?,
        ),
        State::Two(x0) => AnyTrajectory::Two(
            integrate_two(p, *x0, (0.0, t_end), &scenario.config).map_err(numerical)?,
        ),
    })
}

fn trajectory_csv(traj: &AnyTrajectory) -> String {
    let mut out = String::new();
    match traj {
        AnyTrajectory::Bare(t) => {
            out.push_str("t,S,E,R\n");
            for (time, x) in t.times.iter().zip(&t.states) {
                out.push_str(&fmt_f64(*time));
                for c in x {
                    out.push(',');
                    out.push_str(&fmt_f64(*c));
                }
                out.push('\n');
            }
        }
        AnyTrajectory::Two(t) => {
            out.push_str("t,S,E1,R1,E2,R2\n");
            for (time, x) in t.times.iter().zip(&t.states) {
                out.push_str(&fmt_f64(*time));
                for c in x {
                    out.push(',');
                    out.push_str(&fmt_f64(*c));
                }
                out.push('\n');
            }
        }
    }
    out
}

fn nearest_equilibrium(p: &ModelParams, x: &[f64]) -> Option<(String, f64)> {
    let eqs: Vec<EquilibriumReport> = if p.is_two_ideology() {
        let mut eqs = boundary_equilibria_two(p).ok()?;
        if let Ok(coex) = coexistence_equilibria(p) {
            eqs.extend(coex);
        }
        eqs
    } else {
        equilibria_bare(p).ok()?
    };
    eqs.into_iter()
        .map(|eq| {
            let d = eq
                .state
                .components()
                .iter()
                .zip(x)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0_f64, f64::max);
            (kind_name(eq.kind).to_string(), d)
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

pub fn simulate(scenario: &Scenario, t_end: f64, output: Option<&Path>) -> Result<(), CliError> {
    if !(t_end >= 0.0) {
        return Err(CliError::Validation("t-end must be nonnegative".into()));
    }
    let traj = run_trajectory(scenario, t_end)?;
    let csv = trajectory_csv(&traj);
    let wrote_file = emit(output, &csv)?;

    let (final_t, final_state): (f64, Vec<f64>) = match &traj {
        AnyTrajectory::Bare(t) => (t.final_time(), t.final_state().to_vec()),
        AnyTrajectory::Two(t) => (t.final_time(), t.final_state().to_vec()),
    };
    let mut summary = format!(
        "final state at t = {}: [{}]",
        fmt_short(final_t),
        final_state
            .iter()
            .map(|c| fmt_short(*c))
            .collect::<Vec<_>>()
            .join(", ")
    );
    if let Some((kind, dist)) = nearest_equilibrium(&scenario.params, &final_state) {
        summary.push_str(&format!(
            "; nearest equilibrium: {kind} (max-norm distance {dist:.3e})"
        ));
    }
    summary.push('\n');
    if wrote_file {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(())
}

// ------------------------------------------------------------------ sweep

pub fn sweep(
    scenario: &Scenario,
    param: &str,
    from: f64,
    to: f64,
    steps: usize,
    record: &str,
    output: Option<&Path>,
) -> Result<(), CliError> {
    if !(from < to) {
        return Err(CliError::Validation("sweep range requires from < to".into()));
    }
    if steps < 2 {
        return Err(CliError::Validation("sweep requires steps >= 2".into()));
    }
    let path = ParamPath::parse(param, &scenario.params)?;
    let quantities = parse_record_list(record)?;

    let mut csv = String::new();
    csv.push_str(param);
    for q in &quantities {
        csv.push(',');
        csv.push_str(q.name());
    }
    csv.push('\n');

    let mut warnings: Vec<String> = Vec::new();
    let mut successes = 0usize;
    for i in 0..steps {
        let value = from + (to - from) * i as f64 / (steps - 1) as f64;
        csv.push_str(&fmt_f64(value));
        match path.apply(&scenario.params, value) {
            Err(msg) => {
                warnings.push(format!("{param} = {value}: {msg}"));
                for _ in &quantities {
                    csv.push(',');
                }
            }
            Ok(p) => {
                successes += 1;
                for q in &quantities {
                    csv.push(',');
                    match q.evaluate(&p) {
                        Ok(Some(v)) => csv.push_str(&fmt_f64(v)),
                        Ok(None) => {}
                        Err(msg) => {
                            warnings.push(format!("{param} = {value}, {}: {msg}", q.name()));
                        }
                    }
                }
            }
        }
        csv.push('\n');
    }

    emit(output, &csv)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    if successes == 0 {
        return Err(CliError::Numerical("every sweep point failed".into()));
    }
    Ok(())
}

// -------------------------------------------------------------- bifurcate

struct BifurcateRow {
    delta: f64,
    x_star: Option<Stability>,
    x_star_star: Option<Stability>,
    coexistence: Vec<EquilibriumReport>,
}

pub fn bifurcate(
    scenario: &Scenario,
    from: f64,
    to: f64,
    steps: usize,
    output: Option<&Path>,
) -> Result<(), CliError> {
    if !scenario.params.is_two_ideology() {
        return Err(CliError::Validation(
            "bifurcate requires a two-ideology scenario".into(),
        ));
    }
    if !(from < to) || from < 0.0 {
        return Err(CliError::Validation(
            "bifurcate range requires 0 <= from < to".into(),
        ));
    }
    if steps < 2 {
        return Err(CliError::Validation("bifurcate requires steps >= 2".into()));
    }
    let path = ParamPath::parse("delta", &scenario.params)?;

    let mut rows: Vec<BifurcateRow> = Vec::with_capacity(steps);
    let mut warnings: Vec<String> = Vec::new();
    let mut csv = String::from(
        "delta,i1_delta,i2_delta,xstar_stability,xstarstar_stability,\
         coexistence_count,coex_s,coex_e1,coex_r1,coex_e2,coex_r2,coexistence_stability\n",
    );
    let mut successes = 0usize;
    for i in 0..steps {
        let delta = from + (to - from) * i as f64 / (steps - 1) as f64;
        let p = path
            .apply(&scenario.params, delta)
            .map_err(CliError::Validation)?;
        csv.push_str(&fmt_f64(delta));

        let inv = invasion_numbers_delta(&p);
        for v in [inv.i1, inv.i2] {
            csv.push(',');
            if let Some(v) = v {
                csv.push_str(&fmt_f64(v));
            }
        }

        let boundary = match boundary_equilibria_two(&p) {
            Ok(eqs) => eqs,
            Err(e) => {
                warnings.push(format!("delta = {delta}: {e}"));
                csv.push_str(",,,,,,,,,\n");
                continue;
            }
        };
        let stab_of = |kind: EquilibriumKind| {
            boundary
                .iter()
                .find(|eq| eq.kind == kind)
                .map(|eq| eq.stability)
        };
        let x_star = stab_of(EquilibriumKind::Dominance1);
        let x_star_star = stab_of(EquilibriumKind::Dominance2);
        for s in [x_star, x_star_star] {
            csv.push(',');
            if let Some(s) = s {
                csv.push_str(stability_name(s));
            }
        }

        let coexistence = match coexistence_equilibria(&p) {
            Ok(roots) => roots,
            Err(e) => {
                warnings.push(format!("delta = {delta}: {e}"));
                csv.push_str(",,,,,,,\n");
                continue;
            }
        };
        successes += 1;
        csv.push_str(&format!(",{}", coexistence.len()));
        match coexistence.first() {
            Some(eq) => {
                for c in eq.state.components() {
                    csv.push(',');
                    csv.push_str(&fmt_f64(*c));
                }
                csv.push(',');
                csv.push_str(stability_name(eq.stability));
            }
            None => csv.push_str(",,,,,,"),
        }
        csv.push('\n');
        rows.push(BifurcateRow {
            delta,
            x_star,
            x_star_star,
            coexistence,
        });
    }

    emit(output, &csv)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let summary = bifurcate_summary(scenario, &rows, (to - from) / (steps - 1) as f64);
    if output.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    if successes == 0 {
        return Err(CliError::Numerical("every bifurcation point failed".into()));
    }
    Ok(())
}

/// Observed stability/presence transitions compared against the
/// closed-form thresholds, within grid resolution.
fn bifurcate_summary(scenario: &Scenario, rows: &[BifurcateRow], step: f64) -> String {
    let mut out = String::new();
    let th = delta_thresholds(&scenario.params);
    out.push_str(&format!("delta*  = {}\n", threshold_line(&th.delta_star)));
    out.push_str(&format!("delta** = {}\n", threshold_line(&th.delta_star_star)));
    if let Some(sigma) = th.sigma {
        out.push_str(&format!("sigma   = {}\n", fmt_short(sigma)));
    }

    let mut transitions: Vec<(String, f64)> = Vec::new();
    for w in rows.windows(2) {
        let mid = 0.5 * (w[0].delta + w[1].delta);
        if w[0].x_star != w[1].x_star {
            transitions.push(("x* stability".into(), mid));
        }
        if w[0].x_star_star != w[1].x_star_star {
            transitions.push(("x** stability".into(), mid));
        }
        if w[0].coexistence.is_empty() != w[1].coexistence.is_empty() {
            transitions.push(("coexistence presence".into(), mid));
        }
    }
    if transitions.is_empty() {
        out.push_str("no qualitative change across the scanned range\n");
        return out;
    }
    for (what, mid) in transitions {
        let mut line = format!("{what} changes near delta = {}", fmt_short(mid));
        for (name, t) in [("delta*", th.delta_star), ("delta**", th.delta_star_star)] {
            if let Threshold::Crossing(v) = t {
                if (mid - v).abs() <= step {
                    line.push_str(&format!(
                        " (matches {name} = {} within grid resolution)",
                        fmt_short(v)
                    ));
                }
            }
        }
        line.push('\n');
        out.push_str(&line);
    }
    out
}

// ----------------------------------------------------------------- verify

/// What the regime's theorems predict for this parameter set.
struct VerifyPlan {
    description: String,
    /// Expected limit of every admissible trajectory, when a theorem
    /// provides one.
    target: Option<State>,
    certificate: Option<LyapunovSpec>,
    conditions: Option<CrossConditions>,
}

fn verify_plan(p: &ModelParams) -> Result<VerifyPlan, CliError> {
    if !p.is_two_ideology() {
        let r0 = r0_bare(p);
        return Ok(if r0 <= 1.0 {
            VerifyPlan {
                description: format!("R0 = {} <= 1: ideology-free equilibrium attracts", fmt_short(r0)),
                target: Some(State::Bare([p.s0(), 0.0, 0.0])),
                certificate: Some(LyapunovSpec::bare_ideology_free(p)),
                conditions: None,
            }
        } else {
            VerifyPlan {
                description: format!("R0 = {} > 1: endemic equilibrium attracts", fmt_short(r0)),
                target: Some(State::Bare(
                    exclusion_core::analysis::endemic_state(p.lambda, p.mu, &p.ideology1).unwrap(),
                )),
                certificate: Some(LyapunovSpec::bare_endemic(p).map_err(numerical)?),
                conditions: None,
            }
        });
    }

    let (r1, r2) = reproduction_numbers_two(p);
    if p.delta == 0.0 {
        if r1 <= 1.0 && r2 <= 1.0 {
            return Ok(VerifyPlan {
                description: format!(
                    "R1 = {}, R2 = {} <= 1: ideology-free equilibrium attracts",
                    fmt_short(r1),
                    fmt_short(r2)
                ),
                target: Some(State::Two([p.s0(), 0.0, 0.0, 0.0, 0.0])),
                certificate: Some(LyapunovSpec::two_ideology_free(p)),
                conditions: None,
            });
        }
        if r1 > r2.max(1.0) {
            return Ok(VerifyPlan {
                description: format!(
                    "R1 = {} > max(1, R2 = {}): ideology one excludes ideology two",
                    fmt_short(r1),
                    fmt_short(r2)
                ),
                target: Some(State::Two(dominance_first(p).unwrap())),
                certificate: Some(LyapunovSpec::two_endemic(p, Dominant::First).map_err(numerical)?),
                conditions: None,
            });
        }
        if r2 > r1.max(1.0) {
            return Ok(VerifyPlan {
                description: format!(
                    "R2 = {} > max(1, R1 = {}): ideology two excludes ideology one",
                    fmt_short(r2),
                    fmt_short(r1)
                ),
                target: Some(State::Two(dominance_second(p).unwrap())),
                certificate: Some(
                    LyapunovSpec::two_endemic(p, Dominant::Second).map_err(numerical)?,
                ),
                conditions: None,
            });
        }
        return Ok(VerifyPlan {
            description: "R1 = R2: degenerate tie, no theorem-backed target".into(),
            target: None,
            certificate: None,
            conditions: None,
        });
    }

    // delta > 0: the cross-interaction theorems.
    if r1 <= 1.0 && r2 <= 1.0 {
        return Ok(VerifyPlan {
            description: format!(
                "R1 = {}, R2 = {} <= 1 with conversion: ideology-free equilibrium attracts",
                fmt_short(r1),
                fmt_short(r2)
            ),
            target: Some(State::Two([p.s0(), 0.0, 0.0, 0.0, 0.0])),
            certificate: Some(LyapunovSpec::cross_ideology_free(p)),
            conditions: None,
        });
    }
    let cond = cross_endemic_conditions(p);
    if cond.dominance && (cond.strict_weights || cond.relaxed_weights) {
        return Ok(VerifyPlan {
            description: format!(
                "R2 = {} > max(1, R1 = {}) with {} weight condition: ideology-two dominance attracts",
                fmt_short(r2),
                fmt_short(r1),
                if cond.strict_weights { "strict" } else { "relaxed" }
            ),
            target: Some(State::Two(dominance_second(p).unwrap())),
            certificate: Some(LyapunovSpec::cross_endemic(p).map_err(numerical)?),
            conditions: Some(cond),
        });
    }
    Ok(VerifyPlan {
        description:
            "no global-stability theorem applies here; checking invariant region only".into(),
        target: None,
        certificate: None,
        conditions: Some(cond),
    })
}

#[derive(Serialize)]
struct VerifyReport {
    model: &'static str,
    regime: String,
    trials: usize,
    seed: u64,
    t_end: f64,
    invariant_region_ok: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    converged: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate_nonincreasing: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    conditions: Option<CrossConditions>,
    failures: Vec<String>,
    pass: bool,
}

pub fn verify(
    scenario: &Scenario,
    trials: usize,
    seed_flag: Option<u64>,
    t_end: f64,
    output: Option<&Path>,
) -> Result<(), CliError> {
    if trials == 0 {
        return Err(CliError::Validation("trials must be >= 1".into()));
    }
    let p = &scenario.params;
    let plan = verify_plan(p)?;
    let seed = seed_flag.unwrap_or(scenario.seed);
    let mut rng = SplitMix64::new(seed);

    let mut invariant_ok = 0usize;
    let mut converged = plan.target.as_ref().map(|_| 0usize);
    let mut decreasing = plan.certificate.as_ref().map(|_| 0usize);
    let mut failures: Vec<String> = Vec::new();

    for trial in 0..trials {
        if p.is_two_ideology() {
            let x0: [f64; 5] = sample_in_region(&mut rng, p.s0());
            match integrate_two(p, x0, (0.0, t_end), &scenario.config) {
                Err(e) => failures.push(format!("trial {trial}: integration failed: {e}")),
                Ok(traj) => run_checks(
                    trial,
                    p,
                    &plan,
                    &traj,
                    &mut invariant_ok,
                    &mut converged,
                    &mut decreasing,
                    &mut failures,
                ),
            }
        } else {
            let x0: [f64; 3] = sample_in_region(&mut rng, p.s0());
            match integrate_bare(p, x0, (0.0, t_end), &scenario.config) {
                Err(e) => failures.push(format!("trial {trial}: integration failed: {e}")),
                Ok(traj) => run_checks(
                    trial,
                    p,
                    &plan,
                    &traj,
                    &mut invariant_ok,
                    &mut converged,
                    &mut decreasing,
                    &mut failures,
                ),
            }
        }
    }

    let pass = failures.is_empty();
    let report = VerifyReport {
        model: model_name(p),
        regime: plan.description.clone(),
        trials,
        seed,
        t_end,
        invariant_region_ok: invariant_ok,
        converged,
        certificate_nonincreasing: decreasing,
        conditions: plan.conditions,
        failures: failures.clone(),
        pass,
    };
    if let Some(path) = output {
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        std::fs::write(path, format!("{json}\n"))?;
    }

    println!("regime: {}", plan.description);
    println!("trials: {trials} (seed {seed}, t_end {t_end})");
    println!("invariant region: {invariant_ok}/{trials} ok");
    if let Some(c) = converged {
        println!("converged to target within {VERIFY_TOL:.0e}: {c}/{trials}");
    }
    if let Some(d) = decreasing {
        println!("certificate nonincreasing: {d}/{trials}");
    }
    if let Some(cond) = &plan.conditions {
        println!(
            "dominance-theorem hypotheses: R2 > max(1, R1) = {}, strict weights = {}, relaxed weights = {}",
            cond.dominance, cond.strict_weights, cond.relaxed_weights
        );
    }
    if pass {
        println!("verify: PASS");
        Ok(())
    } else {
        for f in failures.iter().take(10) {
            println!("failure: {f}");
        }
        if failures.len() > 10 {
            println!("... and {} more", failures.len() - 10);
        }
        println!("verify: FAIL");
        Err(CliError::VerificationFailed(format!(
            "{} of {trials} trials failed",
            failures.len()
        )))
    }
}

#[allow(clippy::too_many_arguments)]
fn run_checks<const N: usize>(
    trial: usize,
    p: &ModelParams,
    plan: &VerifyPlan,
    traj: &Trajectory<N>,
    invariant_ok: &mut usize,
    converged: &mut Option<usize>,
    decreasing: &mut Option<usize>,
    failures: &mut Vec<String>,
) {
    let inv = invariant_region_check(traj, p);
    if inv.pass {
        *invariant_ok += 1;
    } else {
        failures.push(format!(
            "trial {trial}: invariant region violated (worst component {:.2e}, region excess {:.2e}, attraction excess {:.2e})",
            inv.worst_component, inv.region_excess, inv.attraction_excess
        ));
    }
    if let (Some(target), Some(count)) = (&plan.target, converged.as_mut()) {
        let dist = traj
            .final_state()
            .iter()
            .zip(target.components())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        if dist <= VERIFY_TOL {
            *count += 1;
        } else {
            failures.push(format!(
                "trial {trial}: final state {dist:.2e} from target (tolerance {VERIFY_TOL:.0e})"
            ));
        }
    }
    if let (Some(spec), Some(count)) = (&plan.certificate, decreasing.as_mut()) {
        match decrease_check(spec, traj) {
            Ok(rep) if rep.pass => *count += 1,
            Ok(rep) => failures.push(format!(
                "trial {trial}: certificate increased by {:.2e} per step",
                rep.max_scaled_increase
            )),
            Err(e) => failures.push(format!("trial {trial}: certificate evaluation failed: {e}")),
        }
    }
}
