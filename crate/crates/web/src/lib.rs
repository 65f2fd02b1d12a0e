//! wasm-bindgen surface for the browser demo.
//!
//! Three operations, all JSON-in/JSON-out so the page stays a single
//! static file: `analyze` (closed-form numbers, equilibria, regime),
//! `simulate` (one trajectory as plottable columns) and `invasion_sweep`
//! (invasion numbers and the coexistence branch over a delta grid).
//!
//! Parameter payload:
//! `{"lambda": .., "mu": .., "ideology1": {beta, d_e, d_r, c_e, c_r, q_e},
//!   "ideology2": {..}?, "delta": ..?, "initial": [..]?}`.

use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::wasm_bindgen;

use exclusion_core::analysis::{
    boundary_equilibria_two, classify_regime, coexistence_equilibria, delta_thresholds,
    equilibria_bare, invasion_numbers_delta, r0_bare, EquilibriumKind, EquilibriumReport,
    RegimeReport, Stability, Threshold,
};
use exclusion_core::integrator::{integrate_bare, integrate_two, IntegratorConfig};
use exclusion_core::model::{IdeologyParams, ModelParams, State};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WebIdeology {
    beta: f64,
    d_e: f64,
    d_r: f64,
    c_e: f64,
    c_r: f64,
    q_e: f64,
}

impl WebIdeology {
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

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WebParams {
    lambda: f64,
    mu: f64,
    ideology1: WebIdeology,
    #[serde(default)]
    ideology2: Option<WebIdeology>,
    #[serde(default)]
    delta: Option<f64>,
    #[serde(default)]
    initial: Option<Vec<f64>>,
}

struct Parsed {
    params: ModelParams,
    initial: State,
}

fn parse_params(json: &str) -> Result<Parsed, String> {
    let raw: WebParams = serde_json::from_str(json).map_err(|e| e.to_string())?;
    let params = match raw.ideology2 {
        Some(second) => ModelParams::two_ideology(
            raw.lambda,
            raw.mu,
            raw.ideology1.into_params(),
            second.into_params(),
            raw.delta.unwrap_or(0.0),
        ),
        None => {
            if raw.delta.is_some() {
                return Err("delta requires ideology2".into());
            }
            ModelParams::bare(raw.lambda, raw.mu, raw.ideology1.into_params())
        }
    }
    .map_err(|e| e.to_string())?;

    let dim = if params.is_two_ideology() { 5 } else { 3 };
    let initial = match raw.initial {
        None => {
            let s0 = params.s0();
            let seed = 1e-3 * s0;
            if dim == 5 {
                State::Two([s0, seed, seed, seed, seed])
            } else {
                State::Bare([s0, seed, seed])
            }
        }
        Some(v) if v.len() == dim && v.iter().all(|c| c.is_finite() && *c >= 0.0) => {
            if dim == 5 {
                State::Two([v[0], v[1], v[2], v[3], v[4]])
            } else {
                State::Bare([v[0], v[1], v[2]])
            }
        }
        Some(v) => {
            return Err(format!(
                "initial must hold {dim} nonnegative components (got {})",
                v.len()
            ))
        }
    };
    Ok(Parsed { params, initial })
}

#[derive(Serialize)]
struct AnalyzeResponse {
    model: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    r0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    regime: Option<RegimeReport>,
    equilibria: Vec<EquilibriumReport>,
}

pub fn analyze_impl(params_json: &str) -> Result<String, String> {
    let parsed = parse_params(params_json)?;
    let p = &parsed.params;
    let resp = if p.is_two_ideology() {
        let mut equilibria = boundary_equilibria_two(p).map_err(|e| e.to_string())?;
        equilibria.extend(coexistence_equilibria(p).map_err(|e| e.to_string())?);
        AnalyzeResponse {
            model: "two_ideology",
            r0: None,
            regime: Some(classify_regime(p)),
            equilibria,
        }
    } else {
        AnalyzeResponse {
            model: "bare_bones",
            r0: Some(r0_bare(p)),
            regime: None,
            equilibria: equilibria_bare(p).map_err(|e| e.to_string())?,
        }
    };
    Ok(serde_json::to_string(&resp).expect("response serializes"))
}

#[derive(Serialize)]
struct SimulateResponse {
    labels: Vec<&'static str>,
    t: Vec<f64>,
    columns: Vec<Vec<f64>>,
}

pub fn simulate_impl(params_json: &str, t_end: f64, sample_interval: f64) -> Result<String, String> {
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err("t_end must be finite and nonnegative".into());
    }
    let parsed = parse_params(params_json)?;
    let cfg = IntegratorConfig {
        sample_interval: if sample_interval > 0.0 {
            sample_interval
        } else {
            (t_end / 1000.0).max(1e-3)
        },
        ..Default::default()
    };
    let p = &parsed.params;
    let resp = match parsed.initial {
        State::Bare(x0) => {
            let traj = integrate_bare(p, x0, (0.0, t_end), &cfg).map_err(|e| e.to_string())?;
            let mut columns = vec![Vec::with_capacity(traj.times.len()); 3];
            for x in &traj.states {
                for (col, v) in columns.iter_mut().zip(x) {
                    col.push(*v);
                }
            }
            SimulateResponse {
                labels: vec!["S", "E", "R"],
                t: traj.times,
                columns,
            }
        }
        State::Two(x0) => {
            let traj = integrate_two(p, x0, (0.0, t_end), &cfg).map_err(|e| e.to_string())?;
            let mut columns = vec![Vec::with_capacity(traj.times.len()); 5];
            for x in &traj.states {
                for (col, v) in columns.iter_mut().zip(x) {
                    col.push(*v);
                }
            }
            SimulateResponse {
                labels: vec!["S", "E1", "R1", "E2", "R2"],
                t: traj.times,
                columns,
            }
        }
    };
    Ok(serde_json::to_string(&resp).expect("response serializes"))
}

#[derive(Serialize)]
struct SweepResponse {
    delta: Vec<f64>,
    i1: Vec<Option<f64>>,
    i2: Vec<Option<f64>>,
    xstar_stability: Vec<Option<&'static str>>,
    xstarstar_stability: Vec<Option<&'static str>>,
    coexistence_stability: Vec<Option<&'static str>>,
    /// First coexistence root per grid point (5 components), when present.
    coexistence_state: Vec<Option<[f64; 5]>>,
    delta_star: Threshold,
    delta_star_star: Threshold,
    sigma: Option<f64>,
    warnings: Vec<String>,
}

fn stability_str(s: Stability) -> &'static str {
    match s {
        Stability::Stable => "stable",
        Stability::Unstable => "unstable",
        Stability::Marginal => "marginal",
    }
}

pub fn invasion_sweep_impl(
    params_json: &str,
    from: f64,
    to: f64,
    steps: usize,
) -> Result<String, String> {
    let parsed = parse_params(params_json)?;
    let base = parsed.params;
    if !base.is_two_ideology() {
        return Err("invasion sweep requires ideology2".into());
    }
    if !(from < to) || from < 0.0 || steps < 2 || steps > 2000 {
        return Err("sweep requires 0 <= from < to and 2 <= steps <= 2000".into());
    }

    let th = delta_thresholds(&base);
    let mut resp = SweepResponse {
        delta: Vec::with_capacity(steps),
        i1: Vec::with_capacity(steps),
        i2: Vec::with_capacity(steps),
        xstar_stability: Vec::with_capacity(steps),
        xstarstar_stability: Vec::with_capacity(steps),
        coexistence_stability: Vec::with_capacity(steps),
        coexistence_state: Vec::with_capacity(steps),
        delta_star: th.delta_star,
        delta_star_star: th.delta_star_star,
        sigma: th.sigma,
        warnings: Vec::new(),
    };
    for k in 0..steps {
        let delta = from + (to - from) * k as f64 / (steps - 1) as f64;
        let mut p = base;
        p.delta = delta;
        resp.delta.push(delta);
        let inv = invasion_numbers_delta(&p);
        resp.i1.push(inv.i1);
        resp.i2.push(inv.i2);
        match boundary_equilibria_two(&p) {
            Err(e) => {
                resp.warnings.push(format!("delta = {delta}: {e}"));
                resp.xstar_stability.push(None);
                resp.xstarstar_stability.push(None);
            }
            Ok(eqs) => {
                let stab = |kind: EquilibriumKind| {
                    eqs.iter()
                        .find(|eq| eq.kind == kind)
                        .map(|eq| stability_str(eq.stability))
                };
                resp.xstar_stability.push(stab(EquilibriumKind::Dominance1));
                resp.xstarstar_stability.push(stab(EquilibriumKind::Dominance2));
            }
        }
        match coexistence_equilibria(&p) {
            Err(e) => {
                resp.warnings.push(format!("delta = {delta}: {e}"));
                resp.coexistence_stability.push(None);
                resp.coexistence_state.push(None);
            }
            Ok(roots) => match roots.first() {
                Some(eq) => {
                    resp.coexistence_stability
                        .push(Some(stability_str(eq.stability)));
                    let c = eq.state.components();
                    resp.coexistence_state
                        .push(Some([c[0], c[1], c[2], c[3], c[4]]));
                }
                None => {
                    resp.coexistence_stability.push(None);
                    resp.coexistence_state.push(None);
                }
            },
        }
    }
    Ok(serde_json::to_string(&resp).expect("response serializes"))
}

#[wasm_bindgen]
pub fn analyze(params_json: &str) -> Result<String, String> {
    analyze_impl(params_json)
}

#[wasm_bindgen]
pub fn simulate(params_json: &str, t_end: f64, sample_interval: f64) -> Result<String, String> {
    simulate_impl(params_json, t_end, sample_interval)
}

#[wasm_bindgen]
pub fn invasion_sweep(
    params_json: &str,
    from: f64,
    to: f64,
    steps: usize,
) -> Result<String, String> {
    invasion_sweep_impl(params_json, from, to, steps)
}
