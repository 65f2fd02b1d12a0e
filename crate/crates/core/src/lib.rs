//! Dynamics of competing ideologies in a recruitment-driven population.
//!
//! The population is split into susceptibles, extremists and recruiters
//! (per ideology). This crate provides the model right-hand sides and
//! Jacobians, closed-form equilibria, reproduction and invasion numbers,
//! the cross-interaction bifurcation thresholds, Lyapunov-function
//! certificates, and an adaptive Runge-Kutta integrator with
//! trajectory-level checks, so every stability claim can be exercised
//! numerically.

pub mod analysis;
pub mod integrator;
pub mod linalg;
pub mod lyapunov;
pub mod model;
pub mod rng;

pub use analysis::{
    classify_regime, coexistence_equilibria, delta_thresholds, equilibria_bare,
    invasion_numbers_delta, local_stability, r0_bare, reproduction_numbers_two,
    EquilibriumKind, EquilibriumReport, RegimeLabel, RegimeReport, Stability, Threshold,
};
pub use integrator::{
    convergence_check, integrate_bare, integrate_two, invariant_region_check, IntegratorConfig,
    Trajectory,
};
pub use model::{IdeologyParams, ModelParams, State, ValidationError};
