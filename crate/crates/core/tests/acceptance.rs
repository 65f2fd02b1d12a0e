//! Acceptance suite: every stability statement the library makes is
//! exercised end to end at desk scale, one test per criterion, each
//! printing a PASS line with the measured quantities (run with
//! `--nocapture` to see them).

use std::time::{Duration, Instant};

use exclusion_core::analysis::{
    boundary_equilibria_two, classify_regime, coexistence_equilibria, delta_thresholds,
    dominance_first, dominance_second, endemic_state, invasion_numbers_delta, ngm_build,
    ngm_matrix, r0_bare, reproduction_numbers_two, CrossTerm, EquilibriumKind, RegimeLabel,
    Stability, Threshold,
};
use exclusion_core::integrator::{
    integrate_bare, integrate_ode, integrate_two, invariant_region_check, IntegratorConfig,
};
use exclusion_core::linalg;
use exclusion_core::lyapunov::{cross_endemic_conditions, decrease_check, Dominant, LyapunovSpec};
use exclusion_core::model::{rhs_bare, rhs_two, IdeologyParams, ModelParams};
use exclusion_core::rng::{sample_in_region, SplitMix64};

fn ideology(beta: f64, d_e: f64, d_r: f64, c_e: f64, c_r: f64, q_e: f64) -> IdeologyParams {
    IdeologyParams {
        beta,
        d_e,
        d_r,
        c_e,
        c_r,
        q_e,
    }
}

/// Reference single-ideology parameter set used throughout the tests
/// (R0 = 2.5142857...).
fn baseline(beta: f64) -> IdeologyParams {
    ideology(beta, 0.2, 0.3, 0.1, 0.05, 0.6)
}

fn bare(beta: f64) -> ModelParams {
    ModelParams::bare(1.0, 0.1, baseline(beta)).unwrap()
}

fn two(beta1: f64, beta2: f64, delta: f64) -> ModelParams {
    ModelParams::two_ideology(1.0, 0.1, baseline(beta1), baseline(beta2), delta).unwrap()
}

fn random_ideology(rng: &mut SplitMix64) -> IdeologyParams {
    ideology(
        rng.uniform(0.01, 1.0),
        rng.uniform(0.01, 1.0),
        rng.uniform(0.01, 1.0),
        rng.uniform(0.005, 1.0),
        rng.uniform(0.005, 1.0),
        rng.uniform(0.0, 1.0),
    )
}

fn random_bare(rng: &mut SplitMix64) -> ModelParams {
    ModelParams::bare(
        rng.uniform(0.2, 20.0),
        rng.uniform(0.02, 0.5),
        random_ideology(rng),
    )
    .unwrap()
}

fn long_run() -> IntegratorConfig {
    IntegratorConfig::default()
}

const T_END: f64 = 5000.0;
const CONV_TOL: f64 = 1e-6;

/// Max-norm distance of the trajectory endpoint from a target state.
fn final_distance<const N: usize>(
    traj: &exclusion_core::integrator::Trajectory<N>,
    target: &[f64; N],
) -> f64 {
    traj.final_state()
        .iter()
        .zip(target)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0_f64, f64::max)
}

#[test]
fn criterion_01_closed_form_r0_equals_ngm_oracle() {
    let start = Instant::now();
    let mut rng = SplitMix64::new(101);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let p = random_bare(&mut rng);
        let r0 = r0_bare(&p);
        let (f, v) = ngm_build(&p.ideology1, p.mu, p.s0(), CrossTerm::None);
        let rho = linalg::spectral_radius(&ngm_matrix(&f, &v).unwrap()).unwrap();
        let rel = (r0 - rho).abs() / r0;
        worst = worst.max(rel);
        assert!(rel <= 1e-10, "relative gap {rel} for {p:?}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    println!(
        "ACCEPTANCE 01 closed-form R0 vs NGM oracle: PASS (1000 sets, worst rel {worst:.2e}, {elapsed:?})"
    );
}

#[test]
fn criterion_02_equilibrium_residuals() {
    let start = Instant::now();
    let mut rng = SplitMix64::new(202);
    let mut checked_bare = 0;
    let mut worst: f64 = 0.0;
    while checked_bare < 1000 {
        let p = random_bare(&mut rng);
        let Some(xs) = endemic_state(p.lambda, p.mu, &p.ideology1) else {
            continue;
        };
        checked_bare += 1;
        let res = rhs_bare(&p, &xs)
            .iter()
            .fold(0.0_f64, |m, v| m.max(v.abs()));
        let bound = 1e-10 * p.lambda.max(1.0);
        worst = worst.max(res / bound);
        assert!(res <= bound, "bare residual {res} vs bound {bound}");
    }
    // Dominance equilibria of the two-ideology model at arbitrary delta.
    let mut checked_two = 0;
    while checked_two < 1000 {
        let lambda = rng.uniform(0.2, 20.0);
        let mu = rng.uniform(0.02, 0.5);
        let i1 = random_ideology(&mut rng);
        let i2 = random_ideology(&mut rng);
        let delta = rng.uniform(0.0, 5.0);
        let p = ModelParams::two_ideology(lambda, mu, i1, i2, delta).unwrap();
        let bound = 1e-10 * lambda.max(1.0);
        let mut any = false;
        for x in [dominance_first(&p), dominance_second(&p)].into_iter().flatten() {
            any = true;
            let res = rhs_two(&p, &x)
                .iter()
                .fold(0.0_f64, |m, v| m.max(v.abs()));
            worst = worst.max(res / bound);
            assert!(res <= bound, "dominance residual {res} vs bound {bound}");
        }
        if any {
            checked_two += 1;
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    println!(
        "ACCEPTANCE 02 equilibrium residuals: PASS (1000 bare + 1000 two-ideology sets, worst residual at {worst:.2e} of bound, {elapsed:?})"
    );
}

#[test]
fn criterion_03_global_stability_of_ideology_free_point() {
    let start = Instant::now();
    let p = bare(0.05);
    assert!(r0_bare(&p) <= 1.0);
    let target = [p.s0(), 0.0, 0.0];
    let spec = LyapunovSpec::bare_ideology_free(&p);
    let mut rng = SplitMix64::new(303);
    for trial in 0..100 {
        let x0: [f64; 3] = sample_in_region(&mut rng, p.s0());
        let traj = integrate_bare(&p, x0, (0.0, T_END), &long_run()).unwrap();
        let dist = final_distance(&traj, &target);
        assert!(dist <= CONV_TOL, "trial {trial} from {x0:?} ended {dist:.2e} away");
        let dec = decrease_check(&spec, &traj).unwrap();
        assert!(
            dec.pass,
            "trial {trial}: certificate increased by {:.2e}",
            dec.max_scaled_increase
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    println!(
        "ACCEPTANCE 03 ideology-free GAS (R0 <= 1): PASS (100/100 converged, certificate nonincreasing, {elapsed:?})"
    );
}

#[test]
fn criterion_04_global_stability_of_endemic_point() {
    let start = Instant::now();
    let p = bare(0.2);
    assert!(r0_bare(&p) > 1.0);
    let target = endemic_state(p.lambda, p.mu, &p.ideology1).unwrap();
    let spec = LyapunovSpec::bare_endemic(&p).unwrap();
    let mut rng = SplitMix64::new(404);
    for trial in 0..100 {
        let x0: [f64; 3] = sample_in_region(&mut rng, p.s0());
        let traj = integrate_bare(&p, x0, (0.0, T_END), &long_run()).unwrap();
        let dist = final_distance(&traj, &target);
        assert!(dist <= CONV_TOL, "trial {trial} from {x0:?} ended {dist:.2e} away");
        let dec = decrease_check(&spec, &traj).unwrap();
        assert!(
            dec.pass,
            "trial {trial}: certificate increased by {:.2e}",
            dec.max_scaled_increase
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    println!(
        "ACCEPTANCE 04 endemic GAS (R0 > 1): PASS (100/100 converged, certificate nonincreasing, {elapsed:?})"
    );
}

#[test]
fn criterion_05_competitive_exclusion_without_conversion() {
    let start = Instant::now();
    // Ideology one dominant.
    let p = two(0.2, 0.1, 0.0);
    let (r1, r2) = reproduction_numbers_two(&p);
    assert!(r1 > r2.max(1.0));
    let target = dominance_first(&p).unwrap();
    let spec = LyapunovSpec::two_endemic(&p, Dominant::First).unwrap();
    let mut rng = SplitMix64::new(505);
    for trial in 0..50 {
        let x0: [f64; 5] = sample_in_region(&mut rng, p.s0());
        let traj = integrate_two(&p, x0, (0.0, T_END), &long_run()).unwrap();
        let dist = final_distance(&traj, &target);
        assert!(dist <= CONV_TOL, "trial {trial} ended {dist:.2e} from x*");
        let fin = traj.final_state();
        assert!(fin[3] < 1e-6 && fin[4] < 1e-6, "ideology two survived: {fin:?}");
        let dec = decrease_check(&spec, &traj).unwrap();
        assert!(dec.pass, "trial {trial}: certificate increased");
    }
    // Mirrored: ideology two dominant.
    let p = two(0.1, 0.2, 0.0);
    let target = dominance_second(&p).unwrap();
    let spec = LyapunovSpec::two_endemic(&p, Dominant::Second).unwrap();
    for trial in 0..50 {
        let x0: [f64; 5] = sample_in_region(&mut rng, p.s0());
        let traj = integrate_two(&p, x0, (0.0, T_END), &long_run()).unwrap();
        let dist = final_distance(&traj, &target);
        assert!(dist <= CONV_TOL, "mirrored trial {trial} ended {dist:.2e} from x**");
        let fin = traj.final_state();
        assert!(fin[1] < 1e-6 && fin[2] < 1e-6, "ideology one survived: {fin:?}");
        let dec = decrease_check(&spec, &traj).unwrap();
        assert!(dec.pass, "mirrored trial {trial}: certificate increased");
    }
    let elapsed = start.elapsed();
    println!(
        "ACCEPTANCE 05 competitive exclusion at delta = 0: PASS (50 + 50 mirrored trials, {elapsed:?})"
    );
}

#[test]
fn criterion_06_invasion_number_identities_and_monotonicity() {
    // Identities at delta = 0.
    let p0 = two(0.2, 0.1, 0.0);
    let (r1, r2) = reproduction_numbers_two(&p0);
    let inv0 = invasion_numbers_delta(&p0);
    let (i1_0, i2_0) = (inv0.i1.unwrap(), inv0.i2.unwrap());
    assert!((i2_0 - r2 / r1).abs() <= 1e-12 * (r2 / r1));
    assert!((i1_0 - r1 / r2).abs() <= 1e-12 * (r1 / r2));

    // Strict monotonicity and the ratio bounds over a 50-point grid.
    let mut prev_i1 = f64::INFINITY;
    let mut prev_i2 = f64::NEG_INFINITY;
    for k in 0..50 {
        let delta = 5.0 * k as f64 / 49.0;
        let inv = invasion_numbers_delta(&two(0.2, 0.1, delta));
        let (i1, i2) = (inv.i1.unwrap(), inv.i2.unwrap());
        assert!(i2 > prev_i2 - 1e-14, "I2 not increasing at delta {delta}");
        assert!(i1 < prev_i1 + 1e-14, "I1 not decreasing at delta {delta}");
        if delta > 0.0 {
            assert!(i2 > r2 / r1, "I2 bound violated at delta {delta}");
            assert!(i1 < r1 / r2, "I1 bound violated at delta {delta}");
        }
        prev_i1 = i1;
        prev_i2 = i2;
    }
    println!(
        "ACCEPTANCE 06 invasion-number identities, monotonicity, bounds: PASS (I1(0) = {i1_0}, I2(0) = {i2_0}, 50-point grid)"
    );
}

#[test]
fn criterion_07_thresholds_drive_invasion_numbers_to_one() {
    let mut rng = SplitMix64::new(707);
    let mut crossings = 0;
    let mut worst: f64 = 0.0;
    // Fixed fixtures with both thresholds positive, then a random scan.
    let mut cases: Vec<(IdeologyParams, IdeologyParams)> = vec![
        (case2b().0, case2b().1),
        (case2c().0, case2c().1),
        (baseline(0.2), baseline(0.1)),
    ];
    for _ in 0..300 {
        cases.push((random_ideology(&mut rng), random_ideology(&mut rng)));
    }
    for (i1, i2) in cases {
        let p0 = ModelParams::two_ideology(1.0, 0.1, i1, i2, 0.0).unwrap();
        let th = delta_thresholds(&p0);
        if let Threshold::Crossing(ds) = th.delta_star {
            let p = ModelParams::two_ideology(1.0, 0.1, i1, i2, ds).unwrap();
            let i2v = invasion_numbers_delta(&p).i2.unwrap();
            worst = worst.max((i2v - 1.0).abs());
            assert!((i2v - 1.0).abs() <= 1e-9, "I2(delta*) = {i2v}");
            crossings += 1;
        }
        if let Threshold::Crossing(dss) = th.delta_star_star {
            let p = ModelParams::two_ideology(1.0, 0.1, i1, i2, dss).unwrap();
            let i1v = invasion_numbers_delta(&p).i1.unwrap();
            worst = worst.max((i1v - 1.0).abs());
            assert!((i1v - 1.0).abs() <= 1e-9, "I1(delta**) = {i1v}");
            crossings += 1;
        }
    }
    assert!(crossings > 50, "scan produced too few crossings ({crossings})");
    println!(
        "ACCEPTANCE 07 threshold correctness: PASS ({crossings} crossings checked, worst |I - 1| = {worst:.2e})"
    );
}

// Fixtures for the regime taxonomy; reproduction numbers and threshold
// ordering were chosen by construction and are re-verified inside the test.
fn case2a() -> (IdeologyParams, IdeologyParams) {
    (baseline(0.2), baseline(0.1))
}

fn case2b() -> (IdeologyParams, IdeologyParams) {
    (
        ideology(0.24, 0.26, 0.21, 0.30, 0.26, 0.42),
        ideology(0.37, 0.50, 0.41, 0.18, 0.47, 0.14),
    )
}

fn case2c() -> (IdeologyParams, IdeologyParams) {
    (
        ideology(0.39, 0.14, 0.56, 0.30, 0.17, 0.89),
        ideology(0.12, 0.33, 0.10, 0.48, 0.29, 0.77),
    )
}

/// Expected picture at one sampled delta.
struct Expect {
    delta: f64,
    x_star: Option<Stability>,
    x_star_star: Option<Stability>,
    coexistence: Option<Stability>,
}

fn expect(
    delta: f64,
    x_star: Option<Stability>,
    x_star_star: Option<Stability>,
    coexistence: Option<Stability>,
) -> Expect {
    Expect {
        delta,
        x_star,
        x_star_star,
        coexistence,
    }
}

fn check_fixture(
    name: &str,
    i1: IdeologyParams,
    i2: IdeologyParams,
    label: RegimeLabel,
    expectations: &[Expect],
) {
    use Stability::{Stable, Unstable};
    for e in expectations {
        let p = ModelParams::two_ideology(1.0, 0.1, i1, i2, e.delta).unwrap();
        let rep = classify_regime(&p);
        assert_eq!(rep.label, label, "{name}: label at delta {}", e.delta);

        let eqs = boundary_equilibria_two(&p).unwrap();
        let stab_of = |kind: EquilibriumKind| {
            eqs.iter()
                .find(|eq| eq.kind == kind)
                .map(|eq| eq.stability)
        };
        assert_eq!(
            stab_of(EquilibriumKind::Dominance1),
            e.x_star,
            "{name}: x* at delta {}",
            e.delta
        );
        assert_eq!(
            stab_of(EquilibriumKind::Dominance2),
            e.x_star_star,
            "{name}: x** at delta {}",
            e.delta
        );

        // Eigenvalue stability must agree with the invasion-number
        // criterion wherever the dominance equilibrium exists.
        if let Some(s) = e.x_star {
            let i2v = rep.i2_delta.unwrap();
            assert_eq!(s == Stable, i2v < 1.0, "{name}: x* vs I2 at {}", e.delta);
            assert_eq!(s == Unstable, i2v > 1.0, "{name}: x* vs I2 at {}", e.delta);
        }
        if let Some(s) = e.x_star_star {
            let i1v = rep.i1_delta.unwrap();
            assert_eq!(s == Stable, i1v < 1.0, "{name}: x** vs I1 at {}", e.delta);
            assert_eq!(s == Unstable, i1v > 1.0, "{name}: x** vs I1 at {}", e.delta);
        }

        let coex = coexistence_equilibria(&p).unwrap();
        match e.coexistence {
            None => assert!(
                coex.is_empty(),
                "{name}: unexpected coexistence at delta {}: {coex:?}",
                e.delta
            ),
            Some(want) => {
                assert_eq!(coex.len(), 1, "{name}: coexistence count at {}", e.delta);
                assert_eq!(
                    coex[0].stability, want,
                    "{name}: coexistence stability at {}",
                    e.delta
                );
                assert!(coex[0].residual <= 1e-10);
                // Interior roots live strictly inside the invariant region.
                assert!(coex[0].state.components().iter().all(|&c| c > 0.0));
                assert!(coex[0].state.total() < p.s0(), "{name}: outside region");
            }
        }
    }
}

#[test]
fn criterion_08_regime_taxonomy() {
    use Stability::{Stable, Unstable};

    // Situation 1: 1 < R1 < R2.
    check_fixture(
        "Situation1",
        baseline(0.2),
        baseline(0.3),
        RegimeLabel::Situation1,
        &[
            expect(0.5, Some(Unstable), Some(Stable), None),
            expect(3.0, Some(Unstable), Some(Stable), None),
        ],
    );

    // Case 2A: 1 < R2 < R1 and delta** < 0.
    let (a1, a2) = case2a();
    let th = delta_thresholds(&ModelParams::two_ideology(1.0, 0.1, a1, a2, 0.0).unwrap());
    let ds = match th.delta_star {
        Threshold::Crossing(v) => v,
        other => panic!("2A delta*: {other:?}"),
    };
    assert!(matches!(th.delta_star_star, Threshold::NonPositive(v) if v < 0.0));
    check_fixture(
        "Case2A",
        a1,
        a2,
        RegimeLabel::Situation2A,
        &[
            expect(0.5 * ds, Some(Stable), Some(Unstable), None),
            expect(2.0 * ds, Some(Unstable), Some(Unstable), Some(Stable)),
        ],
    );

    // Case 2B: 0 < delta** < delta* (bistability window, unstable interior point).
    let (b1, b2) = case2b();
    let th = delta_thresholds(&ModelParams::two_ideology(1.0, 0.1, b1, b2, 0.0).unwrap());
    let (ds, dss) = match (th.delta_star, th.delta_star_star) {
        (Threshold::Crossing(a), Threshold::Crossing(b)) => (a, b),
        other => panic!("2B thresholds: {other:?}"),
    };
    assert!(0.0 < dss && dss < ds);
    check_fixture(
        "Case2B",
        b1,
        b2,
        RegimeLabel::Situation2B,
        &[
            expect(0.5 * dss, Some(Stable), Some(Unstable), None),
            expect(0.5 * (dss + ds), Some(Stable), Some(Stable), Some(Unstable)),
            expect(ds + 0.5 * (ds - dss), Some(Unstable), Some(Stable), None),
        ],
    );

    // Case 2C: 0 < delta* < delta** (both unstable inside, stable interior point).
    let (c1, c2) = case2c();
    let th = delta_thresholds(&ModelParams::two_ideology(1.0, 0.1, c1, c2, 0.0).unwrap());
    let (ds, dss) = match (th.delta_star, th.delta_star_star) {
        (Threshold::Crossing(a), Threshold::Crossing(b)) => (a, b),
        other => panic!("2C thresholds: {other:?}"),
    };
    assert!(0.0 < ds && ds < dss);
    check_fixture(
        "Case2C",
        c1,
        c2,
        RegimeLabel::Situation2C,
        &[
            expect(0.5 * ds, Some(Stable), Some(Unstable), None),
            expect(0.5 * (ds + dss), Some(Unstable), Some(Unstable), Some(Stable)),
            expect(dss + 0.5 * (dss - ds), Some(Unstable), Some(Stable), None),
        ],
    );

    // Situation 3: R2 < 1 < R1.
    let p0 = two(0.2, 0.05, 0.0);
    let ds = match delta_thresholds(&p0).delta_star {
        Threshold::Crossing(v) => v,
        other => panic!("S3 delta*: {other:?}"),
    };
    check_fixture(
        "Situation3",
        baseline(0.2),
        baseline(0.05),
        RegimeLabel::Situation3,
        &[
            expect(0.5 * ds, Some(Stable), None, None),
            expect(2.0 * ds, Some(Unstable), None, Some(Stable)),
        ],
    );

    // Situation 4: R1 < 1 < R2, no qualitative change in delta.
    check_fixture(
        "Situation4",
        baseline(0.05),
        baseline(0.2),
        RegimeLabel::Situation4,
        &[
            expect(0.3, None, Some(Stable), None),
            expect(2.0, None, Some(Stable), None),
        ],
    );

    println!("ACCEPTANCE 08 regime taxonomy (Situations 1, 3, 4; Cases 2A, 2B, 2C): PASS");
}

#[test]
fn criterion_09_stability_table_at_delta_zero() {
    use Stability::{Stable, Unstable};
    // (beta1, beta2, x0, x*, x**) — one fixture per table row.
    let rows: [(f64, f64, Stability, Option<Stability>, Option<Stability>); 5] = [
        (0.05, 0.07, Stable, None, None),
        (0.05, 0.2, Unstable, None, Some(Stable)),
        (0.2, 0.05, Unstable, Some(Stable), None),
        (0.2, 0.1, Unstable, Some(Stable), Some(Unstable)),
        (0.1, 0.2, Unstable, Some(Unstable), Some(Stable)),
    ];
    for (k, (b1, b2, x0_stab, xs_stab, xss_stab)) in rows.into_iter().enumerate() {
        let p = two(b1, b2, 0.0);
        let eqs = boundary_equilibria_two(&p).unwrap();
        let stab_of = |kind: EquilibriumKind| {
            eqs.iter()
                .find(|eq| eq.kind == kind)
                .map(|eq| eq.stability)
        };
        assert_eq!(
            stab_of(EquilibriumKind::IdeologyFree),
            Some(x0_stab),
            "row {k}: x0"
        );
        assert_eq!(stab_of(EquilibriumKind::Dominance1), xs_stab, "row {k}: x*");
        assert_eq!(
            stab_of(EquilibriumKind::Dominance2),
            xss_stab,
            "row {k}: x**"
        );
    }
    println!("ACCEPTANCE 09 local-stability table at delta = 0: PASS (5/5 rows)");
}

#[test]
fn criterion_10_cross_model_global_stability() {
    let start = Instant::now();
    // Dominance theorem: R2 > max(1, R1) and c_e2/c~2 < c_e1/c~1, delta > 0.
    let p = ModelParams::two_ideology(
        1.0,
        0.1,
        baseline(0.2),
        ideology(0.3, 0.2, 0.3, 0.05, 0.05, 0.6),
        0.4,
    )
    .unwrap();
    let cond = cross_endemic_conditions(&p);
    assert!(cond.dominance && cond.strict_weights && cond.relaxed_weights);
    let target = dominance_second(&p).unwrap();
    let spec = LyapunovSpec::cross_endemic(&p).unwrap();
    let mut rng = SplitMix64::new(1010);
    for trial in 0..50 {
        let x0: [f64; 5] = sample_in_region(&mut rng, p.s0());
        let traj = integrate_two(&p, x0, (0.0, T_END), &long_run()).unwrap();
        let dist = final_distance(&traj, &target);
        assert!(dist <= CONV_TOL, "trial {trial} ended {dist:.2e} from x**");
        let dec = decrease_check(&spec, &traj).unwrap();
        assert!(
            dec.pass,
            "trial {trial}: certificate increased by {:.2e}",
            dec.max_scaled_increase
        );
    }

    // Subcritical theorem: R1, R2 <= 1 with delta > 0.
    let p = two(0.05, 0.07, 0.5);
    let (r1, r2) = reproduction_numbers_two(&p);
    assert!(r1 <= 1.0 && r2 <= 1.0);
    let target = [p.s0(), 0.0, 0.0, 0.0, 0.0];
    let spec = LyapunovSpec::cross_ideology_free(&p);
    for trial in 0..50 {
        let x0: [f64; 5] = sample_in_region(&mut rng, p.s0());
        let traj = integrate_two(&p, x0, (0.0, T_END), &long_run()).unwrap();
        let dist = final_distance(&traj, &target);
        assert!(dist <= CONV_TOL, "subcritical trial {trial} ended {dist:.2e} from x0");
        let dec = decrease_check(&spec, &traj).unwrap();
        assert!(
            dec.pass,
            "subcritical trial {trial}: certificate increased by {:.2e}",
            dec.max_scaled_increase
        );
    }
    let elapsed = start.elapsed();
    println!(
        "ACCEPTANCE 10 cross-model GAS theorems: PASS (50 dominance + 50 subcritical trials, {elapsed:?})"
    );
}

#[test]
fn criterion_11_invariant_region_and_attraction_bound() {
    let start = Instant::now();
    let horizon = (0.0, 300.0);
    let mut rng = SplitMix64::new(1111);

    // 100 bare + 100 two-ideology starts inside the region.
    let pb = bare(0.2);
    for _ in 0..100 {
        let x0: [f64; 3] = sample_in_region(&mut rng, pb.s0());
        let traj = integrate_bare(&pb, x0, horizon, &long_run()).unwrap();
        let rep = invariant_region_check(&traj, &pb);
        assert!(rep.started_inside && rep.pass, "{rep:?}");
    }
    let pt = two(0.2, 0.1, 0.7);
    for _ in 0..100 {
        let x0: [f64; 5] = sample_in_region(&mut rng, pt.s0());
        let traj = integrate_two(&pt, x0, horizon, &long_run()).unwrap();
        let rep = invariant_region_check(&traj, &pt);
        assert!(rep.started_inside && rep.pass, "{rep:?}");
    }

    // Starts outside: scale interior samples up to T(0) in (cap, 2cap].
    for _ in 0..25 {
        let mut x0: [f64; 3] = sample_in_region(&mut rng, pb.s0());
        let total: f64 = x0.iter().sum();
        let factor = rng.uniform(1.1, 2.0) * pb.s0() / total.max(1e-9);
        x0.iter_mut().for_each(|v| *v *= factor);
        let traj = integrate_bare(&pb, x0, horizon, &long_run()).unwrap();
        let rep = invariant_region_check(&traj, &pb);
        assert!(!rep.started_inside);
        assert!(rep.pass, "comparison bound violated: {rep:?}");
    }
    for _ in 0..25 {
        let mut x0: [f64; 5] = sample_in_region(&mut rng, pt.s0());
        let total: f64 = x0.iter().sum();
        let factor = rng.uniform(1.1, 2.0) * pt.s0() / total.max(1e-9);
        x0.iter_mut().for_each(|v| *v *= factor);
        let traj = integrate_two(&pt, x0, horizon, &long_run()).unwrap();
        let rep = invariant_region_check(&traj, &pt);
        assert!(!rep.started_inside);
        assert!(rep.pass, "comparison bound violated: {rep:?}");
    }
    let elapsed = start.elapsed();
    println!(
        "ACCEPTANCE 11 invariant region and attraction bound: PASS (200 inside + 50 outside starts, {elapsed:?})"
    );
}

#[test]
fn criterion_12_integrator_convergence_order() {
    let p = bare(0.2);
    let x0 = [8.0, 0.5, 0.5];
    let t_span = (0.0, 20.0);

    // Reference at tight tolerance.
    let tight = IntegratorConfig {
        rtol: 1e-12,
        atol: 1e-14,
        sample_interval: 20.0,
        ..Default::default()
    };
    let reference = *integrate_bare(&p, x0, t_span, &tight).unwrap().final_state();

    // Fixed-step runs: huge tolerances so every step is accepted, with
    // the step pinned by initial_step = max_step.
    let errors: Vec<f64> = [0.5, 0.25, 0.125, 0.0625]
        .iter()
        .map(|&h| {
            let cfg = IntegratorConfig {
                rtol: 1e9,
                atol: 1e9,
                initial_step: Some(h),
                max_step: h,
                sample_interval: 20.0,
                ..Default::default()
            };
            let fin = *integrate_bare(&p, x0, t_span, &cfg).unwrap().final_state();
            fin.iter()
                .zip(&reference)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0_f64, f64::max)
        })
        .collect();

    // Least-squares slope of ln(err) against ln(h).
    let ln_h: Vec<f64> = [0.5_f64, 0.25, 0.125, 0.0625].iter().map(|h| h.ln()).collect();
    let ln_e: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = ln_h.len() as f64;
    let mh = ln_h.iter().sum::<f64>() / n;
    let me = ln_e.iter().sum::<f64>() / n;
    let slope = ln_h
        .iter()
        .zip(&ln_e)
        .map(|(a, b)| (a - mh) * (b - me))
        .sum::<f64>()
        / ln_h.iter().map(|a| (a - mh) * (a - mh)).sum::<f64>();

    assert!(
        slope >= 4.5,
        "observed order {slope:.2} below 4.5 (errors {errors:?})"
    );
    println!(
        "ACCEPTANCE 12 integrator order: PASS (observed order {slope:.2}, errors {errors:?})"
    );
}

#[test]
fn acceptance_support_integrator_order_via_tolerance_halving() {
    // Companion check for the order criterion: against the tight
    // reference, halving both tolerances never increases the endpoint
    // error by more than noise.
    let p = bare(0.2);
    let x0 = [8.0, 0.5, 0.5];
    let t_span = (0.0, 50.0);
    let tight = IntegratorConfig {
        rtol: 1e-12,
        atol: 1e-14,
        sample_interval: 50.0,
        ..Default::default()
    };
    let reference = *integrate_bare(&p, x0, t_span, &tight).unwrap().final_state();
    let mut errs = Vec::new();
    for k in 0..6 {
        let cfg = IntegratorConfig {
            rtol: 1e-4 * 0.5_f64.powi(k),
            atol: 1e-6 * 0.5_f64.powi(k),
            sample_interval: 50.0,
            ..Default::default()
        };
        let fin = *integrate_bare(&p, x0, t_span, &cfg).unwrap().final_state();
        errs.push(
            fin.iter()
                .zip(&reference)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0_f64, f64::max),
        );
    }
    assert!(
        errs.last().unwrap() < errs.first().unwrap(),
        "tolerance halving did not reduce error: {errs:?}"
    );
}

#[test]
fn acceptance_support_taxonomy_agrees_with_coexistence_search() {
    // Cross-validation of the closed-form regime taxonomy against the
    // numerical root search on seeded-random parameter sets: wherever the
    // taxonomy predicts presence/absence of a coexistence equilibrium
    // (away from thresholds), the multistart search must agree, and the
    // stability class of a found root must match the regime.
    let mut rng = SplitMix64::new(1234);
    let mut checked = 0;
    let mut inconclusive = 0;
    while checked < 300 {
        let lambda = rng.uniform(0.2, 5.0);
        let mu = rng.uniform(0.02, 0.5);
        let i1 = random_ideology(&mut rng);
        let i2 = random_ideology(&mut rng);
        let delta = rng.uniform(0.0, 3.0);
        let p = ModelParams::two_ideology(lambda, mu, i1, i2, delta).unwrap();
        let rep = classify_regime(&p);
        if rep.degenerate {
            continue;
        }
        let crossing = |t: Threshold| match t {
            Threshold::Crossing(v) => Some(v),
            _ => None,
        };
        let ds = crossing(rep.delta_star);
        let dss = crossing(rep.delta_star_star);
        // Skip deltas within 2% of a threshold: presence flips there.
        let near = |v: Option<f64>| v.is_some_and(|v| (delta - v).abs() < 0.02 * v.max(1.0));
        if near(ds) || near(dss) {
            continue;
        }
        let expected = match rep.label {
            RegimeLabel::Situation1 | RegimeLabel::Situation4 | RegimeLabel::AllSubcritical => {
                Some(false)
            }
            RegimeLabel::Situation3 | RegimeLabel::Situation2A => {
                Some(ds.is_some_and(|v| delta > v))
            }
            RegimeLabel::Situation2B => dss.zip(ds).map(|(a, b)| delta > a && delta < b),
            RegimeLabel::Situation2C => ds.zip(dss).map(|(a, b)| delta > a && delta < b),
        };
        let Some(expected) = expected else { continue };
        match coexistence_equilibria(&p) {
            Err(_) => inconclusive += 1,
            Ok(roots) => {
                checked += 1;
                assert_eq!(
                    !roots.is_empty(),
                    expected,
                    "{:?} at delta = {delta}: {p:?}",
                    rep.label
                );
                if let Some(eq) = roots.first() {
                    let want = match rep.label {
                        RegimeLabel::Situation2B => Stability::Unstable,
                        _ => Stability::Stable,
                    };
                    assert_eq!(eq.stability, want, "{:?} at delta = {delta}", rep.label);
                }
            }
        }
    }
    assert!(
        inconclusive <= 6,
        "too many inconclusive searches: {inconclusive}"
    );
    println!(
        "ACCEPTANCE support taxonomy-vs-search scan: PASS (300 parameter sets, {inconclusive} inconclusive)"
    );
}

#[test]
fn acceptance_support_subcritical_pair_certificate_at_delta_zero() {
    // Both ideologies subcritical without conversion: the ideology-free
    // certificate of the competition model decreases and the population
    // abandons both ideologies.
    let p = two(0.05, 0.07, 0.0);
    let spec = LyapunovSpec::two_ideology_free(&p);
    let target = [p.s0(), 0.0, 0.0, 0.0, 0.0];
    let mut rng = SplitMix64::new(42);
    for trial in 0..25 {
        let x0: [f64; 5] = sample_in_region(&mut rng, p.s0());
        let traj = integrate_two(&p, x0, (0.0, T_END), &long_run()).unwrap();
        let dist = final_distance(&traj, &target);
        assert!(dist <= CONV_TOL, "trial {trial} ended {dist:.2e} away");
        let dec = decrease_check(&spec, &traj).unwrap();
        assert!(dec.pass, "trial {trial}: certificate increased");
    }
}

#[test]
fn acceptance_support_verify_exponential_oracle() {
    // x' = -x integrates to e^{-1} within 1e-9 at default tolerances.
    let cfg = IntegratorConfig {
        sample_interval: 1.0,
        ..Default::default()
    };
    let traj = integrate_ode(|_, x: &[f64; 1]| [-x[0]], [1.0], (0.0, 1.0), &cfg, false).unwrap();
    assert!((traj.final_state()[0] - (-1.0_f64).exp()).abs() < 1e-9);
}
