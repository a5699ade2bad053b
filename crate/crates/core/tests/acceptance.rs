//! Acceptance suite: one test per release criterion, each printing a
//! one-line verdict (run with `--nocapture` to see them all).
//!
//! The tolerances here are the contract; run times are asserted where the
//! contract names them.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spinvalve_core::criticals::{conversion_point, critical_mu, epsilon_perpendicular, mu_to_omega, CriticalKind};
use spinvalve_core::modes::{LocalizedMode, SystemParams};
use spinvalve_core::oracle::{isotropy_check, solve_numeric};
use spinvalve_core::presets;
use spinvalve_core::simulator::{evolve, init_state, EvolveConfig, SimResult, WavepacketSpec};
use spinvalve_core::{s_matrix, Branch, Spinor};

fn pass(number: u32, name: &str, detail: String) {
    println!("[acceptance] criterion {number} ({name}): PASS - {detail}");
}

fn grid_params(g: f64, lambda: f64, epsilon: f64) -> SystemParams {
    SystemParams {
        alpha: PI / 20.0,
        gamma: 0.002,
        lambda,
        g,
        epsilon,
        a: PI / 4.0,
        b: PI / 2.0,
    }
}

const GRID_G: [f64; 5] = [0.3, 0.5, 0.69, 0.75, 0.9];
const GRID_LAMBDA: [f64; 4] = [0.025, 0.1, 1.0 / 3.0, 1.0];

#[test]
fn criterion_1_closed_form_matches_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0_f64;
    let mut points = 0usize;
    for k in 0..20 {
        let omega = -1.99 + 3.98 * (k as f64 + 0.5) / 20.0;
        for &g in &GRID_G {
            for &lambda in &GRID_LAMBDA {
                for _ in 0..5 {
                    let params = grid_params(g, lambda, rng.random_range(0.0..2.0 * PI));
                    let cf = s_matrix(omega, &params).unwrap();
                    let o1 = solve_numeric(omega, &params, Branch::B1).unwrap();
                    let o3 = solve_numeric(omega, &params, Branch::B3).unwrap();
                    for (got, want) in o1
                        .s
                        .iter()
                        .zip([cf.s11, cf.s21, cf.s31, cf.s41])
                        .chain(o3.s.iter().zip([cf.s13, cf.s23, cf.s33, cf.s43]))
                    {
                        worst = worst.max((got - want).norm());
                    }
                    points += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(points >= 2000, "grid too small: {points}");
    assert!(worst < 1e-8, "max closed-form vs oracle deviation {worst:.3e}");
    assert!(elapsed < 10.0, "criterion 1 took {elapsed:.1} s (budget 10 s)");
    pass(
        1,
        "closed form vs oracle",
        format!("{points} points, max deviation {worst:.2e}, {elapsed:.2} s"),
    );
}

#[test]
fn criterion_2_flux_conservation() {
    let mut rng = ChaCha8Rng::seed_from_u64(4048);
    let mut worst = 0.0_f64;
    for k in 0..20 {
        let omega = -1.99 + 3.98 * (k as f64 + 0.5) / 20.0;
        for &g in &GRID_G {
            for &lambda in &GRID_LAMBDA {
                for _ in 0..5 {
                    let params = grid_params(g, lambda, rng.random_range(0.0..2.0 * PI));
                    let s = s_matrix(omega, &params).unwrap();
                    worst = worst
                        .max((s.column1_flux() - 1.0).abs())
                        .max((s.column3_flux() - 1.0).abs());
                }
            }
        }
    }
    assert!(worst < 1e-10, "max flux residual {worst:.3e}");
    pass(2, "flux conservation", format!("max |sum - 1| = {worst:.2e}"));
}

/// Shared sim driver: run a preset scenario and return its result.
fn run_scenario(scenario: &presets::SimScenario) -> SimResult {
    let (mut state, report) = init_state(&scenario.params, &scenario.packet, scenario.window)
        .unwrap_or_else(|e| panic!("{}: init failed: {e}", scenario.name));
    assert!(
        report.warnings.is_empty(),
        "{}: unexpected warnings {:?}",
        scenario.name,
        report.warnings
    );
    let result = evolve(&mut state, &scenario.params, &scenario.packet, &scenario.evolve)
        .unwrap_or_else(|e| panic!("{}: evolve failed: {e}", scenario.name));
    assert!(
        result.final_split.reliable(),
        "{}: condensate fidelity {:.4} below 0.99",
        scenario.name,
        result.final_split.condensate_fidelity
    );
    assert!(
        (result.final_split.total() - 1.0).abs() < 0.02,
        "{}: fractions sum to {:.4}",
        scenario.name,
        result.final_split.total()
    );
    assert!(
        result.norm_drift < 1e-8,
        "{}: norm drift {:.3e}",
        scenario.name,
        result.norm_drift
    );
    assert!(
        result.energy_drift < 1e-6,
        "{}: energy drift {:.3e}",
        scenario.name,
        result.energy_drift
    );
    result
}

#[test]
fn criterion_3_transparency_point() {
    // analytic: |S11| = 1 at mu = (3/2)(lambda+1) with C_Y = -1
    let scenario = presets::transparency_plus().unwrap();
    let s = s_matrix(scenario.packet.omega, &scenario.params).unwrap();
    let analytic_defect = (s.s11.norm() - 1.0).abs();
    assert!(analytic_defect < 1e-10, "|S11| - 1 = {analytic_defect:.3e}");

    let start = Instant::now();
    let result = run_scenario(&scenario);
    let elapsed = start.elapsed().as_secs_f64();
    let transmitted = result.final_split.transmitted_plus;
    assert!(transmitted >= 0.95, "transmitted same-spin fraction {transmitted:.4}");
    assert!(elapsed < 120.0, "sim took {elapsed:.0} s (budget 2 min)");
    pass(
        3,
        "transparency",
        format!("|S11|-1 = {analytic_defect:.1e}, sim transmitted {transmitted:.3} in {elapsed:.0} s"),
    );
}

#[test]
fn criterion_4_blockade_point() {
    let scenario = presets::blockade_plus().unwrap();
    let s = s_matrix(scenario.packet.omega, &scenario.params).unwrap();
    let analytic = s.s11.norm();
    assert!(analytic < 1e-10, "|S11| = {analytic:.3e}");

    let result = run_scenario(&scenario);
    let transmitted =
        result.final_split.transmitted_plus + result.final_split.transmitted_minus;
    assert!(transmitted <= 0.05, "transmitted fraction {transmitted:.4}");
    pass(
        4,
        "blockade",
        format!("|S11| = {analytic:.1e}, sim transmitted {transmitted:.4}"),
    );
}

#[test]
fn criterion_5_isolation_point() {
    let aligned = presets::isolation_aligned().unwrap();
    let s = s_matrix(aligned.packet.omega, &aligned.params).unwrap();
    let defect_on = (s.s11.norm() - 1.0).abs();
    let defect_off = s.s33.norm();
    assert!(defect_on < 1e-10, "aligned |S11| - 1 = {defect_on:.3e}");
    assert!(defect_off < 1e-10, "anti-aligned |S33| = {defect_off:.3e}");

    let result_on = run_scenario(&aligned);
    let through = result_on.final_split.transmitted_plus;
    assert!(through >= 0.9, "aligned transmitted fraction {through:.4}");

    let anti = presets::isolation_antialigned().unwrap();
    let result_off = run_scenario(&anti);
    let blocked =
        result_off.final_split.transmitted_minus + result_off.final_split.transmitted_plus;
    assert!(blocked <= 0.05, "anti-aligned transmitted fraction {blocked:.4}");
    pass(
        5,
        "isolation",
        format!(
            "analytic 1-|S11| = {defect_on:.1e}, |S33| = {defect_off:.1e}; sim {through:.3} vs {blocked:.4}"
        ),
    );
}

#[test]
fn criterion_6_maximal_conversion() {
    let (a, b) = (PI / 4.0, PI / 4.0);
    let roots = conversion_point(0.5, 1.0, a, b).unwrap();
    assert_eq!(roots.len(), 1);
    let params = SystemParams {
        alpha: PI / 20.0,
        gamma: 0.002,
        lambda: 1.0,
        g: 0.5,
        epsilon: epsilon_perpendicular(a, b),
        a,
        b,
    };
    let s = s_matrix(roots[0].omega, &params).unwrap();
    let defects = [
        (s.s11 - 0.5).norm(),
        (s.s33 - 0.5).norm(),
        (s.s31.norm() - 0.5).abs(),
        (s.s13.norm() - 0.5).abs(),
    ];
    let worst_analytic = defects.into_iter().fold(0.0, f64::max);
    assert!(worst_analytic < 1e-12, "analytic defect {worst_analytic:.3e}");

    let scenario = presets::conversion().unwrap();
    let result = run_scenario(&scenario);
    let split = result.final_split;
    for (name, frac) in [
        ("transmitted_plus", split.transmitted_plus),
        ("transmitted_minus", split.transmitted_minus),
        ("reflected_plus", split.reflected_plus),
        ("reflected_minus", split.reflected_minus),
    ] {
        assert!(
            (frac - 0.25).abs() <= 0.05,
            "channel {name} = {frac:.4}, expected 0.25 +- 0.05"
        );
    }
    pass(
        6,
        "maximal conversion",
        format!(
            "analytic defect {worst_analytic:.1e}; sim split {:.3}/{:.3}/{:.3}/{:.3}",
            split.transmitted_plus,
            split.transmitted_minus,
            split.reflected_plus,
            split.reflected_minus
        ),
    );
}

#[test]
fn criterion_7_m_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(777);
    let mut worst = 0.0_f64;
    for _ in 0..10_000 {
        let a: f64 = rng.random_range(0.0..PI);
        let b: f64 = rng.random_range(0.0..PI);
        let eps: f64 = rng.random_range(0.0..2.0 * PI);
        let c_y = eps.sin() * a.cos() - eps.cos() * a.sin() * b.sin();
        let c_eps = C64::new((a / 2.0).cos().powi(2), 0.0)
            + C64::from_polar(1.0, 2.0 * b) * (a / 2.0).sin().powi(2);
        let m = C64::new(0.0, 1.0) * C64::from_polar(1.0, b) * (a.sin() * eps.sin())
            - c_eps * eps.cos();
        worst = worst.max((m.norm_sqr() + c_y * c_y - 1.0).abs());
    }
    assert!(worst < 1e-12, "max identity deviation {worst:.3e}");
    pass(7, "|M|^2 + C_Y^2 = 1", format!("max deviation {worst:.2e} over 1e4 draws"));
}

#[test]
fn criterion_8_isotropy() {
    let mut rng = ChaCha8Rng::seed_from_u64(888);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let params = SystemParams {
            alpha: rng.random_range(-1.0..1.0),
            gamma: 0.002,
            lambda: rng.random_range(0.02..2.0),
            g: rng.random_range(0.2..1.2),
            epsilon: rng.random_range(0.0..2.0 * PI),
            a: rng.random_range(0.0..PI),
            b: rng.random_range(0.0..PI),
        };
        let omega = rng.random_range(-1.95..1.95);
        worst = worst.max(isotropy_check(omega, &params).unwrap());
    }
    assert!(worst < 1e-9, "max isotropy violation {worst:.3e}");
    pass(8, "isotropy", format!("max |S_left - S_right| = {worst:.2e} over 100 points"));
}

#[test]
fn criterion_9_integrator_health() {
    // condensate-only evolution: pure phase rotation over T = 100
    let params = grid_params(0.9, 0.025, PI / 4.0 - PI / 2.0);
    let condensate = LocalizedMode::from_params(&params);
    let half = 60i64;
    let psi: Vec<Spinor> = (-half..=half).map(|n| condensate.site(n)).collect();
    let mut state = spinvalve_core::simulator::LatticeState {
        n_min: -half,
        n_max: half,
        psi,
        time: 0.0,
    };
    let packet = WavepacketSpec {
        s0: 0.0,
        s_p: 0.002,
        n0: -30,
        branch: Branch::B1,
        omega: -1.9,
    };
    let config = EvolveConfig {
        dt: 0.002,
        t_final: 100.0,
        record_every: 20.0,
        ..EvolveConfig::default()
    };
    let result = evolve(&mut state, &params, &packet, &config).unwrap();
    let phase = C64::from_polar(1.0, -condensate.omega * state.time);
    let mut worst = 0.0_f64;
    for n in -half..=half {
        let expect = phase * condensate.site(n);
        worst = worst.max((state.psi[state.index_of(n)] - expect).norm_sqr().sqrt());
    }
    assert!(worst < 1e-6, "stationarity deviation {worst:.3e}");
    assert!(result.norm_drift < 1e-8, "norm drift {:.3e}", result.norm_drift);

    // linear-regime scaling: halving s0 moves no fraction by more than 1e-3
    let scenario = presets::blockade_plus().unwrap();
    let full = run_scenario(&scenario);
    let mut halved = scenario.clone();
    halved.packet.s0 *= 0.5;
    let half_run = run_scenario(&halved);
    let pairs = [
        (full.final_split.transmitted_plus, half_run.final_split.transmitted_plus),
        (full.final_split.transmitted_minus, half_run.final_split.transmitted_minus),
        (full.final_split.reflected_plus, half_run.final_split.reflected_plus),
        (full.final_split.reflected_minus, half_run.final_split.reflected_minus),
    ];
    let mut worst_shift = 0.0_f64;
    for (a, b) in pairs {
        worst_shift = worst_shift.max((a - b).abs());
    }
    assert!(worst_shift < 1e-3, "fraction shift on halving s0: {worst_shift:.3e}");
    pass(
        9,
        "integrator health",
        format!(
            "stationarity {worst:.1e}, norm drift {:.1e}, s0-halving shift {worst_shift:.1e}",
            result.norm_drift
        ),
    );
}

#[test]
fn structural_feasibility_boundaries_and_texture_period() {
    // T_plus feasibility along g at lambda = 0.025: inside the band at small
    // g, a single exit as omega(g) grows past the band edge
    let lambda = 0.025;
    let mu = critical_mu(CriticalKind::TPlus, lambda).unwrap();
    let mut last_feasible = true;
    let mut transitions = 0;
    for k in 1..=400 {
        let g = 2.0 * k as f64 / 400.0;
        let (_, feasible) = mu_to_omega(mu, g, lambda);
        if feasible != last_feasible {
            transitions += 1;
            last_feasible = feasible;
        }
    }
    assert!(transitions <= 1, "feasibility boundary crossed {transitions} times");
    assert!(!last_feasible, "T_plus should leave the band by g = 2");

    // texture winding: alpha = pi/20 repeats every 20 sites
    let angles = spinvalve_core::SpinBasisAngles::new(PI / 4.0, PI / 2.0).unwrap();
    for n in -10..10i64 {
        let s0 = spinvalve_core::transmission_spin_texture(true, n, angles, PI / 20.0);
        let s20 = spinvalve_core::transmission_spin_texture(true, n + 20, angles, PI / 20.0);
        assert!(s0.max_abs_diff(&s20) < 1e-12);
    }
    pass(
        10,
        "structural maps/textures",
        "single feasibility exit along g; texture period pi/alpha".to_string(),
    );
}
