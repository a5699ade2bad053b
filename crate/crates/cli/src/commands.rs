//! Subcommand implementations. Each writes one or more files into the output
//! directory and prints the paths it produced.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde_json::json;
use spinvalve_core::criticals::{
    self, conversion_point, critical_point, epsilon_perpendicular, feasibility_map, grid,
    isolation_point, CriticalKind, CriticalPoint,
};
use spinvalve_core::modes::{localized_spin_texture, LocalizedMode, SystemParams};
use spinvalve_core::presets::{self, SimScenario};
use spinvalve_core::scattering::{pole_flag, PoleFlag};
use spinvalve_core::simulator::{evolve, init_state, SimResult};
use spinvalve_core::{
    flux_residual, s_matrix, transmission_spin_texture, Error, Result, SpinBasisAngles,
};

use crate::config::RunConfig;
use crate::output::{Cell, OutputDir, Table};

fn announce(paths: &[std::path::PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

/// `modes`: dispersion samples and the localized eigenenergy curves.
pub fn cmd_modes(config: &RunConfig, out: &OutputDir) -> Result<()> {
    let scan = &config.scan;
    let mut dispersion = Table::new("modes", &["phi", "omega", "group_velocity"]);
    for k in 0..=scan.phi_steps {
        let phi = scan.phi_min + (scan.phi_max - scan.phi_min) * k as f64 / scan.phi_steps as f64;
        dispersion.row(vec![
            Cell::Exact(phi),
            Cell::Float(-2.0 * phi.cos()),
            Cell::Float(2.0 * phi.sin()),
        ]);
    }

    // eigenenergy against g for the three reference interaction ratios
    let lambdas: [f64; 3] = [0.5, 1.0, 1.5];
    let mut omega_curves = Table::new(
        "modes",
        &["g", "omega_lambda_0.5", "omega_lambda_1.0", "omega_lambda_1.5"],
    );
    for &g in &grid(0.0, scan.g_max, scan.g_cells) {
        let mut row = vec![Cell::Exact(g)];
        for &lambda in &lambdas {
            let omega = -((1.0 + lambda).powi(2) * g * g + 4.0).sqrt();
            row.push(Cell::Float(omega));
        }
        omega_curves.row(row);
    }

    announce(&[
        out.table("dispersion", &dispersion)?,
        out.table("omega_localized", &omega_curves)?,
    ]);
    Ok(())
}

/// `texture`: spin textures of the transmission pair and the localized mode.
pub fn cmd_texture(config: &RunConfig, out: &OutputDir) -> Result<()> {
    let params = config.params();
    params.validate()?;
    let angles = SpinBasisAngles::new(config.spin.a, config.spin.b)?;
    let scan = &config.scan;

    let mut transmission = Table::new(
        "texture",
        &["n", "sx_plus", "sy_plus", "sz_plus", "sx_minus", "sy_minus", "sz_minus"],
    );
    for n in scan.site_min..=scan.site_max {
        let sp = transmission_spin_texture(true, n, angles, params.alpha);
        let sm = transmission_spin_texture(false, n, angles, params.alpha);
        transmission.row(vec![
            Cell::Int(n),
            Cell::Float(sp.sx),
            Cell::Float(sp.sy),
            Cell::Float(sp.sz),
            Cell::Float(sm.sx),
            Cell::Float(sm.sy),
            Cell::Float(sm.sz),
        ]);
    }

    // localized texture; an explicit texture_omega reproduces quoted-decay
    // plots without asserting Omega(g, lambda)
    let kappa = match scan.texture_omega {
        Some(omega) if omega < -2.0 => (-omega - (omega * omega - 4.0).sqrt()) / 2.0,
        Some(omega) => {
            return Err(Error::validation(format!(
                "texture_omega = {omega} must lie below the band (< -2)"
            )))
        }
        None => LocalizedMode::from_params(&params).kappa,
    };
    let mut localized = Table::new("texture", &["n", "sx", "sy", "sz"]);
    for n in scan.site_min..=scan.site_max {
        let s = localized_spin_texture(n, params.g, params.gamma, kappa, params.epsilon, params.alpha);
        localized.row(vec![
            Cell::Int(n),
            Cell::Float(s.sx),
            Cell::Float(s.sy),
            Cell::Float(s.sz),
        ]);
    }

    announce(&[
        out.table("texture_transmission", &transmission)?,
        out.table("texture_localized", &localized)?,
    ]);
    Ok(())
}

fn smatrix_table(params: &SystemParams, config: &RunConfig, label: &str) -> Result<Table> {
    let scan = &config.scan;
    let mut table = Table::new(
        label,
        &["phi", "omega", "abs_s11", "abs_s33", "abs_s31", "abs_s13", "flux_residual", "pole"],
    );
    let omega_loc = params.omega_localized();
    for k in 0..=scan.phi_steps {
        let phi = scan.phi_min + (scan.phi_max - scan.phi_min) * k as f64 / scan.phi_steps as f64;
        let omega = -2.0 * phi.cos();
        let s = s_matrix(omega, params)?;
        let mu = spinvalve_core::mu_of_omega(omega, omega_loc, params.g)?;
        let pole = match pole_flag(mu, params.lambda) {
            PoleFlag::None => "",
            PoleFlag::PlusPole => "plus",
            PoleFlag::MinusPole => "minus",
        };
        table.row(vec![
            Cell::Exact(phi),
            Cell::Float(omega),
            Cell::Float(s.s11.norm()),
            Cell::Float(s.s33.norm()),
            Cell::Float(s.s31.norm()),
            Cell::Float(s.s13.norm()),
            Cell::Float(flux_residual(&s)),
            Cell::Text(pole.to_string()),
        ]);
    }
    Ok(table)
}

/// `smatrix`: transmission/conversion magnitudes against quasimomentum.
pub fn cmd_smatrix(config: &RunConfig, out: &OutputDir) -> Result<()> {
    let params = config.params();
    let table = smatrix_table(&params, config, "smatrix")?;
    announce(&[out.table("smatrix_scan", &table)?]);
    Ok(())
}

fn critical_rows(table: &mut Table, points: &[CriticalPoint]) {
    for pt in points {
        table.row(vec![
            Cell::Exact(pt.g),
            Cell::Exact(pt.lambda),
            Cell::Text(pt.kind.label().to_string()),
            match pt.mu {
                Some(mu) => Cell::Float(mu),
                None => Cell::Text(String::new()),
            },
            Cell::Float(pt.omega),
            Cell::Bool(pt.feasible),
        ]);
    }
}

const CRITICAL_COLUMNS: [&str; 6] = ["g", "lambda", "kind", "mu", "omega", "feasible"];

/// `criticals`: every operating point of the configured system.
pub fn cmd_criticals(config: &RunConfig, out: &OutputDir) -> Result<()> {
    let params = config.params();
    params.validate()?;
    let mut table = Table::new("criticals", &CRITICAL_COLUMNS);
    let mut points = Vec::new();
    for kind in CriticalKind::all_mu_kinds() {
        points.push(critical_point(kind, params.g, params.lambda)?);
    }
    points.push(isolation_point(params.g)?);
    points.push(criticals::conversion_critical_point(
        params.g,
        params.lambda,
        config.spin.a,
        config.spin.b,
    )?);
    critical_rows(&mut table, &points);
    announce(&[out.table("criticals", &table)?]);
    Ok(())
}

/// `map`: feasibility heatmaps over `(g, lambda)`, one file per kind.
pub fn cmd_map(config: &RunConfig, out: &OutputDir, kinds: &[CriticalKind]) -> Result<()> {
    let scan = &config.scan;
    let g_grid = grid(0.0, scan.g_max, scan.g_cells);
    let lambda_grid = grid(0.0, scan.lambda_max, scan.lambda_cells);
    let mut paths = Vec::new();
    for &kind in kinds {
        let cells = feasibility_map(kind, &g_grid, &lambda_grid, (config.spin.a, config.spin.b))?;
        let mut table = Table::new("map", &CRITICAL_COLUMNS);
        critical_rows(&mut table, &cells);
        paths.push(out.table(&format!("map_{}", kind.label()), &table)?);
    }
    announce(&paths);
    Ok(())
}

/// `isolate`: the isolation point at the configured `g`, plus its `omega(g)` curve.
pub fn cmd_isolate(config: &RunConfig, out: &OutputDir) -> Result<()> {
    let params = config.params();
    let point = isolation_point(params.g)?;
    if !point.feasible {
        return Err(Error::infeasible(format!(
            "isolation energy omega = {:.6} is outside the band at g = {}",
            point.omega, params.g
        )));
    }
    let mut table = Table::new("isolate", &CRITICAL_COLUMNS);
    let g_grid = grid(0.0, config.scan.g_max, config.scan.g_cells);
    let curve = feasibility_map(
        CriticalKind::Isolation,
        &g_grid,
        &[1.0 / 3.0],
        (config.spin.a, config.spin.b),
    )?;
    critical_rows(&mut table, &curve);
    let summary = json!({
        "config": serde_json::from_str::<serde_json::Value>(out.echo()).expect("echo"),
        "point": point,
        "spin_requirement": "b = pi/2, epsilon = a - pi/2 (condensate along s_plus)",
    });
    announce(&[
        out.table("isolation_scan", &table)?,
        out.json("isolation_point.json", &summary)?,
    ]);
    Ok(())
}

/// `convert`: maximal-conversion energies at the configured `(g, lambda, a, b)`.
pub fn cmd_convert(config: &RunConfig, out: &OutputDir) -> Result<()> {
    let params = config.params();
    let roots = conversion_point(params.g, params.lambda, config.spin.a, config.spin.b)?;
    if roots.is_empty() {
        return Err(Error::infeasible(format!(
            "no conversion maximum at g = {}, lambda = {}: Y^2 <= X^2 across the band",
            params.g, params.lambda
        )));
    }
    let mut table = Table::new(
        "convert",
        &["g", "lambda", "epsilon_star", "omega", "abs_s31", "residual"],
    );
    let eps = epsilon_perpendicular(config.spin.a, config.spin.b);
    for r in &roots {
        table.row(vec![
            Cell::Exact(params.g),
            Cell::Exact(params.lambda),
            Cell::Float(eps),
            Cell::Float(r.omega),
            Cell::Float(r.s31_abs),
            Cell::Float(r.residual),
        ]);
    }
    announce(&[out.table("conversion_roots", &table)?]);
    Ok(())
}

/// Run one simulation scenario and write its series + summary.
fn run_scenario(scenario: &SimScenario, out: &OutputDir) -> Result<Vec<std::path::PathBuf>> {
    let (mut state, report) = init_state(&scenario.params, &scenario.packet, scenario.window)?;
    for warning in &report.warnings {
        eprintln!("[{}] warning: {warning}", scenario.name);
    }
    let result = evolve(&mut state, &scenario.params, &scenario.packet, &scenario.evolve)?;
    write_sim_outputs(scenario, &result, out)
}

fn write_sim_outputs(
    scenario: &SimScenario,
    result: &SimResult,
    out: &OutputDir,
) -> Result<Vec<std::path::PathBuf>> {
    let mut series = Table::new(
        "simulate",
        &[
            "t",
            "transmitted_plus",
            "transmitted_minus",
            "reflected_plus",
            "reflected_minus",
            "core",
            "condensate_fidelity",
            "total_norm",
        ],
    );
    for rec in &result.records {
        series.row(vec![
            Cell::Exact(rec.t),
            Cell::Float(rec.split.transmitted_plus),
            Cell::Float(rec.split.transmitted_minus),
            Cell::Float(rec.split.reflected_plus),
            Cell::Float(rec.split.reflected_minus),
            Cell::Float(rec.split.core),
            Cell::Float(rec.split.condensate_fidelity),
            Cell::Float(rec.total_norm),
        ]);
    }
    let summary = json!({
        "name": scenario.name,
        "params": scenario.params,
        "packet": scenario.packet,
        "window": scenario.window,
        "dt": result.dt,
        "n_cut": result.n_cut,
        "packet_norm": result.packet_norm,
        "norm_drift": result.norm_drift,
        "energy_drift": result.energy_drift,
        "measured": result.final_split,
        "predicted": scenario.predicted,
        "measurement_reliable": result.final_split.reliable(),
    });
    Ok(vec![
        out.table(&format!("{}_series", scenario.name), &series)?,
        out.json(&format!("{}_summary.json", scenario.name), &summary)?,
    ])
}

fn scenario_from_config(config: &RunConfig) -> Result<SimScenario> {
    let params = config.params();
    let packet = config.packet()?;
    let predicted =
        presets::PredictedFractions::from_s_matrix(packet.omega, &params, packet.branch)?;
    Ok(SimScenario {
        name: "simulate".to_string(),
        params,
        packet,
        window: config.sim.window,
        evolve: config.evolve_config(),
        predicted,
    })
}

pub fn named_scenario(name: &str) -> Result<SimScenario> {
    match name {
        "transparency" | "transparency_plus" => presets::transparency_plus(),
        "transparency_minus" => presets::transparency_minus(),
        "beam-splitting" | "beam_splitting" | "beam_splitting_plus" => {
            presets::beam_splitting_plus()
        }
        "beam_splitting_minus" => presets::beam_splitting_minus(),
        "blockade" | "blockade_plus" => presets::blockade_plus(),
        "blockade_minus" => presets::blockade_minus(),
        "isolation" | "isolation_aligned" => presets::isolation_aligned(),
        "isolation_antialigned" => presets::isolation_antialigned(),
        "conversion" => presets::conversion(),
        other => Err(Error::validation(format!(
            "unknown preset '{other}'; expected one of transparency[_minus], \
             beam_splitting[_minus], blockade[_minus], isolation[_antialigned], conversion"
        ))),
    }
}

/// `simulate`: one time-domain run, from a named preset or from the config.
pub fn cmd_simulate(config: &RunConfig, out: &OutputDir, preset: Option<&str>) -> Result<()> {
    let scenario = match preset {
        Some(name) => named_scenario(name)?,
        None => scenario_from_config(config)?,
    };
    announce(&run_scenario(&scenario, out)?);
    Ok(())
}

/// `reproduce-fig2`: dispersion, eigenenergy curves, and both textures.
pub fn reproduce_fig2(config: &RunConfig, out: &OutputDir) -> Result<()> {
    cmd_modes(config, out)?;
    cmd_texture(config, out)
}

/// `reproduce-fig3`: feasibility maps for all kinds plus the isolation curve.
pub fn reproduce_fig3(config: &RunConfig, out: &OutputDir) -> Result<()> {
    let kinds = [
        CriticalKind::TPlus,
        CriticalKind::TMinus,
        CriticalKind::BPlus,
        CriticalKind::BMinus,
        CriticalKind::Conversion,
    ];
    cmd_map(config, out, &kinds)?;
    cmd_isolate(config, out)
}

/// `reproduce-fig4`: every panel's simulation, side by side with the
/// closed-form prediction. Jobs run in parallel.
pub fn reproduce_fig4(out: &OutputDir) -> Result<()> {
    let scenarios = presets::figure4_scenarios()?;
    let results: Vec<Result<Vec<std::path::PathBuf>>> = scenarios
        .par_iter()
        .map(|scenario| run_scenario(scenario, out))
        .collect();
    for r in results {
        announce(&r?);
    }
    Ok(())
}

/// `reproduce-supp`: the period-10 texture and both supplement S-matrix scans.
pub fn reproduce_supp(config: &RunConfig, out: &OutputDir) -> Result<()> {
    // supplement texture: alpha = pi/10 instead of pi/20
    let mut supp = config.clone();
    supp.system.alpha = PI / 10.0;
    let supp_out_echo = supp.echo();
    let texture_out = OutputDir::create(&out.path("supp_texture"), supp_out_echo, out.format())?;
    cmd_texture(&supp, &texture_out)?;

    let reciprocal = presets::supplement_reciprocal_params();
    let nonreciprocal = presets::supplement_nonreciprocal_params();
    let mut cy_note = Table::new("reproduce-supp", &["case", "c_y"]);
    cy_note.row(vec![
        Cell::Text("reciprocal".to_string()),
        Cell::Float(reciprocal.c_y()),
    ]);
    cy_note.row(vec![
        Cell::Text("nonreciprocal".to_string()),
        Cell::Float(nonreciprocal.c_y()),
    ]);
    let t1 = smatrix_table(&reciprocal, config, "reproduce-supp")?;
    let t2 = smatrix_table(&nonreciprocal, config, "reproduce-supp")?;
    announce(&[
        out.table("smatrix_reciprocal", &t1)?,
        out.table("smatrix_nonreciprocal", &t2)?,
        out.table("c_y_values", &cy_note)?,
    ]);
    Ok(())
}
