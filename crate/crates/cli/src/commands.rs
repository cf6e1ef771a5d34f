//! The spectrum, wavefunction, and verify subcommands.

use dirac1d::model::{Component, EnergyLevel, ValidationWarning};
use dirac1d::oracle::{verify_level_at, OracleConfig, VerificationReport};
use dirac1d::spectrum::{solve_level, RootSolveConfig, SpectrumError};
use dirac1d::wavefunction::{
    count_nodes, ode_residual, spinor_table, Grid, Phi2Origin, PHASE_NOTE,
};

use crate::config::{CliError, OutputFormat, RunConfig};
use crate::output::{emit, fmt_f64, render_csv, render_json_array, JsonObject};

/// One spectrum record: either a solved level or a marker for an absent one.
struct LevelRecord {
    n: u32,
    level: Option<EnergyLevel>,
    diagnostics: String,
}

fn level_diagnostics(level: &EnergyLevel, warning: Option<ValidationWarning>) -> String {
    let mut notes = Vec::new();
    if let Some(ValidationWarning::PermissiveLowerB { .. }) = warning {
        notes.push("permissive_b");
    }
    // α = 2p−1 = √(1+4ξ): zero flags the ξ = −1/4 indicial boundary.
    if level.alpha.abs() <= 1e-8 {
        notes.push("xi_at_quarter_boundary");
    }
    if notes.is_empty() {
        "ok".to_string()
    } else {
        notes.join(";")
    }
}

fn solve_records(cfg: &RunConfig) -> Result<Vec<LevelRecord>, CliError> {
    let problem = cfg.problem()?;
    let root_cfg = RootSolveConfig::default();
    let mut records = Vec::new();
    for n in cfg.n_lo..=cfg.n_hi {
        match solve_level(&problem, n, &root_cfg, cfg.sign) {
            Ok(level) => records.push(LevelRecord {
                n,
                diagnostics: level_diagnostics(&level, problem.warning()),
                level: Some(level),
            }),
            Err(SpectrumError::NoBoundState { .. }) => records.push(LevelRecord {
                n,
                level: None,
                diagnostics: "no_bound_state".to_string(),
            }),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(records)
}

/// Solve levels over the requested range and emit one record per level.
pub fn cmd_spectrum(cfg: &RunConfig) -> Result<(), CliError> {
    let records = solve_records(cfg)?;
    let scale = if cfg.in_units_of_m { cfg.params.mass } else { 1.0 };

    let content = match cfg.format {
        OutputFormat::Json => {
            let objs: Vec<JsonObject> = records
                .iter()
                .map(|r| {
                    JsonObject::new()
                        .string("regime", cfg.regime.as_str())
                        .string("component", cfg.component.as_str())
                        .int("n", r.n as u64)
                        .opt_num("E", r.level.as_ref().map(|l| l.e / scale))
                        .opt_num("p", r.level.as_ref().map(|l| l.p))
                        .opt_num("alpha", r.level.as_ref().map(|l| l.alpha))
                        .opt_num("kappa", r.level.as_ref().map(|l| l.kappa / scale))
                        .string("diagnostics", &r.diagnostics)
                })
                .collect();
            render_json_array(&objs)
        }
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> = records
                .iter()
                .map(|r| {
                    let num =
                        |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
                    vec![
                        cfg.regime.as_str().to_string(),
                        cfg.component.as_str().to_string(),
                        r.n.to_string(),
                        num(r.level.as_ref().map(|l| l.e / scale)),
                        num(r.level.as_ref().map(|l| l.p)),
                        num(r.level.as_ref().map(|l| l.alpha)),
                        num(r.level.as_ref().map(|l| l.kappa / scale)),
                        r.diagnostics.clone(),
                    ]
                })
                .collect();
            render_csv(
                &["regime", "component", "n", "E", "p", "alpha", "kappa", "diagnostics"],
                &rows,
                &[],
            )
        }
    };
    emit(cfg.out.as_deref(), &content)
}

/// Solve one level, build its normalized spinor table, and emit it with a
/// metadata block (norm constant, node count, ODE residual, tail estimate).
pub fn cmd_wavefunction(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.n_lo != cfg.n_hi {
        return Err(CliError::Usage(
            "wavefunction emits one table; give a single --n".into(),
        ));
    }
    let problem = cfg.problem()?;
    let level = solve_level(&problem, cfg.n_lo, &RootSolveConfig::default(), cfg.sign)?;
    let grid = match cfg.grid_points {
        Some(points) => Some(
            Grid::uniform(1e-6 / level.kappa, 40.0 / level.kappa, points)
                .map_err(|e| CliError::Usage(e.to_string()))?,
        ),
        None => None,
    };
    let table = spinor_table(&problem, &level, grid)?;

    let quantized = match level.component {
        Component::Upper => &table.phi1,
        Component::Lower => &table.phi2,
    };
    let nodes = count_nodes(quantized);
    let residual = ode_residual(&level, quantized, &cfg.params, &table.grid)?;

    let scale = if cfg.in_units_of_m { cfg.params.mass } else { 1.0 };
    let phi2_note = match table.phi2_origin {
        Phi2Origin::FirstOrderPartner => "first_order_partner",
        Phi2Origin::None => "none",
        Phi2Origin::Caller => "caller",
    };

    let meta_pairs: Vec<(String, String)> = vec![
        ("E".into(), fmt_f64(level.e / scale)),
        ("p".into(), fmt_f64(level.p)),
        ("alpha".into(), fmt_f64(level.alpha)),
        ("kappa".into(), fmt_f64(level.kappa / scale)),
        ("norm_constant".into(), fmt_f64(table.norm_constant)),
        ("nodes".into(), nodes.to_string()),
        ("ode_residual".into(), fmt_f64(residual.value)),
        ("tail_estimate".into(), fmt_f64(table.tail_estimate)),
        ("phi2".into(), phi2_note.into()),
        ("phase".into(), PHASE_NOTE.into()),
        ("grid_points".into(), table.grid.len().to_string()),
        ("grid_x_min".into(), fmt_f64(table.grid.x_min())),
        ("grid_x_max".into(), fmt_f64(table.grid.x_max())),
    ];

    let content = match cfg.format {
        OutputFormat::Json => {
            let mut meta = JsonObject::new()
                .string("regime", cfg.regime.as_str())
                .string("component", cfg.component.as_str())
                .int("n", level.n as u64);
            for (k, v) in &meta_pairs {
                // Numeric metadata is already rendered; strings need quoting.
                if v.parse::<f64>().is_ok() {
                    meta = meta.raw(k, v.clone());
                } else {
                    meta = meta.string(k, v);
                }
            }
            let mut config_echo = JsonObject::new();
            for (k, v) in cfg.to_config_entries() {
                config_echo = config_echo.string(&k, &v);
            }
            meta = meta.object("config", config_echo);

            let samples: Vec<JsonObject> = (0..table.grid.len())
                .map(|i| {
                    JsonObject::new()
                        .num("x", table.grid.x(i))
                        .num("phi1", table.phi1[i])
                        .num("phi2", table.phi2[i])
                        .num("density", table.density[i])
                })
                .collect();
            format!(
                "{{\n\"metadata\": {},\n\"samples\": {}}}\n",
                meta.render(),
                render_json_array(&samples)
            )
        }
        OutputFormat::Csv => {
            let mut comments: Vec<String> = vec![
                format!("regime={}", cfg.regime.as_str()),
                format!("component={}", cfg.component.as_str()),
                format!("n={}", level.n),
            ];
            comments.extend(meta_pairs.iter().map(|(k, v)| format!("{k}={v}")));
            comments.extend(
                cfg.to_config_entries()
                    .iter()
                    .map(|(k, v)| format!("config.{k}={v}")),
            );
            let rows: Vec<Vec<String>> = (0..table.grid.len())
                .map(|i| {
                    vec![
                        fmt_f64(table.grid.x(i)),
                        fmt_f64(table.phi1[i]),
                        fmt_f64(table.phi2[i]),
                        fmt_f64(table.density[i]),
                    ]
                })
                .collect();
            render_csv(&["x", "phi1", "phi2", "density"], &rows, &comments)
        }
    };
    emit(cfg.out.as_deref(), &content)
}

fn report_to_json(r: &VerificationReport, scale: f64) -> JsonObject {
    JsonObject::new()
        .string("regime", r.level.regime.as_str())
        .string("component", r.level.component.as_str())
        .int("n", r.level.n as u64)
        .num("E", r.level.e / scale)
        .num("epsilon_analytic", r.epsilon_analytic / (scale * scale))
        .num("epsilon_oracle", r.epsilon_oracle / (scale * scale))
        .num("abs_error", r.abs_error / (scale * scale))
        .num("rel_error", r.rel_error)
        .num("energy_error", r.energy_error / scale)
        .int("oracle_nodes", r.oracle_nodes as u64)
        .boolean("pass", r.pass)
        .string("boundary", r.boundary_note)
}

fn report_to_row(r: &VerificationReport, scale: f64) -> Vec<String> {
    vec![
        r.level.regime.as_str().to_string(),
        r.level.component.as_str().to_string(),
        r.level.n.to_string(),
        fmt_f64(r.level.e / scale),
        fmt_f64(r.epsilon_analytic / (scale * scale)),
        fmt_f64(r.epsilon_oracle / (scale * scale)),
        fmt_f64(r.abs_error / (scale * scale)),
        fmt_f64(r.rel_error),
        fmt_f64(r.energy_error / scale),
        r.oracle_nodes.to_string(),
        r.pass.to_string(),
    ]
}

/// Verify each requested level against the Sturm oracle; exit 3 when any
/// report fails tolerance.
pub fn cmd_verify(cfg: &RunConfig) -> Result<(), CliError> {
    let problem = cfg.problem()?;
    let mut oracle_cfg = OracleConfig::default();
    if let Some(points) = cfg.oracle_points {
        oracle_cfg.points = points;
    }
    oracle_cfg.richardson = cfg.richardson;

    let mut reports = Vec::new();
    for n in cfg.n_lo..=cfg.n_hi {
        let e_override = match cfg.inject_energy_offset {
            Some(offset) => {
                let honest = solve_level(&problem, n, &RootSolveConfig::default(), cfg.sign)?;
                Some(honest.e + offset * cfg.params.mass)
            }
            None => None,
        };
        reports.push(verify_level_at(&problem, n, &oracle_cfg, e_override)?);
    }

    let scale = if cfg.in_units_of_m { cfg.params.mass } else { 1.0 };
    let content = match cfg.format {
        OutputFormat::Json => {
            let objs: Vec<JsonObject> =
                reports.iter().map(|r| report_to_json(r, scale)).collect();
            render_json_array(&objs)
        }
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> =
                reports.iter().map(|r| report_to_row(r, scale)).collect();
            render_csv(
                &[
                    "regime",
                    "component",
                    "n",
                    "E",
                    "epsilon_analytic",
                    "epsilon_oracle",
                    "abs_error",
                    "rel_error",
                    "energy_error",
                    "oracle_nodes",
                    "pass",
                ],
                &rows,
                &[],
            )
        }
    };
    emit(cfg.out.as_deref(), &content)?;

    let max_rel = reports.iter().fold(0.0f64, |m, r| m.max(r.rel_error));
    let failed = reports.iter().filter(|r| !r.pass).count();
    eprintln!(
        "verify: {} levels, max relative error on epsilon {:.3e}, {}",
        reports.len(),
        max_rel,
        if failed == 0 { "all pass".to_string() } else { format!("{failed} failed") }
    );
    if failed > 0 {
        return Err(CliError::VerificationFailed {
            failed,
            total: reports.len(),
            max_rel_error: max_rel,
        });
    }
    Ok(())
}
