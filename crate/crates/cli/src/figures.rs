//! Frozen figure-panel definitions and the dataset emitter.
//!
//! Energy panels sweep one potential parameter over a documented range and
//! tabulate the first three levels; density panels tabulate the normalized
//! spinor density of one state. Sweep ranges bracket the captioned parameter
//! values (the source plots do not print numeric axes) and are repeated in
//! the dataset comments so each file is self-describing.

use std::path::Path;

use dirac1d::model::{validate, BPolicy, Component, PotentialParams, Regime};
use dirac1d::spectrum::{solve_level, RootSolveConfig, Sign};
use dirac1d::wavefunction::spinor_table;

use crate::config::CliError;
use crate::output::{fmt_f64, render_csv, write_atomic};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    Range,
    Pseudoscalar,
    Shape,
}

impl SweepVar {
    fn label(self) -> &'static str {
        match self {
            SweepVar::Range => "a",
            SweepVar::Pseudoscalar => "b",
            SweepVar::Shape => "q",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum PanelKind {
    /// (sweep value, E_0, E_1, E_2) over 200 uniform sweep points.
    EnergySweep { var: SweepVar, lo: f64, hi: f64 },
    /// (x, |φ₁|², |φ₂|², density) for one normalized state.
    Density { n: u32 },
}

/// One frozen figure panel: captioned parameters plus the sweep definition.
#[derive(Debug, Clone, Copy)]
pub struct FigureSpec {
    pub id: &'static str,
    pub component: Component,
    pub depth: f64,
    pub range: f64,
    pub pseudoscalar: f64,
    pub shape: f64,
    pub kind: PanelKind,
}

pub const SWEEP_POINTS: usize = 200;

pub const PANELS: &[FigureSpec] = &[
    FigureSpec {
        id: "1a",
        component: Component::Upper,
        depth: 5.0,
        range: 1.0,
        pseudoscalar: 0.1,
        shape: 0.01,
        kind: PanelKind::EnergySweep { var: SweepVar::Range, lo: 0.1, hi: 10.0 },
    },
    FigureSpec {
        id: "1b",
        component: Component::Upper,
        depth: 5.0,
        range: 5.0,
        pseudoscalar: 0.1,
        shape: 0.01,
        kind: PanelKind::EnergySweep { var: SweepVar::Pseudoscalar, lo: 0.05, hi: 3.0 },
    },
    FigureSpec {
        id: "1c",
        component: Component::Upper,
        depth: 10.0,
        range: 1.0,
        pseudoscalar: 1.0,
        shape: 0.01,
        kind: PanelKind::EnergySweep { var: SweepVar::Shape, lo: 0.0, hi: 0.05 },
    },
    FigureSpec {
        id: "2a",
        component: Component::Lower,
        depth: 5.0,
        range: 1.0,
        pseudoscalar: 0.1,
        shape: 0.01,
        kind: PanelKind::EnergySweep { var: SweepVar::Range, lo: 0.1, hi: 10.0 },
    },
    // The source figure shows two lower-component panels for the same
    // captioned family; the dataset is emitted under both ids.
    FigureSpec {
        id: "2b",
        component: Component::Lower,
        depth: 5.0,
        range: 1.0,
        pseudoscalar: 0.1,
        shape: 0.01,
        kind: PanelKind::EnergySweep { var: SweepVar::Range, lo: 0.1, hi: 10.0 },
    },
    FigureSpec {
        id: "2c",
        component: Component::Lower,
        depth: 5.0,
        range: 5.0,
        pseudoscalar: 0.1,
        shape: 0.01,
        kind: PanelKind::EnergySweep { var: SweepVar::Pseudoscalar, lo: 0.05, hi: 3.0 },
    },
    FigureSpec {
        id: "2d",
        component: Component::Lower,
        depth: 10.0,
        range: 1.0,
        pseudoscalar: 1.0,
        shape: 0.01,
        kind: PanelKind::EnergySweep { var: SweepVar::Shape, lo: 0.0, hi: 0.05 },
    },
    FigureSpec {
        id: "3a",
        component: Component::Upper,
        depth: 5.0,
        range: 1.0,
        pseudoscalar: 0.1,
        shape: 0.01,
        kind: PanelKind::Density { n: 0 },
    },
    FigureSpec {
        id: "3b",
        component: Component::Upper,
        depth: 5.0,
        range: 0.8,
        pseudoscalar: 0.1,
        shape: 0.01,
        kind: PanelKind::Density { n: 1 },
    },
    FigureSpec {
        id: "3c",
        component: Component::Upper,
        depth: 5.0,
        range: 0.5,
        pseudoscalar: 0.1,
        shape: 0.01,
        kind: PanelKind::Density { n: 2 },
    },
];

pub fn find_panel(id: &str) -> Option<&'static FigureSpec> {
    PANELS.iter().find(|p| p.id == id)
}

fn panel_params(panel: &FigureSpec, sweep_value: Option<f64>) -> PotentialParams {
    let mut params =
        PotentialParams::new(1.0, panel.depth, panel.range, panel.pseudoscalar, panel.shape);
    if let (Some(v), PanelKind::EnergySweep { var, .. }) = (sweep_value, panel.kind) {
        match var {
            SweepVar::Range => params.range = v,
            SweepVar::Pseudoscalar => params.pseudoscalar = v,
            SweepVar::Shape => params.shape = v,
        }
    }
    params
}

fn energy_sweep_csv(panel: &FigureSpec, var: SweepVar, lo: f64, hi: f64) -> (String, String) {
    let root_cfg = RootSolveConfig::default();
    let mut rows = Vec::with_capacity(SWEEP_POINTS);
    for i in 0..SWEEP_POINTS {
        let v = lo + (hi - lo) * i as f64 / (SWEEP_POINTS - 1) as f64;
        let params = panel_params(panel, Some(v));
        let mut row = vec![fmt_f64(v)];
        for n in 0..3u32 {
            // Per-point solver failures become empty fields, not aborts.
            let field = validate(params, Regime::SpinSymmetricKratzer, panel.component, BPolicy::Strict)
                .ok()
                .and_then(|problem| solve_level(&problem, n, &root_cfg, Sign::Plus).ok())
                .map(|level| fmt_f64(level.e))
                .unwrap_or_default();
            row.push(field);
        }
        rows.push(row);
    }
    let comments = vec![
        format!("panel={}", panel.id),
        "regime=kratzer".to_string(),
        format!("component={}", panel.component.as_str()),
        "M=1".to_string(),
        format!("D={}", panel.depth),
        format!("a={}", panel.range),
        format!("b={}", panel.pseudoscalar),
        format!("q={}", panel.shape),
        format!("sweep={} range=[{lo},{hi}] points={SWEEP_POINTS}", var.label()),
        "columns=sweep value then E_n for n=0,1,2; empty field = no solution".to_string(),
    ];
    let csv = render_csv(&[var.label(), "E0", "E1", "E2"], &rows, &comments);

    let stub = format!(
        "# gnuplot stub for panel {id}\n\
         set datafile separator ','\n\
         set xlabel '{x}'\n\
         set ylabel 'E/M'\n\
         set key outside\n\
         plot 'fig{id}.csv' using 1:2 with lines title 'n=0', \\\n\
         \x20    '' using 1:3 with lines title 'n=1', \\\n\
         \x20    '' using 1:4 with lines title 'n=2'\n",
        id = panel.id,
        x = var.label()
    );
    (csv, stub)
}

fn density_csv(panel: &FigureSpec, n: u32) -> Result<(String, String), CliError> {
    let params = panel_params(panel, None);
    let problem = validate(params, Regime::SpinSymmetricKratzer, panel.component, BPolicy::Strict)?;
    let level = solve_level(&problem, n, &RootSolveConfig::default(), Sign::Plus)?;
    let table = spinor_table(&problem, &level, None)?;

    let rows: Vec<Vec<String>> = (0..table.grid.len())
        .map(|i| {
            vec![
                fmt_f64(table.grid.x(i)),
                fmt_f64(table.phi1[i] * table.phi1[i]),
                fmt_f64(table.phi2[i] * table.phi2[i]),
                fmt_f64(table.density[i]),
            ]
        })
        .collect();
    let comments = vec![
        format!("panel={}", panel.id),
        "regime=kratzer".to_string(),
        format!("component={}", panel.component.as_str()),
        format!("n={n}"),
        "M=1".to_string(),
        format!("D={}", panel.depth),
        format!("a={}", panel.range),
        format!("b={}", panel.pseudoscalar),
        format!("q={}", panel.shape),
        format!("E={}", fmt_f64(level.e)),
        format!("norm_constant={}", fmt_f64(table.norm_constant)),
        "columns=x, phi1^2, phi2^2, density (normalized)".to_string(),
    ];
    let csv = render_csv(&["x", "phi1_sq", "phi2_sq", "density"], &rows, &comments);

    let stub = format!(
        "# gnuplot stub for panel {id}\n\
         set datafile separator ','\n\
         set xlabel 'x'\n\
         set key outside\n\
         plot 'fig{id}.csv' using 1:2 with lines title '|phi1|^2', \\\n\
         \x20    '' using 1:3 with lines title '|phi2|^2', \\\n\
         \x20    '' using 1:4 with lines title 'density'\n",
        id = panel.id
    );
    Ok((csv, stub))
}

/// Emit one panel's dataset and plot stub into `out_dir`.
pub fn cmd_figure(id: &str, out_dir: &Path) -> Result<(), CliError> {
    let panel = find_panel(id).ok_or_else(|| {
        let ids: Vec<&str> = PANELS.iter().map(|p| p.id).collect();
        CliError::Usage(format!("unknown figure id `{id}` (known: {})", ids.join(" ")))
    })?;
    if !out_dir.is_dir() {
        return Err(CliError::Usage(format!(
            "output directory {} does not exist",
            out_dir.display()
        )));
    }

    let (csv, stub) = match panel.kind {
        PanelKind::EnergySweep { var, lo, hi } => energy_sweep_csv(panel, var, lo, hi),
        PanelKind::Density { n } => density_csv(panel, n)?,
    };
    write_atomic(&out_dir.join(format!("fig{id}.csv")), &csv)?;
    write_atomic(&out_dir.join(format!("fig{id}.gnuplot")), &stub)?;
    Ok(())
}
