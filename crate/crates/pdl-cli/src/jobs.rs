//! The batch jobs behind the CLI subcommands.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use pdl_core::analytic;
use pdl_core::observables::{self, DelayStatus};
use pdl_core::ode;
use pdl_core::trace::AmplitudeTrace;

use crate::config::{config_echo, load_config, parse_config, FileConfig};
use crate::output::{num, write_mode_sidecar, Table};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Solver {
    Analytic,
    Ode,
    Both,
}

/// An `evolve` job: amplitude/probability/intensity time series for the
/// chosen solver(s).
#[derive(Debug, Clone)]
pub struct EvolveSpec {
    pub config: FileConfig,
    pub out_dir: PathBuf,
    pub solver: Solver,
    /// Sample count over `[0, t_end]`; at least 2.
    pub t_points: usize,
    /// Permit analytic evaluation beyond the truncation validity windows.
    pub allow_truncated: bool,
    /// Also write the full mode vectors to a binary sidecar.
    pub save_modes: bool,
    /// Fixed-step RK4 instead of the adaptive integrator (reproducibility
    /// runs); the value is the step size.
    pub fixed_step: Option<f64>,
}

/// A `sweep` job: one delay report per detuning grid point.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub config: FileConfig,
    pub out_dir: PathBuf,
    /// Grid bounds as multiples of γ₂ (absolute detunings when γ₂ = 0).
    pub ratio_min: f64,
    pub ratio_max: f64,
    /// Grid size; at least 2.
    pub points: usize,
    pub jobs: usize,
    /// Add the normalized columns δ/γ₂ and Δt·γ₂.
    pub normalized: bool,
}

fn time_grid(t_end: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| t_end * i as f64 / (points - 1) as f64)
        .collect()
}

fn validate_grid(points: usize) -> Result<(), CliError> {
    if points < 2 {
        return Err(CliError::Config(format!(
            "grid needs at least 2 points, got {points}"
        )));
    }
    Ok(())
}

pub fn run_evolve(spec: &EvolveSpec) -> Result<Vec<PathBuf>, CliError> {
    validate_grid(spec.t_points)?;
    let cfg = &spec.config.system;
    let t_end = spec.config.integrator.t_end;
    let times = time_grid(t_end, spec.t_points);
    let mut written = Vec::new();

    let analytic_requested = matches!(spec.solver, Solver::Analytic | Solver::Both);
    if analytic_requested && t_end > analytic::C2_WINDOW && !spec.allow_truncated {
        return Err(CliError::Config(format!(
            "t_end = {t_end} exceeds the analytic validity window (t < {}); \
             the omitted reflection/multiple-scattering terms turn on there. \
             Pass --allow-truncated to proceed anyway",
            analytic::C2_WINDOW
        )));
    }

    let header = config_echo(&spec.config);
    let mut analytic_trace: Option<AmplitudeTrace> = None;
    if analytic_requested {
        let trace = AmplitudeTrace::from_analytic(cfg, &times, spec.save_modes);
        written.push(write_amplitudes(
            &spec.out_dir.join("amplitudes_analytic.csv"),
            "evolve --solver analytic",
            &header,
            &trace,
            Some(cfg),
        )?);
        let mut table = Table::create(
            &spec.out_dir.join("intensity_analytic.csv"),
            "evolve --solver analytic",
            &header,
            &["t", "intensity_no_scatter", "intensity_with_scatter"],
        )?;
        for &t in &times {
            table.row(&[
                num(t),
                num(observables::intensity_expectation(cfg, t, false)),
                num(observables::intensity_expectation(cfg, t, true)),
            ])?;
        }
        written.push(table.finish()?);
        if spec.save_modes {
            let modes = trace.modes.as_ref().expect("modes recorded");
            let path = spec.out_dir.join("modes_analytic.bin");
            write_mode_sidecar(&path, modes.half_width, &modes.samples)?;
            written.push(path);
        }
        analytic_trace = Some(trace);
    }

    let mut ode_trace: Option<AmplitudeTrace> = None;
    if matches!(spec.solver, Solver::Ode | Solver::Both) {
        let record_modes = true; // needed for the mode-sum intensity column
        let solution = match spec.fixed_step {
            Some(step) => ode::evolve_rk4(cfg, step, t_end, &times, record_modes),
            None => ode::evolve(cfg, &spec.config.integrator, &times, record_modes)
                .map_err(|e| CliError::Runtime(format!("ode solver: {e}")))?,
        };
        let trace = solution.trace;
        written.push(write_amplitudes(
            &spec.out_dir.join("amplitudes_ode.csv"),
            "evolve --solver ode",
            &header,
            &trace,
            None,
        )?);
        let modes = trace.modes.as_ref().expect("modes recorded");
        let mut table = Table::create(
            &spec.out_dir.join("intensity_ode.csv"),
            "evolve --solver ode",
            &header,
            &["t", "intensity_modes"],
        )?;
        for (i, &t) in trace.times.iter().enumerate() {
            let intensity = observables::intensity_from_modes(cfg, cfg.z3, &modes.samples[i]);
            table.row(&[num(t), num(intensity)])?;
        }
        written.push(table.finish()?);
        if spec.save_modes {
            let path = spec.out_dir.join("modes_ode.bin");
            write_mode_sidecar(&path, modes.half_width, &modes.samples)?;
            written.push(path);
        }
        ode_trace = Some(trace);
    }

    if let (Some(a), Some(o)) = (&analytic_trace, &ode_trace) {
        let mut table = Table::create(
            &spec.out_dir.join("residuals.csv"),
            "evolve --solver both",
            &header,
            &["t", "d_c1", "d_c2", "d_c3", "max_abs_diff"],
        )?;
        for i in 0..a.times.len() {
            let d1 = (a.c1[i] - o.c1[i]).norm();
            let d2 = (a.c2[i] - o.c2[i]).norm();
            let d3 = (a.c3[i] - o.c3[i]).norm();
            table.row(&[num(a.times[i]), num(d1), num(d2), num(d3), num(d1.max(d2).max(d3))])?;
        }
        written.push(table.finish()?);
    }

    Ok(written)
}

fn write_amplitudes(
    path: &Path,
    command: &str,
    header: &[(String, String)],
    trace: &AmplitudeTrace,
    with_free_column: Option<&pdl_core::SystemConfig>,
) -> Result<PathBuf, CliError> {
    let mut columns = vec![
        "t", "re_c1", "im_c1", "re_c2", "im_c2", "re_c3", "im_c3", "p1", "p2", "p3",
    ];
    if with_free_column.is_some() {
        columns.push("p3_free");
    }
    columns.push("norm2");
    let mut table = Table::create(path, command, header, &columns)?;
    for (i, &t) in trace.times.iter().enumerate() {
        let mut cells = vec![
            num(t),
            num(trace.c1[i].re),
            num(trace.c1[i].im),
            num(trace.c2[i].re),
            num(trace.c2[i].im),
            num(trace.c3[i].re),
            num(trace.c3[i].im),
            num(trace.c1[i].norm_sqr()),
            num(trace.c2[i].norm_sqr()),
            num(trace.c3[i].norm_sqr()),
        ];
        if let Some(cfg) = with_free_column {
            cells.push(num(analytic::c3_free(cfg, t).norm_sqr()));
        }
        cells.push(num(trace.norm_sq[i]));
        table.row(&cells)?;
    }
    table.finish()
}

pub fn run_sweep(spec: &SweepSpec) -> Result<PathBuf, CliError> {
    validate_grid(spec.points)?;
    let cfg = &spec.config.system;
    let unit = if cfg.gamma2 > 0.0 { cfg.gamma2 } else { 1.0 };
    let grid: Vec<f64> = (0..spec.points)
        .map(|i| {
            let ratio = spec.ratio_min
                + (spec.ratio_max - spec.ratio_min) * i as f64 / (spec.points - 1) as f64;
            ratio * unit
        })
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.jobs)
        .build()
        .map_err(|e| CliError::Runtime(format!("worker pool: {e}")))?;
    let reports: Vec<_> = pool.install(|| {
        grid.par_iter()
            .map(|&delta| observables::delay_report(cfg, delta))
            .collect()
    });

    let mut columns = vec![
        "delta",
        "dt_phase",
        "dt_group",
        "dt_c3_closed",
        "dt_c3_quad",
        "dt_field_quad",
        "status",
    ];
    if spec.normalized {
        columns.extend_from_slice(&[
            "delta_over_gamma2",
            "dt_group_x_gamma2",
            "dt_c3_closed_x_gamma2",
            "dt_c3_quad_x_gamma2",
        ]);
    }
    let mut header = config_echo(&spec.config);
    header.push(("grid".into(), format!(
        "delta/gamma2 in [{}, {}], {} points",
        spec.ratio_min, spec.ratio_max, spec.points
    )));
    let mut table = Table::create(&spec.out_dir.join("delays.csv"), "sweep", &header, &columns)?;
    let opt = |v: Option<f64>| v.map(num).unwrap_or_else(|| "nan".into());
    for r in &reports {
        let mut cells = vec![
            num(r.delta),
            num(r.dt_phase),
            num(r.dt_group),
            num(r.dt_c3_closed),
            opt(r.dt_c3_quad),
            opt(r.dt_field_quad),
            match &r.status {
                DelayStatus::Ok => "ok".to_string(),
                DelayStatus::Failed(msg) => format!("failed: {}", msg.replace(',', ";")),
            },
        ];
        if spec.normalized {
            cells.push(num(r.delta / unit));
            cells.push(num(r.dt_group * unit));
            cells.push(num(r.dt_c3_closed * unit));
            cells.push(opt(r.dt_c3_quad.map(|v| v * unit)));
        }
        table.row(&cells)?;
    }
    table.finish()
}

/// The three canned figure configurations shipped with the repo.
pub const DELAY_CURVES_CONF: &str = include_str!("../configs/delay_curves.conf");
pub const EXCITATION_DYNAMICS_CONF: &str =
    include_str!("../configs/excitation_dynamics.conf");
pub const DETECTOR_RESHAPING_CONF: &str =
    include_str!("../configs/detector_reshaping.conf");

/// Regenerates the data behind the three figures: the classical/quantum
/// delay curves over detuning, the three-atom excitation dynamics, and the
/// early- vs late-time reshaping of the detector response.
pub fn run_figures(out_dir: &Path, jobs: usize) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();

    // Delay curves over the detuning sweep (sign structure: group delay
    // negative inside |δ| < γ₂/2).
    let delay_curves = parse_config(DELAY_CURVES_CONF)?;
    written.push(run_sweep(&SweepSpec {
        config: delay_curves,
        out_dir: out_dir.join("delay_curves"),
        ratio_min: -3.0,
        ratio_max: 3.0,
        points: 121,
        jobs,
        normalized: true,
    })?);

    // Excitation dynamics with both solvers plus the residual column.
    let dynamics = parse_config(EXCITATION_DYNAMICS_CONF)?;
    written.extend(run_evolve(&EvolveSpec {
        config: dynamics,
        out_dir: out_dir.join("excitation_dynamics"),
        solver: Solver::Both,
        t_points: 376,
        allow_truncated: false,
        save_modes: false,
        fixed_step: None,
    })?);

    // Detector-response reshaping: the shipped anomalous-dispersion detuning
    // and a derived normal-dispersion companion (δ = 1.5·γ₂).
    let reshaping = parse_config(DETECTOR_RESHAPING_CONF)?;
    written.extend(run_evolve(&EvolveSpec {
        config: reshaping.clone(),
        out_dir: out_dir.join("detector_reshaping").join("anomalous"),
        solver: Solver::Analytic,
        t_points: 501,
        allow_truncated: true,
        save_modes: false,
        fixed_step: None,
    })?);
    let mut normal = reshaping;
    normal.system.delta = 1.5 * normal.system.gamma2;
    written.extend(run_evolve(&EvolveSpec {
        config: normal,
        out_dir: out_dir.join("detector_reshaping").join("normal"),
        solver: Solver::Analytic,
        t_points: 501,
        allow_truncated: true,
        save_modes: false,
        fixed_step: None,
    })?);

    Ok(written)
}

pub fn load_job_config(path: &Path) -> Result<FileConfig, CliError> {
    load_config(path)
}
