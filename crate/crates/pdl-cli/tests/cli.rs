use std::path::Path;
use std::process::Command;

use pdl_cli::config::{load_config, parse_config};
use pdl_cli::jobs::{run_evolve, run_sweep, EvolveSpec, Solver, SweepSpec};
use pdl_cli::CliError;

fn mini_config(half_width: i64, t_end: f64) -> pdl_cli::config::FileConfig {
    let mut cfg = pdl_cli::config::FileConfig::default();
    cfg.system.mode_half_width = half_width;
    cfg.system.f = 1e-3;
    cfg.integrator.t_end = t_end;
    cfg.integrator.rel_tol = 1e-8;
    cfg.integrator.abs_tol = 1e-10;
    cfg
}

#[test]
fn config_defaults_and_overrides() {
    let parsed = parse_config("gamma1 = 2.5\n# comment\n\nmode_half_width = 32 # inline\n").unwrap();
    assert_eq!(parsed.system.gamma1, 2.5);
    assert_eq!(parsed.system.mode_half_width, 32);
    assert_eq!(parsed.system.gamma2, 64.0); // untouched default
    assert_eq!(parsed.integrator.rel_tol, 1e-10);
}

#[test]
fn config_rejects_unknown_keys_and_bad_values() {
    let err = parse_config("gamma9 = 1\n").unwrap_err();
    assert!(matches!(err, CliError::Config(ref m) if m.contains("unknown key")));
    let err = parse_config("gamma1 = fast\n").unwrap_err();
    assert!(matches!(err, CliError::Config(ref m) if m.contains("invalid number")));
    let err = parse_config("gamma1\n").unwrap_err();
    assert!(matches!(err, CliError::Config(ref m) if m.contains("expected key = value")));
}

#[test]
fn config_validation_failures_are_config_errors() {
    let err = parse_config("m0 = 102\n").unwrap_err();
    assert!(matches!(err, CliError::Config(ref m) if m.contains("divisible by 4")));
    let err = parse_config("rel_tol = -1\n").unwrap_err();
    assert!(matches!(err, CliError::Config(_)));
}

#[test]
fn shipped_figure_configs_parse() {
    for text in [
        pdl_cli::jobs::DELAY_CURVES_CONF,
        pdl_cli::jobs::EXCITATION_DYNAMICS_CONF,
        pdl_cli::jobs::DETECTOR_RESHAPING_CONF,
    ] {
        parse_config(text).unwrap();
    }
}

#[test]
fn evolve_writes_self_describing_tables() {
    let dir = tempfile::tempdir().unwrap();
    let written = run_evolve(&EvolveSpec {
        config: mini_config(64, 0.75),
        out_dir: dir.path().to_path_buf(),
        solver: Solver::Both,
        t_points: 16,
        allow_truncated: false,
        save_modes: true,
        fixed_step: None,
    })
    .unwrap();
    let names: Vec<_> = written
        .iter()
        .map(|p| p.file_name().unwrap().to_str().unwrap().to_string())
        .collect();
    for expect in [
        "amplitudes_analytic.csv",
        "intensity_analytic.csv",
        "modes_analytic.bin",
        "amplitudes_ode.csv",
        "intensity_ode.csv",
        "modes_ode.bin",
        "residuals.csv",
    ] {
        assert!(names.contains(&expect.to_string()), "missing {expect}");
    }
    let text = std::fs::read_to_string(dir.path().join("amplitudes_analytic.csv")).unwrap();
    assert!(text.starts_with("# pdl evolve"));
    assert!(text.contains("# gamma2 = 64"));
    assert!(text.contains("p3_free"));
    // The ODE table carries no analytic-only column.
    let ode_text = std::fs::read_to_string(dir.path().join("amplitudes_ode.csv")).unwrap();
    assert!(!ode_text.contains("p3_free"));
}

#[test]
fn evolve_refuses_truncated_window_without_flag() {
    let dir = tempfile::tempdir().unwrap();
    let spec = EvolveSpec {
        config: mini_config(32, 1.5),
        out_dir: dir.path().to_path_buf(),
        solver: Solver::Analytic,
        t_points: 8,
        allow_truncated: false,
        save_modes: false,
        fixed_step: None,
    };
    let err = run_evolve(&spec).unwrap_err();
    assert!(matches!(err, CliError::Config(ref m) if m.contains("allow-truncated")));
    let ok = run_evolve(&EvolveSpec {
        allow_truncated: true,
        ..spec
    });
    assert!(ok.is_ok());
}

#[test]
fn mode_sidecar_layout() {
    let dir = tempfile::tempdir().unwrap();
    run_evolve(&EvolveSpec {
        config: mini_config(8, 0.4),
        out_dir: dir.path().to_path_buf(),
        solver: Solver::Analytic,
        t_points: 3,
        allow_truncated: false,
        save_modes: true,
        fixed_step: None,
    })
    .unwrap();
    let bytes = std::fs::read(dir.path().join("modes_analytic.bin")).unwrap();
    let half_width = u64::from_le_bytes(bytes[0..8].try_into().unwrap());
    let count = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
    assert_eq!(half_width, 8);
    assert_eq!(count, 3);
    assert_eq!(bytes.len(), 16 + 3 * 17 * 2 * 8);
    // First sample is t = 0 where every mode amplitude vanishes.
    let first = f64::from_le_bytes(bytes[16..24].try_into().unwrap());
    assert_eq!(first, 0.0);
}

#[test]
fn sweep_is_deterministic_across_runs_and_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let spec = |out: &Path, jobs: usize| SweepSpec {
        config: mini_config(8, 0.5),
        out_dir: out.to_path_buf(),
        ratio_min: -2.0,
        ratio_max: 2.0,
        points: 21,
        jobs,
        normalized: true,
    };
    let a = run_sweep(&spec(&dir.path().join("a"), 1)).unwrap();
    let b = run_sweep(&spec(&dir.path().join("b"), 4)).unwrap();
    let bytes_a = std::fs::read(a).unwrap();
    let bytes_b = std::fs::read(b).unwrap();
    assert_eq!(bytes_a, bytes_b, "sweep output must be byte-identical");
}

#[test]
fn fixed_step_solver_round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    run_evolve(&EvolveSpec {
        config: mini_config(32, 0.3),
        out_dir: dir.path().to_path_buf(),
        solver: Solver::Ode,
        t_points: 4,
        allow_truncated: false,
        save_modes: false,
        fixed_step: Some(5e-5),
    })
    .unwrap();
    let text = std::fs::read_to_string(dir.path().join("amplitudes_ode.csv")).unwrap();
    let last = text.lines().next_back().unwrap();
    let norm2: f64 = last.split(',').next_back().unwrap().parse().unwrap();
    assert!((norm2 - 1.0).abs() < 1e-6, "norm² = {norm2}");
}

#[test]
fn binary_exit_codes_follow_the_contract() {
    let bin = env!("CARGO_BIN_EXE_pdl");
    let dir = tempfile::tempdir().unwrap();

    // Configuration error -> exit 2.
    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "m0 = 102\n").unwrap();
    let status = Command::new(bin)
        .args(["evolve", "--config"])
        .arg(&bad)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&status.stderr).contains("divisible by 4"));

    // Invariant failure (deliberately tiny mode grid) -> exit 1.
    let tiny = dir.path().join("tiny.conf");
    std::fs::write(
        &tiny,
        "mode_half_width = 16\nrel_tol = 1e-8\nabs_tol = 1e-10\nf = 0.001\n",
    )
    .unwrap();
    let status = Command::new(bin)
        .args(["compare", "--config"])
        .arg(&tiny)
        .arg("--out")
        .arg(dir.path().join("cmp"))
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(1));

    // Success -> exit 0.
    let good = dir.path().join("good.conf");
    std::fs::write(&good, "mode_half_width = 16\nt_end = 0.5\n").unwrap();
    let status = Command::new(bin)
        .args(["evolve", "--config"])
        .arg(&good)
        .arg("--out")
        .arg(dir.path().join("ok"))
        .args(["--solver", "analytic", "--t-points", "6"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0));
}

#[test]
fn worker_count_precedence() {
    assert_eq!(pdl_cli::worker_count(Some(3)), 3);
    assert!(pdl_cli::worker_count(None) >= 1);
    // The environment default kicks in only when no flag is given.
    std::env::set_var("PDL_DEFAULT_JOBS", "7");
    assert_eq!(pdl_cli::worker_count(None), 7);
    assert_eq!(pdl_cli::worker_count(Some(2)), 2);
    std::env::remove_var("PDL_DEFAULT_JOBS");
}

#[test]
fn compare_skips_scattering_checks_without_scatterer() {
    let mut config = mini_config(256, 1.0);
    config.system.gamma2 = 0.0;
    config.system.delta = 0.0;
    let rows = pdl_cli::compare::run_checks(&config).unwrap();
    let skipped: Vec<_> = rows
        .iter()
        .filter(|r| r.status == pdl_cli::compare::CheckStatus::Skip)
        .map(|r| r.name)
        .collect();
    for name in [
        "envelope_identity",
        "c3_decomposition",
        "delay_closed_form",
        "factor_of_two",
        "delay_sign_pattern",
    ] {
        assert!(skipped.contains(&name), "{name} should be skipped");
    }
}

#[test]
fn load_config_reports_missing_file_as_config_error() {
    let err = load_config(Path::new("/nonexistent/path.conf")).unwrap_err();
    assert!(matches!(err, CliError::Config(_)));
}
