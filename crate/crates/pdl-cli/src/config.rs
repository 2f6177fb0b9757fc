//! Flat key-value configuration files: one `key = value` per line, `#`
//! comments, keys named exactly after the parameter fields.

use std::path::Path;

use pdl_core::ode::IntegratorSettings;
use pdl_core::params::SystemConfig;

use crate::CliError;

/// Everything a job needs from a config file: the physical parameters plus
/// the integrator settings (all keys optional, defaults otherwise).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FileConfig {
    pub system: SystemConfig,
    pub integrator: IntegratorSettings,
}

pub fn load_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse_config(text: &str) -> Result<FileConfig, CliError> {
    let mut cfg = FileConfig::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", lineno + 1)))?;
        let key = key.trim();
        let value = value.trim();
        let bad = |what: &str| {
            CliError::Config(format!("line {}: {key}: invalid {what} '{value}'", lineno + 1))
        };
        let float = || value.parse::<f64>().map_err(|_| bad("number"));
        match key {
            "gamma1" => cfg.system.gamma1 = float()?,
            "gamma2" => cfg.system.gamma2 = float()?,
            "gamma3" => cfg.system.gamma3 = float()?,
            "delta" => cfg.system.delta = float()?,
            "f" => cfg.system.f = float()?,
            "m0" => cfg.system.m0 = value.parse::<i64>().map_err(|_| bad("integer"))?,
            "mode_half_width" => {
                cfg.system.mode_half_width = value.parse::<i64>().map_err(|_| bad("integer"))?
            }
            "z1" => cfg.system.z1 = float()?,
            "z2" => cfg.system.z2 = float()?,
            "z3" => cfg.system.z3 = float()?,
            "delta_c" => cfg.system.delta_c = float()?,
            "rel_tol" => cfg.integrator.rel_tol = float()?,
            "abs_tol" => cfg.integrator.abs_tol = float()?,
            "max_step" => cfg.integrator.max_step = float()?,
            "t_end" => cfg.integrator.t_end = float()?,
            other => {
                return Err(CliError::Config(format!(
                    "line {}: unknown key '{other}'",
                    lineno + 1
                )))
            }
        }
    }
    cfg.system
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    if !cfg.integrator.validate() {
        return Err(CliError::Config(
            "integrator settings must all be positive".into(),
        ));
    }
    Ok(cfg)
}

/// `key = value` echo of the fully resolved configuration, used as the
/// provenance header of every output file.
pub fn config_echo(cfg: &FileConfig) -> Vec<(String, String)> {
    let s = &cfg.system;
    let i = &cfg.integrator;
    vec![
        ("gamma1".into(), format!("{}", s.gamma1)),
        ("gamma2".into(), format!("{}", s.gamma2)),
        ("gamma3".into(), format!("{}", s.gamma3)),
        ("delta".into(), format!("{}", s.delta)),
        ("f".into(), format!("{}", s.f)),
        ("m0".into(), format!("{}", s.m0)),
        ("mode_half_width".into(), format!("{}", s.mode_half_width)),
        ("z1".into(), format!("{}", s.z1)),
        ("z2".into(), format!("{}", s.z2)),
        ("z3".into(), format!("{}", s.z3)),
        ("delta_c".into(), format!("{}", s.delta_c)),
        ("rel_tol".into(), format!("{}", i.rel_tol)),
        ("abs_tol".into(), format!("{}", i.abs_tol)),
        ("max_step".into(), format!("{}", i.max_step)),
        ("t_end".into(), format!("{}", i.t_end)),
    ]
}
