//! Flat key=value run configuration.
//!
//! Lines are `key = value`; `#` starts a comment. The four model parameters
//! (q, h, theta_ig, theta_hl) are required, everything else is optional.
//! Unknown or duplicate keys are rejected so a config diff always means a
//! real difference between runs.

use std::collections::HashMap;
use std::path::Path;

use ignifront::front_solver::SolveOptions;
use ignifront::model::{validate_params, ModelParams};

use crate::run::CliError;

const KNOWN_KEYS: &[&str] = &[
    "q",
    "h",
    "theta_ig",
    "theta_hl",
    "phi_points",
    "phi_r_min_factor",
    "psi_points",
    "psi_r_max_factor",
    "portrait_c",
    "portrait_u_min",
    "portrait_u_max",
    "portrait_v_min",
    "portrait_v_max",
    "portrait_nu",
    "portrait_nv",
    "melnikov_c_min",
    "melnikov_c_max",
    "melnikov_points",
    "profile_x_min",
    "profile_x_max",
    "profile_points",
    "ode_rtol",
    "ode_atol",
    "epsilon_seed_factor",
    "tol_intersect_factor",
    "tol_r_factor",
    "pde_dx",
    "pde_half_length",
    "pde_final_time",
    "pde_smoothing_width",
    "pde_window_fraction",
    "pde_record_dt",
    "pde_edge_margin",
    "pde_drift_time",
    "pde_snapshot_times",
];

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: ModelParams,
    values: HashMap<String, String>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<RunConfig, CliError> {
        let mut values = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "config line {}: expected key=value, got {raw:?}",
                    lineno + 1
                )));
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!(
                    "config line {}: unknown key {key:?}",
                    lineno + 1
                )));
            }
            if values.insert(key.clone(), value).is_some() {
                return Err(CliError::Usage(format!(
                    "config line {}: duplicate key {key:?}",
                    lineno + 1
                )));
            }
        }

        let require = |key: &str| -> Result<f64, CliError> {
            let s = values
                .get(key)
                .ok_or_else(|| CliError::Usage(format!("missing required key {key:?}")))?;
            s.parse::<f64>()
                .map_err(|_| CliError::Usage(format!("key {key:?}: not a number: {s:?}")))
        };
        let q = require("q")?;
        let h = require("h")?;
        let theta_ig = require("theta_ig")?;
        let theta_hl = require("theta_hl")?;
        let params = validate_params(q, h, theta_ig, theta_hl).map_err(CliError::Module)?;
        let cfg = RunConfig { params, values };
        cfg.validate_overrides()?;
        Ok(cfg)
    }

    /// Every numeric override must satisfy the owning module's
    /// preconditions before any computation starts.
    fn validate_overrides(&self) -> Result<(), CliError> {
        for key in [
            "phi_r_min_factor",
            "psi_r_max_factor",
            "ode_rtol",
            "ode_atol",
            "epsilon_seed_factor",
            "tol_intersect_factor",
            "tol_r_factor",
            "pde_dx",
            "pde_half_length",
            "pde_final_time",
            "pde_smoothing_width",
            "pde_record_dt",
            "pde_edge_margin",
        ] {
            if let Some(v) = self.opt_f64(key)? {
                if !(v > 0.0) {
                    return Err(CliError::Usage(format!("{key} must be positive, got {v}")));
                }
            }
        }
        if let Some(v) = self.opt_f64("phi_r_min_factor")? {
            if v >= 1.0 {
                return Err(CliError::Usage(format!(
                    "phi_r_min_factor must be < 1, got {v}"
                )));
            }
        }
        if let Some(w) = self.opt_f64("pde_window_fraction")? {
            if !(w > 0.0 && w <= 0.5) {
                return Err(CliError::Usage(format!(
                    "pde_window_fraction must lie in (0, 0.5], got {w}"
                )));
            }
        }
        if let Some(c) = self.opt_f64("portrait_c")? {
            if c < 0.0 {
                return Err(CliError::Usage(format!(
                    "portrait_c must be non-negative, got {c}"
                )));
            }
        }
        if let Some(c) = self.opt_f64("melnikov_c_min")? {
            if c < 0.0 {
                return Err(CliError::Usage(format!(
                    "melnikov_c_min must be non-negative, got {c}"
                )));
            }
        }
        for key in ["phi_points", "psi_points", "portrait_nu", "portrait_nv"] {
            if let Some(n) = self.opt_usize(key)? {
                if n < 2 {
                    return Err(CliError::Usage(format!("{key} must be >= 2, got {n}")));
                }
            }
        }
        if let Some(n) = self.opt_usize("melnikov_points")? {
            if n < 2 {
                return Err(CliError::Usage(format!(
                    "melnikov_points must be >= 2, got {n}"
                )));
            }
        }
        if let Some(pair) = self.opt_f64("melnikov_c_max")? {
            let lo = self.f64_or("melnikov_c_min", 0.0)?;
            if pair <= lo {
                return Err(CliError::Usage(format!(
                    "melnikov_c_max must exceed melnikov_c_min, got {pair}"
                )));
            }
        }
        self.snapshot_times()?;
        Ok(())
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(s) => s
                .parse::<f64>()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("key {key:?}: not a number: {s:?}"))),
        }
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        Ok(self.opt_f64(key)?.unwrap_or(default))
    }

    pub fn opt_usize(&self, key: &str) -> Result<Option<usize>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(s) => s
                .parse::<usize>()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("key {key:?}: not a count: {s:?}"))),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        Ok(self.opt_usize(key)?.unwrap_or(default))
    }

    pub fn snapshot_times(&self) -> Result<Vec<f64>, CliError> {
        match self.values.get("pde_snapshot_times") {
            None => Ok(Vec::new()),
            Some(s) => s
                .split(',')
                .map(|item| {
                    item.trim().parse::<f64>().map_err(|_| {
                        CliError::Usage(format!("pde_snapshot_times: not a number: {item:?}"))
                    })
                })
                .collect(),
        }
    }

    pub fn solve_options(&self) -> Result<SolveOptions, CliError> {
        let d = SolveOptions::default();
        Ok(SolveOptions {
            tol_intersect_factor: self.f64_or("tol_intersect_factor", d.tol_intersect_factor)?,
            tol_r_factor: self.f64_or("tol_r_factor", d.tol_r_factor)?,
            ode_rtol: self.f64_or("ode_rtol", d.ode_rtol)?,
            ode_atol: self.f64_or("ode_atol", d.ode_atol)?,
            epsilon_seed_factor: self.f64_or("epsilon_seed_factor", d.epsilon_seed_factor)?,
            tail_node_fraction: d.tail_node_fraction,
        })
    }
}
