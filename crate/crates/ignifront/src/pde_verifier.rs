//! Time-dependent cross-validation of the traveling front.
//!
//! The lab-frame equation `theta_t = theta_xx + F(theta)` with the full
//! piecewise reaction admits the solved front as `theta(x + c t)`: the wave
//! invades the cold region moving in the -x direction at speed c. The
//! simulator evolves a smoothed step (0 on the left, theta_plus on the
//! right) with an explicit second-order scheme, homogeneous Neumann ends,
//! and the reaction evaluated pointwise (no smoothing of the thresholds:
//! the discontinuity lives in theta-space where the scheme only ever sees
//! bounded values, and regularizing it would add a second length scale to
//! the measured speed).
//!
//! Two independent measurements compare against the solver:
//! - the ignition-level position x_ig(t) becomes affine after transients;
//!   minus its least-squares slope is the selected speed;
//! - in the frame moving at c* (equation `theta_t = theta_xx - c* theta_x
//!   + F(theta)`), the solved profile is stationary; the residual drift
//!   after quotienting out translations bounds the profile error.
//!
//! Under the step bound `dt <= dx^2/2` the update is a convex combination
//! plus a reaction term vanishing at 0 and theta_plus, so the solution
//! stays inside [0, theta_plus] to rounding.

use crate::error::{Error, Result};
use crate::front_solver::FrontSolution;
use crate::model::Model;

/// Explicit finite-difference run controls.
#[derive(Debug, Clone)]
pub struct SimulationConfig {
    /// Domain [-L, L].
    pub half_length: f64,
    pub dx: f64,
    /// Time step; defaults to 0.45 dx^2 (the stability bound is dx^2/2).
    pub dt: Option<f64>,
    pub final_time: f64,
    /// Width of the tanh smoothing of the initial step.
    pub smoothing_width: f64,
    /// Fraction of the series used by the speed fit (from the end).
    pub window_fraction: f64,
    /// Sampling interval for x_ig(t).
    pub record_dt: f64,
    /// Minimum distance the ignition level must keep from the left edge.
    pub edge_margin: f64,
    /// Times at which to store full profiles.
    pub snapshot_times: Vec<f64>,
}

impl SimulationConfig {
    pub fn new(half_length: f64, dx: f64, final_time: f64) -> Self {
        SimulationConfig {
            half_length,
            dx,
            dt: None,
            final_time,
            smoothing_width: 1.0,
            window_fraction: 0.5,
            record_dt: (final_time / 400.0).max(1e-6),
            edge_margin: 5.0,
            snapshot_times: Vec::new(),
        }
    }

    /// Defaults sized from a speed estimate: dx resolves the preheat decay
    /// rate, T gives ten units of front travel.
    pub fn default_for_speed(c_est: f64) -> Self {
        let dx = 5e-3 * (1.0 / c_est).max(1.0);
        let final_time = 12.0 / c_est;
        let mut cfg = SimulationConfig::new(40.0, dx, final_time);
        cfg.edge_margin = (10.0 / c_est).clamp(1.0, 10.0);
        cfg
    }

    fn validated_dt(&self) -> Result<f64> {
        let bound = 0.5 * self.dx * self.dx;
        let dt = self.dt.unwrap_or(0.9 * bound);
        if dt > bound {
            return Err(Error::StabilityViolated { dt, bound });
        }
        if !(self.dx > 0.0 && self.half_length > self.dx && dt > 0.0) {
            return Err(Error::NonPositiveParameter {
                name: "dx/half_length/dt",
                value: self.dx,
            });
        }
        Ok(dt)
    }
}

/// Ignition-level position time series.
#[derive(Debug, Clone)]
pub struct FrontSeries {
    pub t: Vec<f64>,
    pub x_ig: Vec<f64>,
}

/// A stored profile.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub time: f64,
    pub theta: Vec<f64>,
}

/// Full simulation output.
#[derive(Debug, Clone)]
pub struct SimulationOutput {
    pub series: FrontSeries,
    pub grid: Vec<f64>,
    pub snapshots: Vec<Snapshot>,
    pub final_state: Vec<f64>,
    pub final_time: f64,
    /// Extremes of theta over all recorded states.
    pub theta_min: f64,
    pub theta_max: f64,
}

/// One explicit step in a frame moving at `frame_speed` (0 = lab frame).
/// Mirror ghosts give second-order homogeneous Neumann ends.
fn step(
    theta: &[f64],
    next: &mut [f64],
    mu: f64,
    adv: f64,
    dt: f64,
    reaction: &impl Fn(f64) -> f64,
) {
    let n = theta.len();
    next[0] = theta[0] + 2.0 * mu * (theta[1] - theta[0]) + dt * reaction(theta[0]);
    for i in 1..n - 1 {
        let diff = theta[i - 1] - 2.0 * theta[i] + theta[i + 1];
        let drift = theta[i + 1] - theta[i - 1];
        next[i] = theta[i] + mu * diff - adv * drift + dt * reaction(theta[i]);
    }
    next[n - 1] = theta[n - 1] + 2.0 * mu * (theta[n - 2] - theta[n - 1]) + dt * reaction(theta[n - 1]);
}

/// Linearly interpolated position where theta crosses `level` from below,
/// scanning from the left.
fn crossing(grid: &[f64], theta: &[f64], level: f64) -> Option<f64> {
    let i = theta.iter().position(|&v| v >= level)?;
    if i == 0 {
        return Some(grid[0]);
    }
    let (t0, t1) = (theta[i - 1], theta[i]);
    Some(grid[i - 1] + (grid[i] - grid[i - 1]) * (level - t0) / (t1 - t0))
}

/// Evolve an arbitrary reaction from the smoothed-step initial condition
/// and record the `ignition_level` crossing. `level` is the plateau of the
/// initial step on the right.
pub fn simulate_reaction_diffusion(
    reaction: impl Fn(f64) -> f64,
    level: f64,
    ignition_level: f64,
    config: &SimulationConfig,
) -> Result<SimulationOutput> {
    let dt0 = config.validated_dt()?;
    let l = config.half_length;
    let n = (2.0 * l / config.dx).round() as usize + 1;
    let grid: Vec<f64> = (0..n).map(|i| -l + 2.0 * l * i as f64 / (n - 1) as f64).collect();
    let dx = grid[1] - grid[0];

    let w = config.smoothing_width;
    let init: Vec<f64> = grid
        .iter()
        .map(|&x| level * 0.5 * (1.0 + (x / w).tanh()))
        .collect();

    let total_steps = (config.final_time / dt0).ceil().max(1.0) as usize;
    let dt = config.final_time / total_steps as f64;
    let record_every = ((config.record_dt / dt).round() as usize).max(1);
    let mu = dt / (dx * dx);

    let mut theta = init;
    let mut scratch = vec![0.0; n];
    let mut series = FrontSeries {
        t: Vec::new(),
        x_ig: Vec::new(),
    };
    let mut snapshots = Vec::new();
    let mut pending: Vec<f64> = config.snapshot_times.clone();
    pending.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut theta_min = f64::INFINITY;
    let mut theta_max = f64::NEG_INFINITY;

    let record =
        |step_idx: usize, state: &[f64], series: &mut FrontSeries| -> Result<(f64, f64)> {
            let t = step_idx as f64 * dt;
            let x = crossing(&grid, state, ignition_level).ok_or(Error::FrontLeftDomain {
                x_ig: f64::NAN,
                margin: config.edge_margin,
            })?;
            if x - grid[0] < config.edge_margin {
                return Err(Error::FrontLeftDomain {
                    x_ig: x,
                    margin: config.edge_margin,
                });
            }
            series.t.push(t);
            series.x_ig.push(x);
            let lo = state.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = state.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            Ok((lo, hi))
        };

    let (lo, hi) = record(0, &theta, &mut series)?;
    theta_min = theta_min.min(lo);
    theta_max = theta_max.max(hi);

    for s in 1..=total_steps {
        step(&theta, &mut scratch, mu, 0.0, dt, &reaction);
        std::mem::swap(&mut theta, &mut scratch);
        let t = s as f64 * dt;
        if s % record_every == 0 || s == total_steps {
            let (lo, hi) = record(s, &theta, &mut series)?;
            theta_min = theta_min.min(lo);
            theta_max = theta_max.max(hi);
        }
        while let Some(&next_snap) = pending.first() {
            if t + 0.5 * dt >= next_snap {
                snapshots.push(Snapshot {
                    time: t,
                    theta: theta.clone(),
                });
                pending.remove(0);
            } else {
                break;
            }
        }
    }

    Ok(SimulationOutput {
        series,
        grid,
        snapshots,
        final_state: theta,
        final_time: config.final_time,
        theta_min,
        theta_max,
    })
}

/// Lab-frame run of the full model.
pub fn simulate_lab_frame(model: &Model, config: &SimulationConfig) -> Result<SimulationOutput> {
    simulate_reaction_diffusion(
        |u| model.reaction_full(u),
        model.theta_plus(),
        model.params().theta_ig,
        config,
    )
}

/// Leftward propagation speed from the least-squares slope of x_ig(t) over
/// the trailing `window_fraction` of the series.
pub fn measure_speed(series: &FrontSeries, window_fraction: f64) -> Result<f64> {
    let len = series.t.len();
    let k = ((len as f64 * window_fraction).floor() as usize).max(2);
    if len < 2 * k {
        return Err(Error::InsufficientData { len, needed: 2 * k });
    }
    let ts = &series.t[len - k..];
    let xs = &series.x_ig[len - k..];
    let n = k as f64;
    let mean_t = ts.iter().sum::<f64>() / n;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (t, x) in ts.iter().zip(xs) {
        num += (t - mean_t) * (x - mean_x);
        den += (t - mean_t) * (t - mean_t);
    }
    Ok(-num / den)
}

/// Root-mean-square deviation of the windowed series from its linear fit;
/// small values certify that x_ig(t) has become affine.
pub fn fit_rms(series: &FrontSeries, window_fraction: f64) -> Result<f64> {
    let speed = measure_speed(series, window_fraction)?;
    let len = series.t.len();
    let k = ((len as f64 * window_fraction).floor() as usize).max(2);
    let ts = &series.t[len - k..];
    let xs = &series.x_ig[len - k..];
    let n = k as f64;
    let mean_t = ts.iter().sum::<f64>() / n;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mut ss = 0.0;
    for (t, x) in ts.iter().zip(xs) {
        let fitted = mean_x - speed * (t - mean_t);
        ss += (x - fitted) * (x - fitted);
    }
    Ok((ss / n).sqrt())
}

/// Result of the co-moving stationarity check.
#[derive(Debug, Clone, Copy)]
pub struct DriftReport {
    /// max |theta(x, T) - theta*(x - offset)| after translation alignment.
    pub drift: f64,
    /// Measured displacement of the ignition level over [0, T].
    pub translation_offset: f64,
    /// max |theta(x, T) - theta*(x)| without alignment.
    pub drift_before_alignment: f64,
}

/// Evolve the solved front in its own co-moving frame and measure the
/// residual drift.
pub fn comoving_drift(
    model: &Model,
    solution: &FrontSolution,
    config: &SimulationConfig,
) -> Result<DriftReport> {
    comoving_drift_with_speed(model, solution, solution.c_star, config)
}

/// Same, but in a frame moving at `frame_speed` (diagnostic: a wrong speed
/// turns the stationary profile into a drifting one at the speed error).
pub fn comoving_drift_with_speed(
    model: &Model,
    solution: &FrontSolution,
    frame_speed: f64,
    config: &SimulationConfig,
) -> Result<DriftReport> {
    let dt0 = config.validated_dt()?;
    let l = config.half_length;
    let n = (2.0 * l / config.dx).round() as usize + 1;
    let grid: Vec<f64> = (0..n).map(|i| -l + 2.0 * l * i as f64 / (n - 1) as f64).collect();
    let dx = grid[1] - grid[0];

    let init: Vec<f64> = grid.iter().map(|&x| solution.eval(x).0).collect();
    let level = solution.params().theta_ig;
    let x_start = crossing(&grid, &init, level).ok_or(Error::FrontLeftDomain {
        x_ig: f64::NAN,
        margin: config.edge_margin,
    })?;

    let total_steps = if config.final_time > 0.0 {
        (config.final_time / dt0).ceil() as usize
    } else {
        0
    };
    let mut theta = init.clone();
    if total_steps > 0 {
        let dt = config.final_time / total_steps as f64;
        let mu = dt / (dx * dx);
        let adv = frame_speed * dt / (2.0 * dx);
        let mut scratch = vec![0.0; n];
        let reaction = |u: f64| model.reaction_full(u);
        for _ in 0..total_steps {
            step(&theta, &mut scratch, mu, adv, dt, &reaction);
            std::mem::swap(&mut theta, &mut scratch);
        }
    }

    let x_end = crossing(&grid, &theta, level).ok_or(Error::FrontLeftDomain {
        x_ig: f64::NAN,
        margin: config.edge_margin,
    })?;
    if x_end - grid[0] < config.edge_margin {
        return Err(Error::FrontLeftDomain {
            x_ig: x_end,
            margin: config.edge_margin,
        });
    }
    let offset = x_end - x_start;

    let mut drift: f64 = 0.0;
    let mut raw: f64 = 0.0;
    for (i, &x) in grid.iter().enumerate() {
        drift = drift.max((theta[i] - solution.eval(x - offset).0).abs());
        raw = raw.max((theta[i] - init[i]).abs());
    }
    Ok(DriftReport {
        drift,
        translation_offset: offset,
        drift_before_alignment: raw,
    })
}
