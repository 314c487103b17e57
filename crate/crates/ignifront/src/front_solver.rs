//! Intersection of the two parameter curves and assembly of the global
//! traveling front.
//!
//! phi decreases from +inf to c0 on (0, R0] while psi increases from
//! psi(0) > 0, so Delta(R) = psi(R) - phi(R) has exactly one zero R* in
//! (0, R0), located by bisection after a halving search for a negative
//! left endpoint. The front is then glued from the explicit preheat
//! branches on (-inf, R*] and the separatrix tail theta(x) = u(x - R*)
//! on [R*, inf), with matching certified by the residuals of both curve
//! equations at (R*, c*).
//!
//! Past the stored end of the tail trajectory (distance eps from the
//! saddle) evaluation switches to the linearized saddle flow
//! theta_plus - gap * e^{lambda_minus (x - x_end)}, exact to O(eps^2).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::explicit_region::{flux_at_r, g, preheat_profile};
use crate::model::{Model, ModelParams};
use crate::phase_plane::{separatrix, SeparatrixOptions, SeparatrixTrajectory, VhlCache};
use crate::phi_curve::{critical_point, phi_from_critical, CriticalData};
use crate::psi_curve::psi_cached_with_tolerance;

/// Solver controls. The defaults satisfy the certificate thresholds; every
/// field scales the corresponding internal tolerance.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Bisection resolution in R as a fraction of R0.
    pub tol_intersect_factor: f64,
    /// Inversion tolerance factor for psi: |R(c) - R| <= factor * max(1, R).
    pub tol_r_factor: f64,
    /// Separatrix integrator tolerances (used by every psi evaluation and
    /// the final tail).
    pub ode_rtol: f64,
    pub ode_atol: f64,
    /// Seed distance factor for the separatrix.
    pub epsilon_seed_factor: f64,
    /// Node-spacing cap for the dense tail trajectory, as a fraction of the
    /// estimated tail time span. Keeps finite-difference audits of the
    /// evaluator below their truncation floor.
    pub tail_node_fraction: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol_intersect_factor: 1e-10,
            tol_r_factor: 1e-10,
            ode_rtol: 1e-11,
            ode_atol: 1e-13,
            epsilon_seed_factor: 1e-7,
            tail_node_fraction: 1.6e-4,
        }
    }
}

impl SolveOptions {
    fn separatrix_options(&self) -> SeparatrixOptions {
        SeparatrixOptions {
            epsilon_seed_factor: self.epsilon_seed_factor,
            rtol: self.ode_rtol,
            atol: self.ode_atol,
            max_steps: 400_000,
            max_time_step: None,
        }
    }
}

/// Matching and shape certificates emitted by the solver.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FrontCertificates {
    /// |theta(0-) - theta(0+)| from the two closed-form branches.
    pub theta_jump_at_zero: f64,
    /// |theta_x(0-) - theta_x(0+)|.
    pub flux_jump_at_zero: f64,
    /// |theta_preheat(R*) - theta_hl|.
    pub theta_jump_at_interface: f64,
    /// |theta_x_preheat(R*) - v(theta_hl, c*)|.
    pub flux_jump_at_interface: f64,
    /// |G(R*, c*)|.
    pub g_residual: f64,
    /// |c* theta_hl - q R* - v(theta_hl, c*)|.
    pub flux_match_residual: f64,
    /// theta_x > 0 on the default scan grid.
    pub monotone: bool,
    /// Delta = psi - phi increased across the detected sign-change bracket
    /// (8 interior probes).
    pub delta_increasing_on_bracket: bool,
}

/// JSON-facing summary of a solved front.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FrontSummary {
    pub q: f64,
    pub h: f64,
    pub theta_ig: f64,
    pub theta_hl: f64,
    pub theta_plus: f64,
    pub r_star: f64,
    pub c_star: f64,
    pub certificates: FrontCertificates,
}

/// The solved traveling front with a piecewise evaluator over all of R.
#[derive(Debug, Clone)]
pub struct FrontSolution {
    pub r_star: f64,
    pub c_star: f64,
    pub certificates: FrontCertificates,
    model: Model,
    tail: SeparatrixTrajectory,
}

impl FrontSolution {
    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn params(&self) -> &ModelParams {
        self.model.params()
    }

    pub fn theta_plus(&self) -> f64 {
        self.model.theta_plus()
    }

    /// The separatrix tail at c*, indexed by t = x - R*.
    pub fn tail(&self) -> &SeparatrixTrajectory {
        &self.tail
    }

    /// Evaluate (theta, theta_x) anywhere on the line.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let p = self.model.params();
        let c = self.c_star;
        if x <= 0.0 {
            let e = (c * x).exp();
            (p.theta_ig * e, c * p.theta_ig * e)
        } else if x <= self.r_star {
            let e = (c * x).exp();
            let theta = p.theta_ig * e + p.q / c * x - p.q / (c * c) * (c * x).exp_m1();
            let theta_x = (c * p.theta_ig - p.q / c) * e + p.q / c;
            (theta, theta_x)
        } else {
            self.tail.state_at_time(x - self.r_star)
        }
    }

    pub fn summary(&self) -> FrontSummary {
        let p = self.model.params();
        FrontSummary {
            q: p.q,
            h: p.h,
            theta_ig: p.theta_ig,
            theta_hl: p.theta_hl,
            theta_plus: self.model.theta_plus(),
            r_star: self.r_star,
            c_star: self.c_star,
            certificates: self.certificates,
        }
    }
}

/// Free-function form of [`FrontSolution::eval`].
pub fn eval_front(solution: &FrontSolution, x: f64) -> (f64, f64) {
    solution.eval(x)
}

/// psi(R) - phi(R) at default solver tolerances; changes sign exactly once
/// on (0, R0).
pub fn psi_minus_phi(model: &Model, r: f64) -> Result<f64> {
    let opts = SolveOptions::default();
    let critical = critical_point(model.params())?;
    let cache = VhlCache::new(opts.separatrix_options());
    delta_at(model, &critical, &cache, &opts, r)
}

fn delta_at(
    model: &Model,
    critical: &CriticalData,
    cache: &VhlCache,
    opts: &SolveOptions,
    r: f64,
) -> Result<f64> {
    let c_psi = psi_cached_with_tolerance(model, cache, r, opts.tol_r_factor)?;
    let c_phi = phi_from_critical(model.params(), critical, r, None)?;
    Ok(c_psi - c_phi)
}

/// Solve for the unique intersection (R*, c*) and assemble the front.
pub fn solve_front(model: &Model, opts: &SolveOptions) -> Result<FrontSolution> {
    let params = *model.params();
    let critical = critical_point(&params)?;
    let cache = VhlCache::new(opts.separatrix_options());
    let delta = |r: f64| delta_at(model, &critical, &cache, opts, r);

    // Right endpoint: phi(R0) = c0 on the boundary ray, psi(R0) above it.
    let r0 = critical.r0;
    let d_hi = delta(r0)?;
    if d_hi <= 0.0 {
        return Err(Error::NoSignChange);
    }
    // Halve leftward until Delta < 0; phi blows up as R -> 0+.
    let mut r_lo = r0;
    let mut d_lo = d_hi;
    let mut bracket_hi = r0;
    for _ in 0..60 {
        bracket_hi = r_lo;
        r_lo *= 0.5;
        d_lo = delta(r_lo)?;
        if d_lo < 0.0 {
            break;
        }
    }
    if d_lo >= 0.0 {
        return Err(Error::NoSignChange);
    }

    // Monotonicity certificate across the detected bracket.
    let mut delta_increasing = true;
    let mut prev = d_lo;
    for k in 1..=8 {
        let r = r_lo + (bracket_hi - r_lo) * k as f64 / 9.0;
        let d = delta(r)?;
        if d <= prev {
            delta_increasing = false;
        }
        prev = d;
    }

    // Bisection to the requested R resolution.
    let tol_r = opts.tol_intersect_factor * r0;
    let (mut lo, mut hi) = (r_lo, bracket_hi);
    while hi - lo > tol_r {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if delta(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r_star = 0.5 * (lo + hi);
    let c_phi = phi_from_critical(&params, &critical, r_star, None)?;
    let c_psi = psi_cached_with_tolerance(model, &cache, r_star, opts.tol_r_factor)?;
    // Symmetric rounding between the two curves halves the residual.
    let c_star = 0.5 * (c_phi + c_psi);

    // Dense tail for evaluation; cap node spacing in reconstructed time.
    let eig = crate::phase_plane::saddle_eigen(model, c_star);
    let span = model.theta_plus() - params.theta_hl;
    let t_span_est = (span / (opts.epsilon_seed_factor * span)).ln() / eig.lambda_minus.abs();
    let tail_opts = SeparatrixOptions {
        max_time_step: Some(opts.tail_node_fraction * t_span_est),
        ..opts.separatrix_options()
    };
    let tail = separatrix(model, c_star, &tail_opts)?;
    let gap = tail.terminal_gap();
    let limit = 10.0 * tail.epsilon_seed;
    if gap > limit {
        return Err(Error::TailEstimateUnreliable { gap, limit });
    }

    // Matching certificates at both interfaces.
    let (theta_r, theta_x_r) = preheat_profile(&params, c_star, r_star, r_star)?;
    let theta_jump_at_interface = (theta_r - params.theta_hl).abs();
    let flux_jump_at_interface = (theta_x_r - tail.v_hl).abs();
    let g_residual = g(&params, r_star, c_star).abs();
    let flux_match_residual = (flux_at_r(&params, r_star, c_star) - tail.v_hl).abs();

    let theta_left0 = params.theta_ig;
    let flux_left0 = c_star * params.theta_ig;
    let theta_right0 = params.theta_ig + p0_expm1_term(&params, c_star);
    let flux_right0 = (c_star * params.theta_ig - params.q / c_star) + params.q / c_star;
    let theta_jump_at_zero = (theta_left0 - theta_right0).abs();
    let flux_jump_at_zero = (flux_left0 - flux_right0).abs();

    let mut solution = FrontSolution {
        r_star,
        c_star,
        certificates: FrontCertificates {
            theta_jump_at_zero,
            flux_jump_at_zero,
            theta_jump_at_interface,
            flux_jump_at_interface,
            g_residual,
            flux_match_residual,
            monotone: false,
            delta_increasing_on_bracket: delta_increasing,
        },
        model: model.clone(),
        tail,
    };
    solution.certificates.monotone = monotone_scan(&solution);
    Ok(solution)
}

/// Value of the x = 0+ branch minus theta_ig; identically zero in exact
/// arithmetic, kept as an honest floating-point certificate.
fn p0_expm1_term(params: &ModelParams, c: f64) -> f64 {
    params.q / c * 0.0 - params.q / (c * c) * 0f64.exp_m1()
}

fn monotone_scan(sol: &FrontSolution) -> bool {
    let lm = sol.tail.saddle().lambda_minus.abs();
    let x_min = -10.0 / sol.c_star;
    let x_max = sol.r_star + 10.0 / lm;
    let n = 2001;
    let mut prev_theta = f64::NEG_INFINITY;
    for i in 0..n {
        let x = x_min + (x_max - x_min) * i as f64 / (n - 1) as f64;
        let (theta, theta_x) = sol.eval(x);
        if theta_x <= 0.0 || theta <= prev_theta {
            return false;
        }
        prev_theta = theta;
    }
    true
}

/// Grid specification for the evaluator audit.
#[derive(Debug, Clone, Copy)]
pub struct VerifyGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub spacing: f64,
}

impl VerifyGrid {
    /// Default audit window [-10/c*, R* + 10/|lambda_minus|] at spacing 1e-3.
    pub fn default_for(sol: &FrontSolution) -> Self {
        VerifyGrid {
            x_min: -10.0 / sol.c_star,
            x_max: sol.r_star + 10.0 / sol.tail().saddle().lambda_minus.abs(),
            spacing: 1e-3,
        }
    }
}

/// Numerical audit of a solved front.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct VerifyReport {
    pub grid_spacing: f64,
    /// max |theta_xx - c theta_x + F(theta)| by second-order differences,
    /// excluding points within 2 spacings of x = 0 and x = R*.
    pub max_interior_residual: f64,
    pub theta_jump_at_zero: f64,
    pub flux_jump_at_zero: f64,
    pub theta_jump_at_interface: f64,
    pub flux_jump_at_interface: f64,
    pub min_theta_x: f64,
    pub monotone: bool,
    /// |theta(x_min)| against the exact exponential bound theta_ig e^{c x_min}.
    pub left_limit_error: f64,
    pub left_limit_bound: f64,
    /// |theta(x_max) - theta_plus|.
    pub right_limit_error: f64,
}

/// Audit the assembled front on a uniform grid: interior ODE residual by
/// centered finite differences, interface jumps, monotonicity, and the
/// far-field limits.
pub fn verify_front(sol: &FrontSolution, grid: &VerifyGrid) -> VerifyReport {
    let h = grid.spacing;
    let c = sol.c_star;
    let n = ((grid.x_max - grid.x_min) / h).floor() as usize;
    let mut max_res: f64 = 0.0;
    let mut min_theta_x = f64::INFINITY;
    let mut monotone = true;
    let mut prev_theta = f64::NEG_INFINITY;
    for i in 0..=n {
        let x = grid.x_min + i as f64 * h;
        let (theta, theta_x) = sol.eval(x);
        min_theta_x = min_theta_x.min(theta_x);
        if theta <= prev_theta {
            monotone = false;
        }
        prev_theta = theta;
        let near_interface = x.abs() < 2.0 * h || (x - sol.r_star).abs() < 2.0 * h;
        if !near_interface && i > 0 && i < n {
            let tm = sol.eval(x - h).0;
            let tp = sol.eval(x + h).0;
            let d2 = (tm - 2.0 * theta + tp) / (h * h);
            let d1 = (tp - tm) / (2.0 * h);
            let res = d2 - c * d1 + sol.model.reaction_full(theta);
            max_res = max_res.max(res.abs());
        }
    }
    if min_theta_x <= 0.0 {
        monotone = false;
    }

    let certs = sol.certificates;
    let (theta_min, _) = sol.eval(grid.x_min);
    let (theta_max, _) = sol.eval(grid.x_max);
    VerifyReport {
        grid_spacing: h,
        max_interior_residual: max_res,
        theta_jump_at_zero: certs.theta_jump_at_zero,
        flux_jump_at_zero: certs.flux_jump_at_zero,
        theta_jump_at_interface: certs.theta_jump_at_interface,
        flux_jump_at_interface: certs.flux_jump_at_interface,
        min_theta_x,
        monotone,
        left_limit_error: theta_min.abs(),
        left_limit_bound: sol.params().theta_ig * (c * grid.x_min).exp(),
        right_limit_error: (theta_max - sol.theta_plus()).abs(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_params;

    fn fig1_model() -> Model {
        Model::quartic(validate_params(1.0, 0.3, 0.1, 0.2).unwrap())
    }

    fn solved() -> FrontSolution {
        solve_front(&fig1_model(), &SolveOptions::default()).unwrap()
    }

    #[test]
    fn solution_is_interior_with_tight_certificates() {
        let sol = solved();
        let p = sol.params();
        assert!(sol.c_star * p.theta_hl - p.q * sol.r_star > 0.0);
        let c = sol.certificates;
        assert!(c.theta_jump_at_zero <= 1e-9);
        assert!(c.flux_jump_at_zero <= 1e-9);
        assert!(c.theta_jump_at_interface <= 1e-9, "{c:?}");
        assert!(c.flux_jump_at_interface <= 1e-9, "{c:?}");
        assert!(c.monotone);
        assert!(c.delta_increasing_on_bracket);
    }

    #[test]
    fn evaluator_interface_values() {
        let sol = solved();
        let p = *sol.params();
        let (theta0, flux0) = sol.eval(0.0);
        assert_eq!(theta0, p.theta_ig);
        assert!((flux0 - sol.c_star * p.theta_ig).abs() < 1e-15);

        // Two-sided approach to R*.
        let eps = 1e-9;
        let (tl, fl) = sol.eval(sol.r_star - eps);
        let (tr, fr) = sol.eval(sol.r_star + eps);
        assert!((tl - tr).abs() < 1e-8);
        assert!((fl - fr).abs() < 1e-7);
        assert!((tl - p.theta_hl).abs() < 1e-7);
    }

    #[test]
    fn evaluator_reaches_equilibrium_exponentially() {
        let sol = solved();
        let lm = sol.tail().saddle().lambda_minus.abs();
        let (theta, _) = sol.eval(sol.r_star + 20.0 / lm);
        assert!((theta - sol.theta_plus()).abs() <= 1e-8);
        let (theta_far, flux_far) = sol.eval(sol.r_star + 200.0 / lm);
        assert!((theta_far - sol.theta_plus()).abs() < 1e-12);
        assert!(flux_far >= 0.0);
    }

    #[test]
    fn delta_changes_sign_once_on_probe_grid() {
        let m = fig1_model();
        let critical = critical_point(m.params()).unwrap();
        let mut prev_sign = None;
        let mut changes = 0;
        for k in 1..=32 {
            let r = critical.r0 * k as f64 / 32.0;
            let d = psi_minus_phi(&m, r).unwrap();
            let sign = d > 0.0;
            if let Some(p) = prev_sign {
                if p != sign {
                    changes += 1;
                }
            }
            prev_sign = Some(sign);
        }
        assert_eq!(changes, 1);
    }

    #[test]
    fn audit_passes_on_default_grid() {
        let sol = solved();
        let report = verify_front(&sol, &VerifyGrid::default_for(&sol));
        assert!(
            report.max_interior_residual <= 1e-5,
            "residual {}",
            report.max_interior_residual
        );
        assert!(report.monotone && report.min_theta_x > 0.0);
        assert!(report.left_limit_error <= report.left_limit_bound * (1.0 + 1e-12));
        // The default window ends 10/|lambda| past R*, where the tail has
        // decayed by e^{-10}.
        let span = sol.theta_plus() - sol.params().theta_hl;
        assert!(report.right_limit_error <= 3.0 * span * (-10f64).exp());
    }

    #[test]
    fn summary_round_trips_parameters() {
        let sol = solved();
        let s = sol.summary();
        assert_eq!(s.q, 1.0);
        assert_eq!(s.h, 0.3);
        assert_eq!(s.r_star, sol.r_star);
        assert!(s.theta_plus > s.theta_hl);
    }
}
