//! The interface-compatibility curve c = phi(R).
//!
//! Inside the admissible region Q+ the level set G(R, c) = 0 is the graph of
//! a smooth decreasing function phi on (0, R0]. Its right endpoint
//! (R0, c0) sits on the boundary of Q+ where the preheat profile becomes
//! tangent to the heat-loss level: c0 solves
//!
//! ```text
//! f(c) = (1 - (theta_ig/q) c^2) e^{(theta_hl/q) c^2} - 1 = 0
//! ```
//!
//! on (c_tilde, b), with the explicit constants
//!
//! ```text
//! b = sqrt(q/theta_ig),  a = (theta_hl/theta_ig - 1)/b,
//! c_tilde = sqrt(q (theta_hl - theta_ig)/(theta_hl theta_ig)),
//! ```
//!
//! and R0 = c0 theta_hl / q equals the interior maximum location
//! x0 = ln(q/(q - c0^2 theta_ig))/c0. The point (a, b) lies on the curve
//! exactly, which anchors both the tracing and its tests. Toward R -> 0+
//! the product m(R) = phi(R) R tends to ln(theta_hl/theta_ig), so
//! phi blows up like that logarithm divided by R.
//!
//! phi depends only on (q, theta_ig, theta_hl); the heat-loss intensity h
//! never enters.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::explicit_region::{g, g_partials};
use crate::model::ModelParams;
use crate::numerics::roots::{bisect, grow_bracket_up, newton_bisect, scan_sign_changes};

/// Upper cap for bracket growth in c.
const C_CAP: f64 = 1e6;

/// Explicit constants and the computed critical point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalData {
    pub a: f64,
    pub b: f64,
    pub c_tilde: f64,
    pub c0: f64,
    pub r0: f64,
    /// Interior maximum location of the preheat profile at c0; equals r0.
    pub x0: f64,
}

/// Which curve a tabulation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CurveKind {
    Phi,
    Psi,
}

/// A monotone tabulation of one curve with per-point residuals.
#[derive(Debug, Clone)]
pub struct CurveSamples {
    pub kind: CurveKind,
    /// (R, c) pairs, ascending in R.
    pub points: Vec<(f64, f64)>,
    /// |G(R, c)| for phi, |R_of_c(c) - R| for psi.
    pub residuals: Vec<f64>,
}

/// Residual tolerance for G at speed c; G grows like q e^{cR} so an
/// absolute tolerance would be meaningless at large m = cR.
fn tol_g(params: &ModelParams, r: f64, c: f64) -> f64 {
    1e-12 * params.q * (c * r).exp()
}

/// Rounding floor of evaluating G: toward R -> 0 the root sits at large c,
/// where the two c^2 terms nearly cancel and their ulps dominate the
/// achievable residual.
fn g_noise_floor(params: &ModelParams, r: f64, c: f64) -> f64 {
    let em = (c * r).exp();
    64.0 * f64::EPSILON
        * (params.q * em + c * c * (params.theta_ig * em + params.theta_hl))
}

/// Locate the critical point (R0, c0) on the boundary of Q+.
///
/// Asserts a single sign change of f on [c_tilde, b] (the bracket is always
/// valid: f(c_tilde) > 0 and f(b) = -1) and refines by bisection.
pub fn critical_point(params: &ModelParams) -> Result<CriticalData> {
    let (q, tig, thl) = (params.q, params.theta_ig, params.theta_hl);
    let b = (q / tig).sqrt();
    let a = (thl / tig - 1.0) / b;
    let c_tilde = (q * (thl - tig) / (thl * tig)).sqrt();
    let f = |c: f64| (1.0 - tig / q * c * c) * (thl / q * c * c).exp() - 1.0;

    let (changes, bracket) = scan_sign_changes(f, c_tilde, b, 2048);
    if changes != 1 {
        return Err(Error::BracketFailure {
            what: "critical speed c0",
            detail: format!("expected one sign change of f on [{c_tilde}, {b}], found {changes}"),
        });
    }
    let c0 = bisect(f, bracket.unwrap(), 1e-15 * b, 0.0);
    let r0 = c0 * thl / q;
    let x0 = (q / (q - c0 * c0 * tig)).ln() / c0;
    if (x0 - r0).abs() > 1e-9 * r0.max(1.0) {
        return Err(Error::BracketFailure {
            what: "critical point consistency",
            detail: format!("x0 = {x0} and R0 = {r0} disagree"),
        });
    }
    Ok(CriticalData {
        a,
        b,
        c_tilde,
        c0,
        r0,
        x0,
    })
}

/// phi(R): the unique c >= c0 with G(R, c) = 0, for 0 < R <= R0.
pub fn phi(params: &ModelParams, r: f64) -> Result<f64> {
    let critical = critical_point(params)?;
    phi_from_critical(params, &critical, r, None)
}

/// phi(R) reusing precomputed critical data and an optional warm start
/// (an upper estimate of the root, e.g. the previous grid point's c).
pub fn phi_from_critical(
    params: &ModelParams,
    critical: &CriticalData,
    r: f64,
    warm: Option<f64>,
) -> Result<f64> {
    let r0 = critical.r0;
    if !(r > 0.0) || r > r0 * (1.0 + 1e-9) {
        return Err(Error::OutOfRange { r, lo: 0.0, hi: r0 });
    }
    let r = r.min(r0);
    let c_lo = critical.c0.max(params.q * r / params.theta_hl) * (1.0 + 1e-12);
    let g_lo = g(params, r, c_lo);
    if g_lo.abs() <= tol_g(params, r, c_lo) {
        return Ok(c_lo);
    }
    if g_lo < 0.0 {
        return Err(Error::BracketFailure {
            what: "phi lower bound",
            detail: format!("G({r}, {c_lo}) = {g_lo} < 0 below the curve"),
        });
    }
    // Initial upper estimate: warm start if usable, else the small-R
    // asymptote c ~ ln(theta_hl/theta_ig)/R.
    let m_limit = (params.theta_hl / params.theta_ig).ln();
    let hi_start = match warm {
        Some(w) if w > c_lo => w,
        _ => (m_limit / r).max(c_lo * 1.5),
    };
    let bracket = grow_bracket_up(|c| g(params, r, c), c_lo, g_lo, hi_start, C_CAP, "phi root")?;
    // Run to machine width in c if the residual target is below the
    // rounding floor of G; certify against both afterwards.
    let root = newton_bisect(
        |c| {
            let (_, dc) = g_partials(params, r, c);
            (g(params, r, c), dc)
        },
        bracket,
        |c| 4.0 * f64::EPSILON * c.max(1.0),
        |c| tol_g(params, r, c),
    );
    let residual = g(params, r, root).abs();
    if residual > tol_g(params, r, root) + g_noise_floor(params, r, root) {
        return Err(Error::BracketFailure {
            what: "phi residual",
            detail: format!("|G({r}, {root})| = {residual} above tolerance"),
        });
    }
    Ok(root)
}

/// Default tabulation grid: 256 geometric points on [1e-3 R0, R0].
pub fn default_phi_grid(critical: &CriticalData) -> Vec<f64> {
    geometric_grid(1e-3 * critical.r0, critical.r0, 256)
}

/// Geometric grid with exact endpoints.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && lo > 0.0 && hi > lo);
    let ratio = hi / lo;
    let mut grid: Vec<f64> = (0..n)
        .map(|i| lo * ratio.powf(i as f64 / (n - 1) as f64))
        .collect();
    grid[0] = lo;
    grid[n - 1] = hi;
    grid
}

/// Tabulate phi over `r_grid` (ascending, inside (0, R0]) with warm-start
/// continuation. Fails atomically: either every point certifies or an error
/// is returned.
pub fn sample_phi(params: &ModelParams, r_grid: &[f64]) -> Result<CurveSamples> {
    let critical = critical_point(params)?;
    if r_grid.is_empty() {
        return Err(Error::OutOfRange {
            r: f64::NAN,
            lo: 0.0,
            hi: critical.r0,
        });
    }
    for w in r_grid.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::OutOfRange {
                r: w[1],
                lo: w[0],
                hi: critical.r0,
            });
        }
    }
    let mut points = Vec::with_capacity(r_grid.len());
    let mut residuals = Vec::with_capacity(r_grid.len());
    let mut warm = None;
    for &r in r_grid {
        let c = phi_from_critical(params, &critical, r, warm)?;
        if let Some(&(_, c_prev)) = points.last() {
            if c >= c_prev {
                return Err(Error::BracketFailure {
                    what: "phi monotonicity",
                    detail: format!("c({r}) = {c} did not decrease below {c_prev}"),
                });
            }
        }
        points.push((r, c));
        residuals.push(g(params, r, c).abs());
        warm = Some(c);
    }
    Ok(CurveSamples {
        kind: CurveKind::Phi,
        points,
        residuals,
    })
}

/// Richardson-extrapolated limit of m(R) = c R from the two smallest grid
/// points; m(R) = L + O(R^2) on a geometric grid, so the R^2 term cancels.
pub fn extrapolated_m_limit(samples: &CurveSamples) -> Option<f64> {
    if samples.points.len() < 2 {
        return None;
    }
    let (r1, c1) = samples.points[0];
    let (r2, c2) = samples.points[1];
    let (m1, m2) = (c1 * r1, c2 * r2);
    let rho = r2 / r1;
    Some((rho * rho * m1 - m2) / (rho * rho - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explicit_region::flux_at_r;
    use crate::model::validate_params;

    fn fig3() -> ModelParams {
        validate_params(1.0, 0.3, 0.2, 0.25).unwrap()
    }

    #[test]
    fn critical_constants_closed_form() {
        let crit = critical_point(&fig3()).unwrap();
        assert!((crit.c_tilde - 1.0).abs() < 1e-14);
        assert!((crit.b - 5f64.sqrt()).abs() < 1e-14);
        assert!((crit.a - 0.11180339887498948).abs() < 1e-15);
    }

    #[test]
    fn critical_point_reference_values() {
        // Frozen from an independent 30-digit root solve.
        let crit = critical_point(&fig3()).unwrap();
        assert!((crit.c0 - 1.3626632076618443).abs() < 1e-12);
        assert!((crit.r0 - 0.34066580191546107).abs() < 1e-12);
        assert!((crit.x0 - crit.r0).abs() < 1e-12);
        // On the boundary of Q+.
        assert!(flux_at_r(&fig3(), crit.r0, crit.c0).abs() < 1e-14);
        assert!(g(&fig3(), crit.r0, crit.c0).abs() < 1e-10);
    }

    #[test]
    fn critical_bracket_endpoints_have_fixed_signs() {
        // f(c_tilde) > 0 and f(b) = -1 for any valid parameters.
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..200 {
            let q = (rng.gen_range(-2.0..2.0) as f64).exp();
            let h = (rng.gen_range(-2.0..2.0) as f64).exp();
            let tp = (1.0 + q / h).powf(0.25) - 1.0;
            let thl = tp * rng.gen_range(0.2..0.9);
            let tig = thl * rng.gen_range(0.1..0.9);
            let Ok(p) = validate_params(q, h, tig, thl) else {
                continue;
            };
            let f = |c: f64| {
                (1.0 - p.theta_ig / p.q * c * c) * (p.theta_hl / p.q * c * c).exp() - 1.0
            };
            let b = (p.q / p.theta_ig).sqrt();
            let ct = (p.q * (p.theta_hl - p.theta_ig) / (p.theta_hl * p.theta_ig)).sqrt();
            assert!(f(ct) > 0.0, "f(c_tilde) should be positive for {p:?}");
            // f(b) = -1 exactly; the rounding of 1 - (theta_ig/q) b^2 is
            // amplified by e^{theta_hl/theta_ig}.
            let noise = 1e-13 * (p.theta_hl / p.theta_ig).exp() + 1e-12;
            assert!((f(b) + 1.0).abs() < noise, "f(b) = {} for {p:?}", f(b));
            assert!(critical_point(&p).is_ok());
        }
    }

    #[test]
    fn phi_hits_anchor_point() {
        let p = fig3();
        let crit = critical_point(&p).unwrap();
        let c = phi_from_critical(&p, &crit, crit.a, None).unwrap();
        assert!((c - crit.b).abs() < 1e-10);
    }

    #[test]
    fn phi_endpoint_is_critical_speed() {
        let p = fig3();
        let crit = critical_point(&p).unwrap();
        let c = phi_from_critical(&p, &crit, crit.r0, None).unwrap();
        assert!((c - crit.c0).abs() < 1e-8);
    }

    #[test]
    fn phi_domain_checks() {
        let p = fig3();
        assert!(matches!(phi(&p, 0.0), Err(Error::OutOfRange { .. })));
        assert!(matches!(phi(&p, -1.0), Err(Error::OutOfRange { .. })));
        assert!(matches!(phi(&p, 0.5), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn phi_strictly_decreasing_and_interior() {
        let p = fig3();
        let crit = critical_point(&p).unwrap();
        let grid = geometric_grid(0.01 * crit.r0, crit.r0, 100);
        let samples = sample_phi(&p, &grid).unwrap();
        for w in samples.points.windows(2) {
            assert!(w[1].1 < w[0].1);
        }
        // Interior to Q+ away from the right endpoint.
        for &(r, c) in &samples.points[..samples.points.len() - 1] {
            assert!(flux_at_r(&p, r, c) > 0.0, "flux not positive at R = {r}");
        }
    }

    #[test]
    fn sampled_residuals_certify() {
        let p = fig3();
        let crit = critical_point(&p).unwrap();
        let samples = sample_phi(&p, &default_phi_grid(&crit)).unwrap();
        assert_eq!(samples.points.len(), 256);
        for &res in &samples.residuals {
            assert!(res <= 1e-10);
        }
    }

    #[test]
    fn small_r_asymptote_lower_bound() {
        let p = fig3();
        let crit = critical_point(&p).unwrap();
        let m = (p.theta_hl / p.theta_ig).ln();
        for k in [2, 3, 4] {
            let r = crit.r0 * 10f64.powi(-k);
            let c = phi_from_critical(&p, &crit, r, None).unwrap();
            assert!(c >= m / (2.0 * r), "phi({r}) = {c} below asymptote bound");
        }
    }

    #[test]
    fn m_limit_extrapolation() {
        let p = fig3();
        let crit = critical_point(&p).unwrap();
        let samples = sample_phi(&p, &default_phi_grid(&crit)).unwrap();
        let m = extrapolated_m_limit(&samples).unwrap();
        assert!((m - 0.22314355131420976).abs() < 1e-3);
    }

    #[test]
    fn phi_ignores_heat_loss_intensity() {
        let p1 = validate_params(1.0, 0.3, 0.2, 0.25).unwrap();
        let p2 = validate_params(1.0, 0.05, 0.2, 0.25).unwrap();
        let c1 = critical_point(&p1).unwrap();
        let c2 = critical_point(&p2).unwrap();
        assert_eq!(c1.c0.to_bits(), c2.c0.to_bits());
        let grid = default_phi_grid(&c1);
        let s1 = sample_phi(&p1, &grid).unwrap();
        let s2 = sample_phi(&p2, &grid).unwrap();
        for (a, b) in s1.points.iter().zip(&s2.points) {
            assert_eq!(a.1.to_bits(), b.1.to_bits());
        }
    }

    #[test]
    fn rejects_unsorted_grid() {
        let p = fig3();
        assert!(matches!(
            sample_phi(&p, &[0.2, 0.1]),
            Err(Error::OutOfRange { .. })
        ));
    }
}
