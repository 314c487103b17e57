//! Closed-form solutions left of the heat-loss interface and the interface
//! compatibility function G.
//!
//! For speed `c > 0` the profile is explicit up to `x = R`:
//!
//! ```text
//! theta(x) = theta_ig e^{cx}                                    x <= 0,
//! theta(x) = theta_ig e^{cx} + (q/c) x + (q/c^2)(1 - e^{cx})    0 <= x <= R.
//! ```
//!
//! Matching `theta(R) = theta_hl` is equivalent to the zero level set of
//!
//! ```text
//! G(R, c) = q (e^{cR} - 1 - cR) - c^2 (theta_ig e^{cR} - theta_hl),
//! ```
//!
//! and the outgoing derivative there collapses to the flux `c theta_hl - qR`,
//! whose sign decides membership in the admissible region
//! Q+ = {R > 0, c >= qR/theta_hl}.
//!
//! All formulas with `e^{cR} - 1` go through `expm1`: the small-R asymptotics
//! of the curve tracing make cR -> const routine and the naive form cancels
//! catastrophically.

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// A point (R, c) classified against the admissible region Q+.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidatePair {
    pub r: f64,
    pub c: f64,
    /// `c*theta_hl - qR >= -tol`, i.e. the interface flux is non-negative.
    pub in_q_plus: bool,
    /// `|c*theta_hl - qR| <= tol`: the pair sits on the boundary of Q+.
    pub on_boundary: bool,
}

/// Boundary tolerance for Q+ membership. The critical point lies exactly on
/// the boundary and must classify as boundary rather than exterior.
pub fn q_plus_tolerance(params: &ModelParams, c: f64) -> f64 {
    1e-12 * (c * params.theta_hl).abs().max(1.0)
}

/// Classify (R, c) against Q+.
pub fn classify(params: &ModelParams, r: f64, c: f64) -> CandidatePair {
    let flux = flux_at_r(params, r, c);
    let tol = q_plus_tolerance(params, c);
    CandidatePair {
        r,
        c,
        in_q_plus: flux >= -tol,
        on_boundary: flux.abs() <= tol,
    }
}

/// Preheat-zone profile `(theta, theta_x)` at `x <= R` for speed `c > 0`.
pub fn preheat_profile(params: &ModelParams, c: f64, r: f64, x: f64) -> Result<(f64, f64)> {
    if c <= 0.0 {
        return Err(Error::SpeedNonPositive { c });
    }
    debug_assert!(x <= r + 1e-9 * r.abs().max(1.0), "x = {x} beyond R = {r}");
    let tig = params.theta_ig;
    let ecx = (c * x).exp();
    if x < 0.0 {
        Ok((tig * ecx, c * tig * ecx))
    } else {
        let q = params.q;
        let theta = tig * ecx + q / c * x - q / (c * c) * (c * x).exp_m1();
        let theta_x = (c * tig - q / c) * ecx + q / c;
        Ok((theta, theta_x))
    }
}

/// The interface compatibility residual; `G(R, c) = 0` encodes
/// `theta(R) = theta_hl`.
pub fn g(params: &ModelParams, r: f64, c: f64) -> f64 {
    let m = c * r;
    let em1 = m.exp_m1();
    // theta_ig e^m - theta_hl rewritten to avoid cancellation near
    // m = ln(theta_hl/theta_ig).
    params.q * (em1 - m) - c * c * (params.theta_ig * em1 - (params.theta_hl - params.theta_ig))
}

/// Analytic partial derivatives of G, valid off the level set.
pub fn g_partials(params: &ModelParams, r: f64, c: f64) -> (f64, f64) {
    let m = c * r;
    let em = m.exp();
    let em1 = m.exp_m1();
    let (q, tig, thl) = (params.q, params.theta_ig, params.theta_hl);
    let dg_dr = q * c * em1 - c * c * c * tig * em;
    let dg_dc = q * r * em1 - c * tig * em * (2.0 + m) + 2.0 * c * thl;
    (dg_dr, dg_dc)
}

/// Outgoing derivative at the heat-loss interface, `c theta_hl - qR`. Also
/// the Q+ membership functional.
pub fn flux_at_r(params: &ModelParams, r: f64, c: f64) -> f64 {
    c * params.theta_hl - params.q * r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_params;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fig3() -> ModelParams {
        // Heat loss plays no role left of R; h only has to keep the
        // ordering valid.
        validate_params(1.0, 0.3, 0.2, 0.25).unwrap()
    }

    /// The explicit anchor point (a, b) with b = sqrt(q/theta_ig) and
    /// a = (theta_hl/theta_ig - 1)/b.
    fn anchor(params: &ModelParams) -> (f64, f64) {
        let b = (params.q / params.theta_ig).sqrt();
        let a = (params.theta_hl / params.theta_ig - 1.0) / b;
        (a, b)
    }

    #[test]
    fn preheat_is_continuous_at_ignition_interface() {
        let p = fig3();
        let c = 1.7;
        let (th_l, dx_l) = preheat_profile(&p, c, 1.0, -0.0).unwrap();
        let (th_r, dx_r) = preheat_profile(&p, c, 1.0, 0.0).unwrap();
        assert_eq!(th_l, p.theta_ig);
        assert!((th_r - p.theta_ig).abs() < 1e-16);
        assert!((dx_l - c * p.theta_ig).abs() < 1e-16);
        assert!((dx_r - c * p.theta_ig).abs() < 1e-15);
    }

    #[test]
    fn preheat_decays_far_left() {
        let p = fig3();
        let (th, dx) = preheat_profile(&p, 2.0, 1.0, -40.0).unwrap();
        assert!(th < 1e-30 && dx < 1e-30);
    }

    #[test]
    fn preheat_rejects_nonpositive_speed() {
        let p = fig3();
        assert!(matches!(
            preheat_profile(&p, 0.0, 1.0, 0.5).unwrap_err(),
            Error::SpeedNonPositive { .. }
        ));
    }

    #[test]
    fn anchor_point_hits_heat_loss_level() {
        let p = fig3();
        let (a, b) = anchor(&p);
        assert!((a - 0.11180339887498948).abs() < 1e-16);
        assert!((b - 2.2360679774997897).abs() < 1e-15);
        let (theta, _) = preheat_profile(&p, b, a, a).unwrap();
        assert!((theta - p.theta_hl).abs() < 1e-12);
    }

    #[test]
    fn g_collapses_at_zero_interface() {
        let p = fig3();
        for c in [0.3, 1.0, 4.2] {
            let expect = c * c * (p.theta_hl - p.theta_ig);
            assert!((g(&p, 0.0, c) - expect).abs() < 1e-14 * expect);
        }
    }

    #[test]
    fn g_vanishes_at_anchor_for_random_params() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..1000 {
            let q = (rng.gen_range(-3.0..3.0) as f64).exp();
            let h = (rng.gen_range(-3.0..3.0) as f64).exp();
            let tp = (1.0 + q / h).powf(0.25) - 1.0;
            let thl = tp * rng.gen_range(0.15..0.95);
            let tig = thl * rng.gen_range(0.05..0.9);
            let Ok(p) = validate_params(q, h, tig, thl) else {
                continue;
            };
            let (a, b) = anchor(&p);
            // Scale of the individual terms of G at (a, b).
            let scale = (b * b * p.theta_hl).max(p.q * (b * a).exp_m1().abs());
            assert!(
                g(&p, a, b).abs() <= 1e-12 * scale,
                "G(a,b) = {} too large for {p:?}",
                g(&p, a, b)
            );
        }
    }

    #[test]
    fn partials_match_finite_differences() {
        let p = fig3();
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..200 {
            let r = rng.gen_range(0.01..0.8);
            let c = rng.gen_range(0.2..5.0);
            let (dr, dc) = g_partials(&p, r, c);
            let hr = 1e-6 * r.max(1.0);
            let hc = 1e-6 * c.max(1.0);
            let fd_r = (g(&p, r + hr, c) - g(&p, r - hr, c)) / (2.0 * hr);
            let fd_c = (g(&p, r, c + hc) - g(&p, r, c - hc)) / (2.0 * hc);
            let scale_r = dr.abs().max(1e-8);
            let scale_c = dc.abs().max(1e-8);
            assert!((dr - fd_r).abs() / scale_r < 1e-6, "dG/dR at ({r}, {c})");
            assert!((dc - fd_c).abs() / scale_c < 1e-6, "dG/dc at ({r}, {c})");
        }
    }

    #[test]
    fn partials_negative_at_anchor() {
        let p = fig3();
        let (a, b) = anchor(&p);
        let (dr, dc) = g_partials(&p, a, b);
        assert!(dr < 0.0 && dc < 0.0);
    }

    #[test]
    fn flux_at_anchor_reduces_to_b_theta_ig() {
        let p = fig3();
        let (a, b) = anchor(&p);
        assert!((flux_at_r(&p, a, b) - b * p.theta_ig).abs() < 1e-15);
        assert!((flux_at_r(&p, a, b) - 0.44721359549995794).abs() < 1e-15);
    }

    #[test]
    fn flux_matches_preheat_derivative_on_level_set() {
        let p = fig3();
        let (a, b) = anchor(&p);
        let (_, theta_x) = preheat_profile(&p, b, a, a).unwrap();
        assert!((theta_x - flux_at_r(&p, a, b)).abs() < 1e-12);
    }

    #[test]
    fn classification_flags() {
        let p = fig3();
        let inside = classify(&p, 0.1, 3.0);
        assert!(inside.in_q_plus && !inside.on_boundary);
        let outside = classify(&p, 1.0, 0.5);
        assert!(!outside.in_q_plus && !outside.on_boundary);
        // Exactly on the boundary: c = qR/theta_hl.
        let r = 0.4;
        let c = p.q * r / p.theta_hl;
        let edge = classify(&p, r, c);
        assert!(edge.in_q_plus && edge.on_boundary);
    }
}
