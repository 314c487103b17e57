//! The separatrix-matching curve c = psi(R).
//!
//! Matching the explicit preheat flux to the separatrix height means
//! `c theta_hl - qR = v(theta_hl, c)`, which solves for R directly:
//!
//! ```text
//! R(c) = (c theta_hl - v(theta_hl, c)) / q.
//! ```
//!
//! R(c) is strictly increasing (its derivative is `(theta_hl - dv/dc)/q`
//! with dv/dc < 0), so psi is its inverse on [0, +inf). The curve lives
//! strictly between the boundary ray `qR/theta_hl` and the Hamiltonian
//! bound `c_plus(R) = (v_0(theta_hl) + qR)/theta_hl`, which also provides
//! the guaranteed bisection bracket: the lower end undershoots R because
//! v > 0 and the upper end overshoots because v <= v_0.

use crate::error::{Error, Result};
use crate::model::Model;
use crate::phase_plane::{SeparatrixOptions, VhlCache};
use crate::phi_curve::{CurveKind, CurveSamples};

/// Default inversion accuracy: |R(c) - R| <= TOL_R, absolute. The residual
/// floor of R(c) is ulps of c*theta_hl/q plus integrator noise, far below
/// this for any speed the solver visits.
const TOL_R_FACTOR: f64 = 1e-10;

/// Separatrix tolerances for the inversion, one order below tol_r so the
/// bisection is not limited by v_hl noise.
pub(crate) fn psi_separatrix_options() -> SeparatrixOptions {
    SeparatrixOptions {
        rtol: 1e-11,
        atol: 1e-13,
        ..SeparatrixOptions::default()
    }
}

/// R(c) = (c theta_hl - v(theta_hl, c)) / q for c >= 0. Negative for small
/// c (below psi(0)); useful there only for bracketing.
pub fn r_of_c(model: &Model, c: f64) -> Result<f64> {
    let cache = VhlCache::new(psi_separatrix_options());
    r_of_c_cached(model, &cache, c)
}

/// R(c) reusing a separatrix cache.
pub fn r_of_c_cached(model: &Model, cache: &VhlCache, c: f64) -> Result<f64> {
    let p = model.params();
    Ok((c * p.theta_hl - cache.get(model, c)?) / p.q)
}

/// The explicit upper bound c_plus(R) = (v_0(theta_hl) + qR)/theta_hl.
pub fn c_plus_bound(model: &Model, r: f64) -> f64 {
    let p = model.params();
    let v0_hl = (2.0 * model.potential_raw(model.theta_plus())).sqrt();
    (v0_hl + p.q * r) / p.theta_hl
}

/// psi(R): the unique speed with R(c) = R, for R >= 0.
pub fn psi(model: &Model, r: f64) -> Result<f64> {
    let cache = VhlCache::new(psi_separatrix_options());
    psi_cached(model, &cache, r)
}

/// psi(R) reusing a separatrix cache.
pub fn psi_cached(model: &Model, cache: &VhlCache, r: f64) -> Result<f64> {
    Ok(psi_with_residual(model, cache, r, TOL_R_FACTOR)?.0)
}

/// psi(R) with a caller-supplied inversion tolerance factor.
pub(crate) fn psi_cached_with_tolerance(
    model: &Model,
    cache: &VhlCache,
    r: f64,
    tol_r_factor: f64,
) -> Result<f64> {
    Ok(psi_with_residual(model, cache, r, tol_r_factor)?.0)
}

fn psi_with_residual(
    model: &Model,
    cache: &VhlCache,
    r: f64,
    tol_r_factor: f64,
) -> Result<(f64, f64)> {
    if !(r >= 0.0) {
        return Err(Error::OutOfRange {
            r,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    let p = model.params();
    let mut lo = p.q * r / p.theta_hl;
    let mut hi = c_plus_bound(model, r);
    let rho_lo = r_of_c_cached(model, cache, lo)? - r;
    let rho_hi = r_of_c_cached(model, cache, hi)? - r;
    if !(rho_lo <= 0.0 && rho_hi >= 0.0) {
        return Err(Error::BracketFailure {
            what: "psi bracket",
            detail: format!(
                "R(c) - R has no sign change on [{lo}, {hi}]: ({rho_lo}, {rho_hi}); \
                 separatrix hypotheses violated"
            ),
        });
    }
    let tol = tol_r_factor;
    let mut best = (0.5 * (lo + hi), f64::INFINITY);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let rho = r_of_c_cached(model, cache, mid)? - r;
        if rho.abs() < best.1 {
            best = (mid, rho.abs());
        }
        if rho.abs() <= tol {
            return Ok((mid, rho.abs()));
        }
        if rho < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if best.1 <= tol {
        Ok(best)
    } else {
        Err(Error::BracketFailure {
            what: "psi inversion",
            detail: format!("residual {} above tolerance {tol} at R = {r}", best.1),
        })
    }
}

/// Tabulate psi over an ascending grid of R >= 0 with a shared separatrix
/// cache. Residuals are the inversion defects |R(c) - R|.
pub fn sample_psi(model: &Model, r_grid: &[f64]) -> Result<CurveSamples> {
    if r_grid.is_empty() {
        return Err(Error::OutOfRange {
            r: f64::NAN,
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    for w in r_grid.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::OutOfRange {
                r: w[1],
                lo: w[0],
                hi: f64::INFINITY,
            });
        }
    }
    let cache = VhlCache::new(psi_separatrix_options());
    let mut points = Vec::with_capacity(r_grid.len());
    let mut residuals = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let (c, res) = psi_with_residual(model, &cache, r, TOL_R_FACTOR)?;
        if let Some(&(_, c_prev)) = points.last() {
            if c <= c_prev {
                return Err(Error::BracketFailure {
                    what: "psi monotonicity",
                    detail: format!("c({r}) = {c} did not increase above {c_prev}"),
                });
            }
        }
        points.push((r, c));
        residuals.push(res);
    }
    Ok(CurveSamples {
        kind: CurveKind::Psi,
        points,
        residuals,
    })
}
