//! Model parameters and the piecewise reaction term.
//!
//! The solver targets the scalar traveling-wave equation
//!
//! ```text
//! theta_xx - c theta_x + F(theta) = 0,   theta(-inf) = 0,  theta(+inf) = theta_plus,
//! ```
//!
//! with the two-threshold reaction
//!
//! ```text
//! F(theta) = q H(theta - theta_ig) - h ((1 + theta)^4 - 1) H(theta - theta_hl),
//! ```
//!
//! where `H` is the Heaviside step (convention H(0) = 1, so the reaction is
//! right-continuous at both thresholds). Below `theta_ig` nothing happens;
//! between the thresholds a constant heat release `q` acts; above `theta_hl`
//! radiative loss kicks in. The hot equilibrium is the zero of the restricted
//! reaction, `theta_plus = (1 + q/h)^(1/4) - 1`, and every admissible
//! parameter set must satisfy `0 < theta_ig < theta_hl < theta_plus`.
//!
//! The restricted reaction `F(u) = q - h((1+u)^4 - 1)` and its potential
//! `U(u) = int_{theta_hl}^u F` drive the phase-plane analysis. A custom
//! restricted reaction can replace the quartic one as long as it keeps a
//! single simple zero above `theta_hl`; in that case the potential falls
//! back to adaptive quadrature.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::quad::adaptive_simpson;
use crate::numerics::roots::{bisect, scan_sign_changes};

/// Quadrature tolerance for custom-reaction potentials.
const POTENTIAL_QUAD_TOL: f64 = 1e-13;

/// Validated physical parameters with the derived equilibrium cached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    pub q: f64,
    pub h: f64,
    pub theta_ig: f64,
    pub theta_hl: f64,
    theta_plus: f64,
}

impl ModelParams {
    /// Validate and construct; see [`validate_params`].
    pub fn new(q: f64, h: f64, theta_ig: f64, theta_hl: f64) -> Result<Self> {
        validate_params(q, h, theta_ig, theta_hl)
    }

    /// The hot equilibrium `(1 + q/h)^(1/4) - 1`.
    pub fn theta_plus(&self) -> f64 {
        self.theta_plus
    }
}

fn check_finite(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::NonFinite { name, value });
    }
    Ok(())
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value <= 0.0 {
        return Err(Error::NonPositiveParameter { name, value });
    }
    Ok(())
}

/// Validate `(q, h, theta_ig, theta_hl)` and cache `theta_plus`.
///
/// Rejects non-finite inputs, non-positive `q`, `h` or `theta_ig`, and any
/// violation of the ordering `theta_ig < theta_hl < theta_plus`.
pub fn validate_params(q: f64, h: f64, theta_ig: f64, theta_hl: f64) -> Result<ModelParams> {
    check_finite("q", q)?;
    check_finite("h", h)?;
    check_finite("theta_ig", theta_ig)?;
    check_finite("theta_hl", theta_hl)?;
    check_positive("q", q)?;
    check_positive("h", h)?;
    check_positive("theta_ig", theta_ig)?;
    let theta_plus = (1.0 + q / h).powf(0.25) - 1.0;
    if theta_ig >= theta_hl || theta_hl >= theta_plus {
        return Err(Error::OrderingViolated {
            theta_ig,
            theta_hl,
            theta_plus,
        });
    }
    Ok(ModelParams {
        q,
        h,
        theta_ig,
        theta_hl,
        theta_plus,
    })
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Which restricted reaction the model uses above `theta_hl`.
#[derive(Clone)]
pub enum ReactionSpec {
    /// `F(u) = q - h((1+u)^4 - 1)`, the radiative heat-loss form.
    QuarticRadiative,
    /// User-supplied `F`, its derivative, and a bracket interval that must
    /// contain `[theta_hl, theta_plus]` with a unique simple zero of `F`.
    Custom {
        f: ScalarFn,
        df: ScalarFn,
        bracket: (f64, f64),
    },
}

impl fmt::Debug for ReactionSpec {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReactionSpec::QuarticRadiative => fm.write_str("QuarticRadiative"),
            ReactionSpec::Custom { bracket, .. } => {
                write!(fm, "Custom {{ bracket: {bracket:?} }}")
            }
        }
    }
}

/// A validated model: parameters plus the restricted reaction, its effective
/// equilibrium and the working domain W.
#[derive(Debug, Clone)]
pub struct Model {
    params: ModelParams,
    reaction: ReactionSpec,
    theta_plus: f64,
    domain: (f64, f64),
}

impl Model {
    /// The standard radiative model. W defaults to
    /// `[theta_hl - 0.1 d, theta_plus + 0.5 d]` with `d = theta_plus - theta_hl`,
    /// leaving slack above `theta_plus` for integration overshoot.
    pub fn quartic(params: ModelParams) -> Model {
        let tp = params.theta_plus();
        let d = tp - params.theta_hl;
        Model {
            params,
            reaction: ReactionSpec::QuarticRadiative,
            theta_plus: tp,
            domain: (params.theta_hl - 0.1 * d, tp + 0.5 * d),
        }
    }

    /// Build a model with a custom restricted reaction.
    ///
    /// The handles are validated on a 256-point grid of `[theta_hl,
    /// theta_plus)`: `F` must stay positive there, have exactly one sign
    /// change on the bracket, and satisfy `F'(theta_plus) < 0`. The zero
    /// found replaces the quartic equilibrium, and the ordering
    /// `theta_ig < theta_hl < theta_plus` is re-checked against it.
    pub fn with_reaction(params: ModelParams, reaction: ReactionSpec) -> Result<Model> {
        match reaction {
            ReactionSpec::QuarticRadiative => Ok(Model::quartic(params)),
            ReactionSpec::Custom { f, df, bracket } => {
                let (w_lo, w_hi) = bracket;
                if !(w_lo.is_finite() && w_hi.is_finite()) || w_lo >= w_hi {
                    return Err(Error::InvalidReaction(format!(
                        "bracket [{w_lo}, {w_hi}] is not a proper interval"
                    )));
                }
                if w_lo > params.theta_hl || w_hi <= params.theta_hl {
                    return Err(Error::InvalidReaction(format!(
                        "bracket [{w_lo}, {w_hi}] does not contain [theta_hl, theta_plus]"
                    )));
                }
                let (changes, first) = scan_sign_changes(&*f, params.theta_hl, w_hi, 4096);
                if changes != 1 {
                    return Err(Error::InvalidReaction(format!(
                        "expected exactly one sign change of F on [{}, {w_hi}], found {changes}",
                        params.theta_hl
                    )));
                }
                let b = first.unwrap();
                let theta_plus = bisect(&*f, b, 1e-15 * w_hi.abs().max(1.0), 0.0);
                if theta_plus <= params.theta_hl {
                    return Err(Error::OrderingViolated {
                        theta_ig: params.theta_ig,
                        theta_hl: params.theta_hl,
                        theta_plus,
                    });
                }
                let slope = df(theta_plus);
                if !(slope < 0.0) {
                    return Err(Error::InvalidReaction(format!(
                        "F'(theta_plus) = {slope} must be negative"
                    )));
                }
                for k in 0..256 {
                    let u = params.theta_hl
                        + (theta_plus - params.theta_hl) * k as f64 / 256.0;
                    let val = f(u);
                    if !(val > 0.0) {
                        return Err(Error::InvalidReaction(format!(
                            "F({u}) = {val} is not positive below theta_plus"
                        )));
                    }
                }
                Ok(Model {
                    params,
                    reaction: ReactionSpec::Custom { f, df, bracket },
                    theta_plus,
                    domain: bracket,
                })
            }
        }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Effective equilibrium: the quartic closed form, or the located zero
    /// of a custom reaction.
    pub fn theta_plus(&self) -> f64 {
        self.theta_plus
    }

    /// The working domain W of the restricted reaction.
    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    fn check_domain(&self, u: f64) -> Result<()> {
        let (lo, hi) = self.domain;
        if u < lo || u > hi {
            return Err(Error::OutOfDomain { u, lo, hi });
        }
        Ok(())
    }

    /// The full piecewise reaction with H(0) = 1 at both thresholds.
    pub fn reaction_full(&self, theta: f64) -> f64 {
        if theta < self.params.theta_ig {
            0.0
        } else if theta < self.params.theta_hl {
            self.params.q
        } else {
            self.f_raw(theta)
        }
    }

    /// Restricted reaction `F(u)` on W.
    pub fn reaction_restricted(&self, u: f64) -> Result<f64> {
        self.check_domain(u)?;
        Ok(self.f_raw(u))
    }

    /// Derivative `F'(u)` on W.
    pub fn reaction_derivative(&self, u: f64) -> Result<f64> {
        self.check_domain(u)?;
        Ok(self.df_raw(u))
    }

    /// Potential `U(u) = int_{theta_hl}^u F(s) ds`, with `U(theta_hl) = 0`.
    /// Closed form for the quartic reaction, adaptive quadrature otherwise.
    pub fn potential(&self, u: f64) -> Result<f64> {
        self.check_domain(u)?;
        Ok(self.potential_raw(u))
    }

    pub(crate) fn f_raw(&self, u: f64) -> f64 {
        match &self.reaction {
            ReactionSpec::QuarticRadiative => {
                let g = (1.0 + u).powi(4) - 1.0;
                self.params.q - self.params.h * g
            }
            ReactionSpec::Custom { f, .. } => f(u),
        }
    }

    pub(crate) fn df_raw(&self, u: f64) -> f64 {
        match &self.reaction {
            ReactionSpec::QuarticRadiative => -4.0 * self.params.h * (1.0 + u).powi(3),
            ReactionSpec::Custom { df, .. } => df(u),
        }
    }

    pub(crate) fn potential_raw(&self, u: f64) -> f64 {
        let thl = self.params.theta_hl;
        match &self.reaction {
            ReactionSpec::QuarticRadiative => {
                let (q, h) = (self.params.q, self.params.h);
                (q + h) * (u - thl) - h / 5.0 * ((1.0 + u).powi(5) - (1.0 + thl).powi(5))
            }
            ReactionSpec::Custom { f, .. } => {
                if u == thl {
                    0.0
                } else if u > thl {
                    adaptive_simpson(&**f, thl, u, POTENTIAL_QUAD_TOL)
                } else {
                    -adaptive_simpson(&**f, u, thl, POTENTIAL_QUAD_TOL)
                }
            }
        }
    }
}
