//! Traveling-front solver for a two-interface ignition model with radiative
//! heat loss.
//!
//! The model is a scalar reaction-diffusion equation whose reaction switches
//! on at an ignition temperature and acquires a quartic radiative loss above
//! a second threshold. A monotone front crosses three regions: pure
//! diffusion, constant heating, and heating balanced by loss. The first two
//! regions solve in closed form up to the free heat-loss interface x = R;
//! the third is the stable separatrix of a saddle in the phase plane.
//!
//! The front is selected by intersecting two curves in the (R, c) plane:
//!
//! - [`phi_curve`]: speeds compatible with the explicit preheat solution
//!   reaching the heat-loss level at R (decreasing in R);
//! - [`psi_curve`]: speeds at which the preheat flux matches the separatrix
//!   height (increasing in R).
//!
//! [`front_solver`] locates the unique intersection (R*, c*), glues the
//! global profile, and certifies the matching; [`pde_verifier`] replays the
//! front in a time-dependent simulation as an independent check.

pub mod error;
pub mod explicit_region;
pub mod export;
pub mod front_solver;
pub mod model;
pub mod pde_verifier;
pub mod phase_plane;
pub mod phi_curve;
pub mod psi_curve;

pub(crate) mod numerics;

pub use error::{Error, Result};
pub use front_solver::{solve_front, FrontSolution, SolveOptions};
pub use model::{validate_params, Model, ModelParams, ReactionSpec};
