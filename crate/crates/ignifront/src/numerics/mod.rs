//! Shared numerical kernels: interpolation, root finding, quadrature, ODE
//! integration. Everything here is deterministic and allocation-light.

pub mod interp;
pub mod ode;
pub mod quad;
pub mod roots;
