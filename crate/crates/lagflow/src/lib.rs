//! Constructive machinery for steering planar potential flows from the
//! boundary: spectral Steklov bases on rectangles, series solvers for the
//! (ill-posed) harmonic Cauchy problem, Poincare-Steklov operators on a
//! concentric-disk geometry with regularized approximate control, rational
//! and polynomial approximation with smooth-in-time blending, transport of
//! Jordan curves along the induced velocity fields, and an independent
//! finite-difference oracle used to cross-check every spectral route.
//!
//! The modules are intentionally decoupled: [`fdsolve`] shares no code with
//! the spectral solvers it verifies, and the approximation layer ([`runge`])
//! only consumes evaluators.

pub mod cauchy;
pub mod diskop;
pub mod error;
pub mod fdsolve;
pub mod flow;
mod hyp;
pub mod runge;
pub mod steklov;

pub use error::{Error, Result};
