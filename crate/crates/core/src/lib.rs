//! Near-zero bound states of one-dimensional Dirac operators
//! `D = iσ₃∂ₓ + κ(x)σ₁` whose mass κ has several domain walls.

pub mod analytic_modes;
pub mod error;
pub mod experiments;
pub mod lyapunov_schmidt;
pub mod mass_profiles;
pub mod quadrature;
pub mod spectral_solver;

pub use error::{Error, Result};
