//! Closed-form reference solutions.
//!
//! * rectangle and right-isoceles-triangle eigenfunctions,
//! * local corner solutions `J_ν(λr)·sin|cos(ν(θ + θ₀/2))` for any corner angle
//!   and side conditions,
//! * Bessel functions of real order and their zeros,
//! * exact integer polynomial arithmetic for the radial commutator identity.

mod bessel;
mod modes;
mod poly;

use thiserror::Error;

pub use bessel::{
    bessel_j, bessel_j_all, bessel_j_recurrence, bessel_j_series, bessel_zero, gamma, ln_gamma, BesselValue, MAX_ARG,
    MAX_ORDER,
};
pub use modes::{AnalyticMode, Angular, Hessian, ModeSample, ModeShape};
pub use poly::{poly_commutator_check, Poly};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("Bessel arguments out of range: ν = {nu}, x = {x} (need 0 ≤ ν ≤ 50, 0 ≤ x ≤ 1000)")]
    BesselRange { nu: f64, x: f64 },
    #[error("Bessel zero index out of range: ν = {nu}, m = {m}")]
    BesselZeroRange { nu: f64, m: usize },
    #[error("could not bracket zero {m} of J_{nu}")]
    BracketFailure { nu: f64, m: usize },
    #[error("invalid mode indices ({m}, {n})")]
    InvalidIndices { m: u32, n: u32 },
    #[error("corner angle {0} must lie in (0, 2π)")]
    InvalidAngle(f64),
    #[error("frequency λ = {0} must be positive")]
    NonPositiveLambda(f64),
}
