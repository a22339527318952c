//! Quadrature and series-summation engine used by every physics module.
//!
//! Provides adaptive Gauss–Kronrod integration on finite and semi-infinite
//! intervals, explicit principal-value pole extraction with the
//! Sokhotski–Plemelj delta term, convergence-controlled series summation,
//! Gauss–Legendre rules for the angular integrals, cubic-spline sampling of
//! spectral functions, and the sine/cosine integrals used for analytic
//! oscillatory tails.

mod gauss;
mod quad;
mod series;
mod sici;
mod spline;

pub use gauss::gauss_legendre;
pub use quad::{
    integrate_adaptive, integrate_adaptive_floor, integrate_semi_infinite,
    integrate_semi_infinite_floor, integrate_with_pole, integrate_with_pole_floor, Integrand1D,
    PoleShift, QuadratureResult, Singularity, SingularityKind,
};
pub use series::{sum_series, SeriesControl};
pub use sici::{cos_tail, si_ci, sin_tail};
pub use spline::CubicSpline;

use thiserror::Error;

/// Errors surfaced by the quadrature and summation routines.
#[derive(Debug, Clone, Error)]
pub enum NumericsError {
    #[error("integration budget exhausted: error {error:.3e} above tolerance {tol:.3e} after {evaluations} evaluations")]
    NonConvergence {
        error: f64,
        tol: f64,
        evaluations: usize,
    },
    #[error("non-finite sample at x = {x} without a singularity annotation")]
    SingularInterval { x: f64 },
    #[error("pole at {pole} lies within {distance:.3e} of an interval endpoint")]
    PoleTooCloseToEndpoint { pole: f64, distance: f64 },
    #[error("semi-infinite tail fails to decay under truncation doubling")]
    TailNotDecaying,
    #[error("series diverging: term magnitudes grew three times in a row after {terms} terms")]
    SeriesDiverging { terms: usize },
}

pub type Result<T> = std::result::Result<T, NumericsError>;
