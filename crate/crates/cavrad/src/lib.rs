//! Numerical engine for the radiative corrections (γ-factors) and the
//! spontaneous decay rate of a point dipole seated at the center of a real
//! cavity in an effective medium.
//!
//! Three scenarios are covered:
//!
//! * **bare cavity** — an empty exclusion sphere of radius `R0` drilled in a
//!   continuous medium of permittivity `eps1`;
//! * **molecule in vacuum** — the emitter inside a small molecular shell
//!   (`R0 < r < R1`, permittivity `eps1`) surrounded by vacuum;
//! * **molecule in medium** — the same molecule embedded in a continuous
//!   host of permittivity `eps2` (propagating decay rate).
//!
//! The building blocks are k-space convolutions of cavity correlation
//! functions with the free dyadic Green function (cavity factors), a
//! recursion for partial pseudo-susceptibilities, and γ-factor assembly with
//! explicit principal-value plus Sokhotski–Plemelj pole handling.

pub mod cavity_factors;
pub mod correlations;
pub mod emission;
pub mod fitting;
pub mod gamma;
pub mod numerics;
pub mod plot;
pub mod propagators;
pub mod pseudo_chi;
pub mod scenario;
pub mod sweep;
pub mod verify;

pub use num_complex::Complex64;

/// Crate-wide complex alias matching the examples' convention.
pub type C64 = num_complex::Complex64;
