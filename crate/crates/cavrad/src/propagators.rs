//! Free-space and bulk dyadic Green-function components in k-space and real
//! space, the effective-medium self-energy, and the vacuum regulator.
//!
//! Conventions (fixed by the near-field coefficient table and the
//! Lorentz-Lorenz limit, see the tests):
//!
//! * transverse free component `G⊥(k) = 1/(k̃² − k² + i0)`;
//! * longitudinal free component `G∥ = +1/k̃²` (k-independent);
//! * the real-space dyadic is minus the standard electromagnetic dyadic,
//!   `Ḡ⁽⁰⁾(r) = iso(r)·Ī + rad(r)·r̂⊗r̂ + (Ī/3k̃²)δ³(r)`.

use crate::C64;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum PropagatorError {
    #[error("separation must be positive, got r = {0}")]
    DomainError(f64),
}

/// Wavenumbers and bare polarizability shared by every evaluation.
#[derive(Debug, Clone, Copy)]
pub struct WaveContext {
    /// In-vacuum resonance wavenumber.
    pub k0: f64,
    /// Operating/emission wavenumber.
    pub k_tilde: f64,
    /// Electrostatic polarizability (volume units).
    pub alpha0: f64,
}

impl WaveContext {
    pub fn new(k0: f64, k_tilde: f64, alpha0: f64) -> Self {
        assert!(k0 > 0.0 && k_tilde > 0.0 && alpha0 > 0.0);
        Self {
            k0,
            k_tilde,
            alpha0,
        }
    }
}

/// Complex permittivities of the intramolecular and host media.
#[derive(Debug, Clone, Copy)]
pub struct MediumSpec {
    pub eps1: C64,
    pub eps2: C64,
    /// Shipped scenarios assume real permittivities; pole annotations are
    /// dropped when an imaginary part is present.
    pub real_permittivity: bool,
}

impl MediumSpec {
    pub fn real(eps1: f64, eps2: f64) -> Self {
        assert!(eps1 >= 0.0 && eps2 >= 0.0, "passivity");
        Self {
            eps1: C64::new(eps1, 0.0),
            eps2: C64::new(eps2, 0.0),
            real_permittivity: true,
        }
    }
}

/// Transverse/longitudinal pair at a given wavenumber.
#[derive(Debug, Clone, Copy)]
pub struct PropagatorComponents {
    pub transverse: C64,
    pub longitudinal: C64,
}

/// `G⊥⁽⁰⁾(k) = 1/(k̃² − k²)`; the +i0 pole at k = k̃ is handled downstream.
pub fn free_transverse(k: f64, ctx: &WaveContext) -> C64 {
    debug_assert!(k >= 0.0);
    let kt2 = ctx.k_tilde * ctx.k_tilde;
    C64::new(1.0 / (kt2 - k * k), 0.0)
}

/// `G∥⁽⁰⁾ = +1/k̃²`, independent of k.
///
/// The sign is the one that reproduces the near-field table
/// `A₃⁽¹⁾ = 1, B₃⁽¹⁾ = −1, A₁⁽¹⁾ = 1/2, B₁⁽¹⁾ = −1/2` and the
/// Lorentz-Lorenz point limit; see the acceptance suite.
pub fn free_longitudinal(_k: f64, ctx: &WaveContext) -> C64 {
    C64::new(1.0 / (ctx.k_tilde * ctx.k_tilde), 0.0)
}

/// Bulk transverse component `1/(ε k̃² − k²)`, pole at `k = √ε k̃` for real ε.
pub fn bulk_transverse(k: f64, eps: C64, ctx: &WaveContext) -> C64 {
    debug_assert!(k >= 0.0);
    let kt2 = ctx.k_tilde * ctx.k_tilde;
    (eps * kt2 - k * k).inv()
}

/// Bulk longitudinal component `1/(ε k̃²)`.
pub fn bulk_longitudinal(eps: C64, ctx: &WaveContext) -> C64 {
    (eps * ctx.k_tilde * ctx.k_tilde).inv()
}

/// Effective-medium self-energy `Σ⊥ = Σ∥ = −k̃²(ε − 1)`.
///
/// This is the unique choice making `χ̂⁽⁰⁾ = −k̃²/Σ = 1/(ε−1)` and letting
/// the Dyson resummation `G⁽⁰⁾/(1 − Σ G⁽⁰⁾)` reproduce the bulk components.
pub fn self_energy(eps: C64, ctx: &WaveContext) -> PropagatorComponents {
    let sigma = -(ctx.k_tilde * ctx.k_tilde) * (eps - 1.0);
    PropagatorComponents {
        transverse: sigma,
        longitudinal: sigma,
    }
}

/// Radial components of the real-space free dyadic at separation `r > 0`:
/// `Ḡ⁽⁰⁾(r) = iso·Ī + rad·r̂⊗r̂` away from the origin.
///
/// These equal minus the standard EM dyadic components
/// `a = (E/4πr)(1 + i/(k̃r) − 1/(k̃r)²)`, `b = (E/4πr)(−1 − 3i/(k̃r) + 3/(k̃r)²)`
/// with `E = e^{ik̃r}` (outgoing). The distributional part at the origin is
/// `+Ī/(3k̃²) δ³(r)`; see [`DELTA_ISO_COEFF`].
pub fn real_space_dyadic(r: f64, ctx: &WaveContext) -> Result<(C64, C64), PropagatorError> {
    if r <= 0.0 {
        return Err(PropagatorError::DomainError(r));
    }
    let kt = ctx.k_tilde;
    let kr = kt * r;
    let e = C64::new(0.0, kr).exp();
    let pref = e / (4.0 * std::f64::consts::PI * r);
    let inv = 1.0 / kr;
    let a = pref * (C64::new(1.0, 0.0) + C64::new(0.0, inv) - C64::new(inv * inv, 0.0));
    let b = pref * (C64::new(-1.0, 0.0) - C64::new(0.0, 3.0 * inv) + C64::new(3.0 * inv * inv, 0.0));
    Ok((-a, -b))
}

/// The two angular trace kernels of the real-space free dyadic used by the
/// real-space cavity-factor route:
/// `t⊥(r, ψ) = Tr{Ḡ(Ī − k̂k̂)} = 2·iso + rad·sin²ψ`,
/// `t∥(r, ψ) = Tr{Ḡ k̂k̂} = iso + rad·cos²ψ`,
/// returned here as the `(iso, rad)` pair they are built from.
pub fn real_space_dyadic_traces(r: f64, ctx: &WaveContext) -> Result<(C64, C64), PropagatorError> {
    real_space_dyadic(r, ctx)
}

/// Coefficient of the `Ī δ³(r)` distributional term of the dyadic, `+1/(3k̃²)`.
pub fn delta_iso_coeff(ctx: &WaveContext) -> f64 {
    1.0 / (3.0 * ctx.k_tilde * ctx.k_tilde)
}

/// Vacuum regulator `Re{2γ⊥⁽⁰⁾} = −3/(k₀² α₀)` absorbing the ultraviolet
/// divergence of the free transverse component into the resonance condition.
pub fn vacuum_regulator(ctx: &WaveContext) -> f64 {
    -3.0 / (ctx.k0 * ctx.k0 * ctx.alpha0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ctx() -> WaveContext {
        WaveContext::new(1.0, 1.0, 1.0)
    }

    #[test]
    fn free_transverse_values() {
        let c = ctx();
        assert_relative_eq!(free_transverse(0.0, &c).re, 1.0);
        assert_relative_eq!(free_transverse(2.0, &c).re, -1.0 / 3.0);
    }

    #[test]
    fn free_longitudinal_constant() {
        let c = WaveContext::new(1.0, 2.0, 1.0);
        assert_relative_eq!(free_longitudinal(0.0, &c).re, 0.25);
        assert_relative_eq!(free_longitudinal(17.3, &c).re, 0.25);
    }

    #[test]
    fn bulk_reduces_to_free_at_unit_eps() {
        let c = ctx();
        for k in [0.0, 0.3, 1.7, 9.0] {
            let b = bulk_transverse(k, C64::new(1.0, 0.0), &c);
            let f = free_transverse(k, &c);
            assert!((b - f).norm() < 1e-15);
        }
    }

    #[test]
    fn bulk_static_value() {
        let c = ctx();
        assert_relative_eq!(
            bulk_transverse(0.0, C64::new(2.25, 0.0), &c).re,
            1.0 / 2.25,
            max_relative = 1e-14
        );
    }

    #[test]
    fn self_energy_values() {
        let c = ctx();
        assert!(self_energy(C64::new(1.0, 0.0), &c).transverse.norm() < 1e-15);
        assert_relative_eq!(self_energy(C64::new(2.0, 0.0), &c).transverse.re, -1.0);
    }

    #[test]
    fn dyson_identity() {
        // G0/(1 - Sigma G0) equals the bulk component (algebraic oracle)
        let c = ctx();
        let eps = C64::new(2.25, 0.0);
        let sigma = self_energy(eps, &c).transverse;
        for k in [0.4, 1.7, 3.3] {
            let g0 = free_transverse(k, &c);
            let assembled = g0 / (C64::new(1.0, 0.0) - sigma * g0);
            let bulk = bulk_transverse(k, eps, &c);
            assert!((assembled - bulk).norm() < 1e-12, "k={k}");
            // equivalent geometric form: g0 + g0 (-sigma)^{-1}... standard identity
            let resummed = g0 + g0 * sigma * assembled;
            assert!((resummed - bulk).norm() < 1e-12);
        }
    }

    #[test]
    fn regulator_values() {
        assert_relative_eq!(vacuum_regulator(&WaveContext::new(1.0, 1.0, 3.0)), -1.0);
        assert_relative_eq!(vacuum_regulator(&WaveContext::new(2.0, 1.0, 0.75)), -1.0);
        assert!(vacuum_regulator(&WaveContext::new(0.7, 1.0, 0.2)) < 0.0);
    }

    #[test]
    fn far_field_structure() {
        // transverse trace kernel decays like 1/r, longitudinal faster
        let c = ctx();
        let (iso1, rad1) = real_space_dyadic(50.0, &c).unwrap();
        // radiation zone: iso + rad -> 0 (transversality)
        assert!((iso1 + rad1).norm() < 0.2 * iso1.norm());
        let (iso2, _) = real_space_dyadic(100.0, &c).unwrap();
        let ratio = iso2.norm() / iso1.norm();
        assert!((ratio - 0.5).abs() < 0.1, "1/r decay, got ratio {ratio}");
    }

    #[test]
    fn near_field_divergence_and_domain() {
        let c = ctx();
        let (iso, rad) = real_space_dyadic(1e-3, &c).unwrap();
        // 1/r^3 dominance with iso ~ +1/(4pi kt^2 r^3), rad ~ -3x
        let expect = 1.0 / (4.0 * std::f64::consts::PI * 1e-9);
        assert_relative_eq!(iso.re, expect, max_relative = 1e-3);
        assert_relative_eq!(rad.re, -3.0 * expect, max_relative = 1e-3);
        assert!(real_space_dyadic(0.0, &c).is_err());
        assert!(real_space_dyadic(-1.0, &c).is_err());
    }
}
