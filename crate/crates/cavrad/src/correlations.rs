//! Cavity/molecule correlation functions and their closed-form Fourier
//! transforms.
//!
//! The bare cavity carves an exclusion hole `h_C(r) = −1` for `r < R0` out of
//! a homogeneous background (`g = (2π)³δ³ + h_C` in k-space); the molecule is
//! a compact shell of matter `R0 < r < R1` with no background term.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum GeometryError {
    #[error("R0 must be positive, got {0}")]
    NonPositiveR0(f64),
    #[error("molecule radius R1 = {r1} must exceed the cavity radius R0 = {r0}")]
    ShellOrdering { r0: f64, r1: f64 },
    #[error("operation requires a molecule geometry (R1 present)")]
    MissingR1,
}

/// Emitter-cavity radius `R0` and optional molecule radius `R1 > R0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityGeometry {
    pub r0: f64,
    pub r1: Option<f64>,
}

impl CavityGeometry {
    pub fn bare(r0: f64) -> Result<Self, GeometryError> {
        if r0 <= 0.0 {
            return Err(GeometryError::NonPositiveR0(r0));
        }
        Ok(Self { r0, r1: None })
    }

    pub fn molecule(r0: f64, r1: f64) -> Result<Self, GeometryError> {
        if r0 <= 0.0 {
            return Err(GeometryError::NonPositiveR0(r0));
        }
        if r1 <= r0 {
            return Err(GeometryError::ShellOrdering { r0, r1 });
        }
        Ok(Self { r0, r1: Some(r1) })
    }

    pub fn r1(&self) -> Result<f64, GeometryError> {
        self.r1.ok_or(GeometryError::MissingR1)
    }

    /// Small-molecule validity warning threshold (`k̃·R1 > 0.5`).
    pub fn small_molecule_warning(&self, k_tilde: f64) -> Option<String> {
        let outer = self.r1.unwrap_or(self.r0);
        let x = k_tilde * outer;
        (x > 0.5).then(|| {
            format!("small-molecule limit strained: k_tilde * R = {x:.3} exceeds 0.5")
        })
    }
}

/// Fourier transform of the unit-ball indicator of radius `R`:
/// `4π(sin qR − qR cos qR)/q³`, with the `q → 0` limit `4πR³/3` taken via the
/// Taylor series below `qR < 1e-4` to avoid catastrophic cancellation.
pub fn ball_indicator_ft(q: f64, radius: f64) -> f64 {
    debug_assert!(radius > 0.0 && q >= 0.0);
    let x = q * radius;
    let v = 4.0 * std::f64::consts::PI * radius.powi(3) / 3.0;
    if x < 1e-4 {
        v * (1.0 - x * x / 10.0 + x.powi(4) / 280.0)
    } else {
        4.0 * std::f64::consts::PI * (x.sin() - x * x.cos()) / (q * q * q)
    }
}

/// Bare-cavity irreducible correlation in k-space: `h_C = −(ball of R0)`.
pub fn cavity_hc_ft(q: f64, geom: &CavityGeometry) -> f64 {
    -ball_indicator_ft(q, geom.r0)
}

/// Molecular shell correlation in k-space, the FT of minus the shell
/// indicator: `ball(R0) − ball(R1)`.
pub fn shell_gc_ft(q: f64, geom: &CavityGeometry) -> Result<f64, GeometryError> {
    let r1 = geom.r1()?;
    Ok(ball_indicator_ft(q, geom.r0) - ball_indicator_ft(q, r1))
}

/// Radial correlation cases fed to the cavity-factor convolutions and the
/// pseudo-susceptibility recurrence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Correlation {
    /// Exclusion ball `h = −1(r<R)` inside a homogeneous background; the full
    /// pair correlation carries a `(2π)³δ³` term.
    BallExclusion { radius: f64 },
    /// Compact molecular shell `+1(R0<r<R1)`; totally irreducible, no delta.
    Shell { r0: f64, r1: f64 },
    /// No correlation hole at all (tests and the vacuum limit).
    Zero,
}

impl Correlation {
    /// k-space evaluator of the irreducible (non-delta) part.
    pub fn ft(&self, q: f64) -> f64 {
        match *self {
            Correlation::BallExclusion { radius } => -ball_indicator_ft(q, radius),
            Correlation::Shell { r0, r1 } => {
                ball_indicator_ft(q, r1) - ball_indicator_ft(q, r0)
            }
            Correlation::Zero => 0.0,
        }
    }

    /// Whether the full pair correlation includes the homogeneous-background
    /// `(2π)³δ³(k)` term.
    pub fn has_delta_background(&self) -> bool {
        matches!(self, Correlation::BallExclusion { .. })
    }

    /// Real-space value of the irreducible part at the origin.
    pub fn h_at_origin(&self) -> f64 {
        match self {
            Correlation::BallExclusion { .. } => -1.0,
            Correlation::Shell { .. } | Correlation::Zero => 0.0,
        }
    }

    /// Real-space value at separation r.
    pub fn h(&self, r: f64) -> f64 {
        match *self {
            Correlation::BallExclusion { radius } => {
                if r < radius {
                    -1.0
                } else {
                    0.0
                }
            }
            Correlation::Shell { r0, r1 } => {
                if r > r0 && r < r1 {
                    1.0
                } else {
                    0.0
                }
            }
            Correlation::Zero => 0.0,
        }
    }

    /// Compact support `[lo, hi]` of the irreducible part (hi = ∞ never
    /// occurs: both cases are bounded).
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Correlation::BallExclusion { radius } => (0.0, radius),
            Correlation::Shell { r0, r1 } => (r0, r1),
            Correlation::Zero => (0.0, 0.0),
        }
    }

    /// Closed-form static angular moment
    /// `M₂(k) = ∫ d³k'/(2π)³ h̃(|k'−k|) (k̂·k̂')² = h(0)/3 + 2∫ h(r) j₂(kr)/r dr`,
    /// using `∫_0^X j₂(x)/x dx = 1/3 − j₁(X)/X`.
    pub fn static_m2(&self, k: f64) -> f64 {
        match *self {
            Correlation::BallExclusion { radius } => {
                -1.0 + 2.0 * j1_over_x(k * radius)
            }
            Correlation::Shell { r0, r1 } => 2.0 * (j1_over_x(k * r0) - j1_over_x(k * r1)),
            Correlation::Zero => 0.0,
        }
    }

    /// Zeroth static moment `M₀ = ∫ d³k'/(2π)³ h̃(|k'−k|) = h(0)`.
    pub fn static_m0(&self) -> f64 {
        self.h_at_origin()
    }
}

/// `j₁(x)/x` with the series limit `1/3 − x²/30 + x⁴/840` for small x.
pub fn j1_over_x(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        1.0 / 3.0 - x2 / 30.0 + x2 * x2 / 840.0
    } else {
        (x.sin() / (x * x) - x.cos() / x) / x
    }
}

/// Spherical Bessel j0.
pub fn j0(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Spherical Bessel j2.
pub fn j2(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        let x2 = x * x;
        x2 / 15.0 * (1.0 - x2 / 14.0 + x2 * x2 / 504.0)
    } else {
        (3.0 / (x * x) - 1.0) * x.sin() / x - 3.0 * x.cos() / (x * x)
    }
}
