//! Cavity factors C⊥(k), C∥(k): convolutions of a cavity correlation with
//! the free dyadic propagator, computed by two independent routes.
//!
//! k-space route: the angular convolution
//! `C⊥(k) = ½ ∫ d³k'/(2π)³ h̃(|k'−k|)[(1+cos²θ)G⊥(k') + sin²θ G∥]`,
//! `C∥(k) = ∫ d³k'/(2π)³ h̃(|k'−k|)[cos²θ G∥ + sin²θ G⊥(k')]`,
//! with the azimuthal integral analytic, the θ integral by fixed-order
//! Gauss–Legendre, the k'=k̃ pole by PV + Plemelj, and the constant-G∥
//! pieces evaluated through the closed-form static moments M₀, M₂ (the
//! k-space form of those pieces converges only in the improper sense).
//!
//! Real-space route: `C(k) = ∫ d³r e^{ik·r} h(r) Tr{Ḡ⁽⁰⁾(r) P̂}` reduced to
//! radial integrals over j₀/j₂ kernels plus the explicit delta term.
//! Agreement of the two routes pins the Fourier bookkeeping.

use crate::correlations::{j0, j2, Correlation};
use crate::numerics::{
    gauss_legendre, integrate_adaptive_floor, integrate_semi_infinite_floor,
    integrate_with_pole_floor, CubicSpline, Integrand1D, NumericsError, PoleShift,
};
use crate::propagators::{delta_iso_coeff, free_longitudinal, WaveContext};
use crate::C64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::io::{BufRead, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CavityFactorError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("table grid too coarse: leave-one-out relative error {err:.3e} exceeds {tol:.3e}")]
    GridTooCoarse { err: f64, tol: f64 },
    #[error("table io: {0}")]
    Io(#[from] std::io::Error),
    #[error("table parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Default Gauss–Legendre order for the θ integral.
pub const DEFAULT_THETA_ORDER: usize = 64;

/// Angular moments of the correlation around the external wavevector:
/// `A⊥ = ½∫(1+μ²)h̃ dμ`, `B∥ = ∫(1−μ²)h̃ dμ` (the G⊥-weighted kernels).
fn wave_moments(corr: &Correlation, k: f64, kp: f64, order: usize) -> (f64, f64) {
    let rule = gauss_legendre(order);
    let mut m0 = 0.0;
    let mut m2 = 0.0;
    for (&mu, &w) in rule.0.iter().zip(rule.1.iter()) {
        let q2 = (k * k + kp * kp - 2.0 * k * kp * mu).max(0.0);
        let h = corr.ft(q2.sqrt());
        m0 += w * h;
        m2 += w * h * mu * mu;
    }
    (0.5 * (m0 + m2), m0 - m2)
}

/// Static (constant-G∥) parts of the factors via the closed-form moments.
fn static_parts(corr: &Correlation, k: f64, ctx: &WaveContext) -> (C64, C64) {
    let gpar = free_longitudinal(k, ctx);
    let m0 = corr.static_m0();
    let m2 = corr.static_m2(k);
    (0.5 * gpar * (m0 - m2), gpar * m2)
}

/// Wave (G⊥-weighted) parts by PV + Plemelj quadrature over k'.
///
/// This is the genuine k-space convolution. Its tail decays only through
/// oscillatory boundary terms (~1/K²), so the achievable accuracy is set by
/// the absolute floor derived from `rel_tol` and the factor scale; the
/// production tables use the real-space wave parts instead.
fn wave_parts_kspace(
    corr: &Correlation,
    k: f64,
    ctx: &WaveContext,
    theta_order: usize,
    rel_tol: f64,
) -> Result<(C64, C64), CavityFactorError> {
    let kt = ctx.k_tilde;
    let pref = 1.0 / (4.0 * PI * PI);
    // physical scale of the factors: volume of the correlation hole over kt^2
    let (lo, hi) = corr.support();
    let scale = (4.0 * PI / 3.0) * (hi.powi(3) - lo.powi(3)).abs().max(hi.powi(3))
        * kt
        / (2.0 * PI * PI)
        / (kt * kt)
        + 1e-300;
    let mut out = [C64::new(0.0, 0.0); 2];
    for (idx, slot) in out.iter_mut().enumerate() {
        let weight = move |kp: f64| {
            let (a_perp, b_par) = wave_moments(corr, k, kp, theta_order);
            if idx == 0 {
                a_perp
            } else {
                b_par
            }
        };
        // full integrand: pref * kp^2 * W(kp) / (kt^2 - kp^2)
        let n = move |kp: f64| pref * kp * kp * weight(kp);
        let res = n(kt) / (2.0 * kt);
        // smooth remainder of n(kp)/(kt^2-kp^2) - res/(kt-kp)
        let smooth = move |kp: f64| {
            if (kp - kt).abs() < 1e-7 * kt {
                let d = 1e-5 * kt;
                let vp = (n(kt + d) / (kt + d + kt) - res) / (-d);
                let vm = (n(kt - d) / (kt - d + kt) - res) / d;
                C64::new(0.5 * (vp + vm), 0.0)
            } else {
                C64::new((n(kp) / (kt + kp) - res) / (kt - kp), 0.0)
            }
        };
        let abs_floor = rel_tol * scale;
        let g = Integrand1D::new(&smooth);
        let near = integrate_with_pole_floor(
            &g,
            kt,
            C64::new(res, 0.0),
            0.0,
            2.0 * kt,
            PoleShift::PlusI0,
            rel_tol,
            abs_floor,
        )?;
        // beyond the pole window the full integrand decays like 1/kp^2
        let far_f = move |kp: f64| C64::new(n(kp) / (kt * kt - kp * kp), 0.0);
        let gf = Integrand1D::new(&far_f);
        let far = integrate_semi_infinite_floor(
            &gf,
            2.0 * kt,
            2.0,
            rel_tol,
            abs_floor.max(rel_tol * near.value.norm()),
        )?;
        *slot = near.value + far.value;
    }
    Ok((out[0], out[1]))
}

/// k-space route: full cavity factors (static closed-form + wave quadrature).
pub fn cavity_factor_kspace(
    k: f64,
    corr: &Correlation,
    ctx: &WaveContext,
    rel_tol: f64,
) -> Result<(C64, C64), CavityFactorError> {
    if matches!(corr, Correlation::Zero) {
        return Ok((C64::new(0.0, 0.0), C64::new(0.0, 0.0)));
    }
    let (sp, sl) = static_parts(corr, k, ctx);
    let (wp, wl) = wave_parts_kspace(corr, k, ctx, DEFAULT_THETA_ORDER, rel_tol)?;
    Ok((sp + wp, sl + wl))
}

/// Real-space route: radial integral of the trace kernels over the compact
/// correlation support plus the explicit delta term `h(0)/(3k̃²)`.
///
/// The 1/r³ near fields of the iso and radial dyadic parts cancel inside the
/// angular-reduced kernels; the cancellation is done analytically here
/// (`P = e^{ik̃r}/(4πk̃²r³)` factored out) so the integrand stays stable at
/// small r.
pub fn cavity_factor_realspace(
    k: f64,
    corr: &Correlation,
    ctx: &WaveContext,
    rel_tol: f64,
) -> Result<(C64, C64), CavityFactorError> {
    if matches!(corr, Correlation::Zero) {
        return Ok((C64::new(0.0, 0.0), C64::new(0.0, 0.0)));
    }
    let kt = ctx.k_tilde;
    let (lo, hi) = corr.support();
    let hval = match corr {
        Correlation::BallExclusion { .. } => -1.0,
        Correlation::Shell { .. } => 1.0,
        Correlation::Zero => 0.0,
    };
    let kernel = move |r: f64, par: bool| -> C64 {
        let x = kt * r;
        let e = C64::new(0.0, x).exp();
        let p = e / (4.0 * PI * kt * kt * r * r * r);
        // a_rest = a_EM + P, b_rest = b_EM - 3P (regular near-field remainders)
        let base = e / (4.0 * PI * r);
        let a_rest = base * C64::new(1.0, 1.0 / x);
        let b_rest = base * C64::new(-1.0, -3.0 / x);
        let j0v = j0(k * r);
        let j2v = j2(k * r);
        // A' = P - a_rest ; B' = -3P - b_rest (components of -G_EM)
        if !par {
            4.0 * PI * (-p * j2v - a_rest * j0v - (b_rest / 3.0) * (j0v + j2v))
        } else {
            4.0 * PI * (2.0 * p * j2v - a_rest * j0v - (b_rest / 3.0) * (j0v - 2.0 * j2v))
        }
    };
    let scale = hi.max(1e-300) / (kt * kt) / (4.0 * PI);
    let mut vals = [C64::new(0.0, 0.0); 2];
    for (idx, slot) in vals.iter_mut().enumerate() {
        let f = move |r: f64| kernel(r, idx == 1) * (r * r * hval);
        let g = Integrand1D::new(&f);
        let r = integrate_adaptive_floor(&g, lo.max(1e-12 * hi), hi, rel_tol, rel_tol * scale)?;
        *slot = r.value;
    }
    let delta = corr.h_at_origin() * delta_iso_coeff(ctx);
    Ok((vals[0] + delta, vals[1] + delta))
}

/// Grid layout for a [`CavityFactorTable`].
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    /// Points on the dense interval [0, 4k̃].
    pub dense_points: usize,
    /// Minimum number of tail points on [4k̃, k_max].
    pub tail_points: usize,
    /// Upper grid edge in units of k̃ (spec floor: 40).
    pub k_max_over_kt: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            dense_points: 48,
            tail_points: 24,
            k_max_over_kt: 40.0,
        }
    }
}

/// Precomputed cavity factors on a graded grid with spline interpolation of
/// the smooth wave parts; the oscillatory static parts are added in closed
/// form at evaluation time, so the spline never sees spherical-Bessel
/// oscillations.
#[derive(Debug, Clone)]
pub struct CavityFactorTable {
    pub corr: Correlation,
    pub kt: f64,
    grid: Vec<f64>,
    c_perp: Vec<C64>,
    c_par: Vec<C64>,
    wave_perp: CubicSpline,
    wave_par: CubicSpline,
}

impl CavityFactorTable {
    /// Build a table for the correlation; parallel across grid points.
    pub fn build(
        corr: Correlation,
        ctx: &WaveContext,
        spec: GridSpec,
        rel_tol: f64,
    ) -> Result<Self, CavityFactorError> {
        let kt = ctx.k_tilde;
        let grid = make_grid(&corr, kt, spec);
        let points: Vec<Result<(C64, C64), CavityFactorError>> = grid
            .par_iter()
            .map(|&k| {
                let (tp, tl) = cavity_factor_realspace(k, &corr, ctx, rel_tol)?;
                let (sp, sl) = static_parts(&corr, k, ctx);
                Ok((tp - sp, tl - sl))
            })
            .collect();
        let mut wp = Vec::with_capacity(grid.len());
        let mut wl = Vec::with_capacity(grid.len());
        for p in points {
            let (a, b) = p?;
            wp.push(a);
            wl.push(b);
        }
        let wave_perp = CubicSpline::new(grid.clone(), wp.clone());
        let wave_par = CubicSpline::new(grid.clone(), wl.clone());
        let mut c_perp = Vec::with_capacity(grid.len());
        let mut c_par = Vec::with_capacity(grid.len());
        for (i, &k) in grid.iter().enumerate() {
            let (sp, sl) = static_parts(&corr, k, ctx);
            c_perp.push(sp + wp[i]);
            c_par.push(sl + wl[i]);
        }
        let table = Self {
            corr,
            kt,
            grid,
            c_perp,
            c_par,
            wave_perp,
            wave_par,
        };
        let err = table
            .wave_perp
            .leave_one_out_max_rel_error()
            .max(table.wave_par.leave_one_out_max_rel_error());
        if err > 1e-6 {
            return Err(CavityFactorError::GridTooCoarse { err, tol: 1e-6 });
        }
        Ok(table)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn k_max(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    pub fn c_perp_points(&self) -> &[C64] {
        &self.c_perp
    }

    pub fn c_par_points(&self) -> &[C64] {
        &self.c_par
    }

    /// Interpolated total factors at k (static closed form + wave spline).
    pub fn eval(&self, k: f64, ctx: &WaveContext) -> (C64, C64) {
        let (sp, sl) = static_parts(&self.corr, k, ctx);
        (sp + self.wave_perp.eval(k), sl + self.wave_par.eval(k))
    }

    /// Interpolated wave (non-static) parts only.
    pub fn eval_wave(&self, k: f64) -> (C64, C64) {
        (self.wave_perp.eval(k), self.wave_par.eval(k))
    }

    /// Dump as CSV (k, Re C⊥, Im C⊥, Re C∥, Im C∥).
    pub fn dump_csv<W: Write>(&self, mut w: W) -> Result<(), CavityFactorError> {
        writeln!(w, "k,re_c_perp,im_c_perp,re_c_par,im_c_par")?;
        for (i, &k) in self.grid.iter().enumerate() {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                k, self.c_perp[i].re, self.c_perp[i].im, self.c_par[i].re, self.c_par[i].im
            )?;
        }
        Ok(())
    }

    /// Load grid and totals from CSV written by [`Self::dump_csv`]; wave
    /// splines are reconstructed by subtracting the static parts.
    pub fn load_csv<R: BufRead>(
        r: R,
        corr: Correlation,
        ctx: &WaveContext,
    ) -> Result<Self, CavityFactorError> {
        let mut grid = Vec::new();
        let mut c_perp = Vec::new();
        let mut c_par = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            if lineno == 0 || line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 5 {
                return Err(CavityFactorError::Parse {
                    line: lineno + 1,
                    msg: format!("expected 5 columns, got {}", cols.len()),
                });
            }
            let nums: Result<Vec<f64>, _> = cols.iter().map(|s| s.trim().parse()).collect();
            let nums = nums.map_err(|e| CavityFactorError::Parse {
                line: lineno + 1,
                msg: format!("{e}"),
            })?;
            grid.push(nums[0]);
            c_perp.push(C64::new(nums[1], nums[2]));
            c_par.push(C64::new(nums[3], nums[4]));
        }
        let mut wp = Vec::with_capacity(grid.len());
        let mut wl = Vec::with_capacity(grid.len());
        for (i, &k) in grid.iter().enumerate() {
            let (sp, sl) = static_parts(&corr, k, ctx);
            wp.push(c_perp[i] - sp);
            wl.push(c_par[i] - sl);
        }
        Ok(Self {
            corr,
            kt: ctx.k_tilde,
            wave_perp: CubicSpline::new(grid.clone(), wp),
            wave_par: CubicSpline::new(grid.clone(), wl),
            grid,
            c_perp,
            c_par,
        })
    }
}

fn make_grid(corr: &Correlation, kt: f64, spec: GridSpec) -> Vec<f64> {
    let k_max = spec.k_max_over_kt.max(40.0) * kt;
    let split = 4.0 * kt;
    let mut grid = Vec::new();
    for i in 0..spec.dense_points {
        grid.push(split * i as f64 / spec.dense_points as f64);
    }
    // tail spacing must resolve the residual oscillation of the wave parts
    // (period ~ 2π/R_outer in k); the static parts are exact so only the
    // smooth 1/k² envelope times that oscillation needs sampling. A short
    // geometric ramp smooths the junction with the dense region.
    let (_, r_outer) = corr.support();
    let max_step = if r_outer > 0.0 {
        ((2.0 * PI / r_outer) / 64.0).min((k_max - split) / spec.tail_points as f64)
    } else {
        (k_max - split) / spec.tail_points as f64
    };
    let dense_step = split / spec.dense_points as f64;
    let mut k = split;
    let mut step = dense_step.min(max_step);
    while k < k_max - 1e-9 * kt {
        grid.push(k);
        k += step;
        step = (step * 1.3).min(max_step);
    }
    grid.push(k_max);
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * kt);
    grid
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ctx() -> WaveContext {
        WaveContext::new(1.0, 1.0, 1.0)
    }

    #[test]
    fn zero_correlation_gives_zero() {
        let c = ctx();
        let (p, l) = cavity_factor_kspace(0.7, &Correlation::Zero, &c, 1e-9).unwrap();
        assert_eq!(p, C64::new(0.0, 0.0));
        assert_eq!(l, C64::new(0.0, 0.0));
    }

    #[test]
    fn isotropy_at_k_zero() {
        // at k = 0 there is no preferred axis: C_perp(0) = C_par(0)
        let c = ctx();
        let corr = Correlation::Shell { r0: 0.3, r1: 0.7 };
        let (p, l) = cavity_factor_realspace(1e-9, &corr, &c, 1e-11).unwrap();
        assert!((p - l).norm() < 1e-9, "perp {p} vs par {l}");
    }

    #[test]
    fn dual_route_shell() {
        let c = ctx();
        let corr = Correlation::Shell { r0: 0.3, r1: 0.7 };
        for k in [1e-9, 0.6, 1.7] {
            let (kp, kl) = cavity_factor_kspace(k, &corr, &c, 1e-7).unwrap();
            let (rp, rl) = cavity_factor_realspace(k, &corr, &c, 1e-11).unwrap();
            assert!(
                (kp - rp).norm() / rp.norm() < 1e-6,
                "perp k={k}: {kp} vs {rp}"
            );
            assert!(
                (kl - rl).norm() / rl.norm() < 1e-6,
                "par k={k}: {kl} vs {rl}"
            );
        }
    }

    #[test]
    fn dual_route_ball() {
        // the ball case exercises the delta term and the integrable
        // near-field region of the real-space route
        let c = ctx();
        let corr = Correlation::BallExclusion { radius: 0.3 };
        for k in [1e-9, 1.0, 2.3] {
            let (kp, kl) = cavity_factor_kspace(k, &corr, &c, 1e-7).unwrap();
            let (rp, rl) = cavity_factor_realspace(k, &corr, &c, 1e-11).unwrap();
            assert!(
                (kp - rp).norm() / rp.norm() < 1e-6,
                "perp k={k}: {kp} vs {rp}"
            );
            assert!(
                (kl - rl).norm() / rl.norm() < 1e-6,
                "par k={k}: {kl} vs {rl}"
            );
        }
    }

    #[test]
    fn shell_linearity() {
        // shell factor = ball(R0) factor - ball(R1) factor
        let c = ctx();
        let shell = Correlation::Shell { r0: 0.2, r1: 0.5 };
        let b0 = Correlation::BallExclusion { radius: 0.2 };
        let b1 = Correlation::BallExclusion { radius: 0.5 };
        for k in [0.4, 1.3] {
            let (sp, sl) = cavity_factor_realspace(k, &shell, &c, 1e-11).unwrap();
            let (p0, l0) = cavity_factor_realspace(k, &b0, &c, 1e-11).unwrap();
            let (p1, l1) = cavity_factor_realspace(k, &b1, &c, 1e-11).unwrap();
            assert!((sp - (p0 - p1)).norm() < 1e-9);
            assert!((sl - (l0 - l1)).norm() < 1e-9);
        }
    }

    #[test]
    fn point_limit_is_delta_term() {
        // R -> 0: both factors approach h(0)/(3 kt^2) = -1/(3 kt^2)
        let c = ctx();
        let corr = Correlation::BallExclusion { radius: 1e-3 };
        let (p, l) = cavity_factor_realspace(1.0, &corr, &c, 1e-11).unwrap();
        let expect = -1.0 / 3.0;
        assert_relative_eq!(p.re, expect, max_relative = 1e-4);
        assert_relative_eq!(l.re, expect, max_relative = 1e-4);
        assert!(p.im.abs() < 1e-6);
    }

    #[test]
    fn table_matches_direct_and_interpolates() {
        let c = ctx();
        let corr = Correlation::Shell { r0: 0.1, r1: 0.3 };
        let table = CavityFactorTable::build(corr, &c, GridSpec::default(), 1e-10).unwrap();
        // grid-point equality with the building route (same code path) and
        // route-level agreement with the independent k-space convolution
        let k = table.grid()[17];
        let same = cavity_factor_realspace(k, &corr, &c, 1e-10).unwrap();
        let at = table.eval(k, &c);
        assert!((same.0 - at.0).norm() < 1e-12);
        assert!((same.1 - at.1).norm() < 1e-12);
        let kw = cavity_factor_kspace(k, &corr, &c, 1e-7).unwrap();
        assert!((kw.0 - at.0).norm() / at.0.norm() < 1e-6);
        assert!((kw.1 - at.1).norm() / at.1.norm() < 1e-6);
        // off-grid interpolation against the real-space oracle
        let koff = 0.5 * (table.grid()[20] + table.grid()[21]);
        let (rp, rl) = cavity_factor_realspace(koff, &corr, &c, 1e-11).unwrap();
        let (ip, il) = table.eval(koff, &c);
        assert!((ip - rp).norm() / rp.norm() < 1e-6);
        assert!((il - rl).norm() / rl.norm() < 1e-6);
    }

    #[test]
    fn table_csv_round_trip() {
        let c = ctx();
        let corr = Correlation::BallExclusion { radius: 0.3 };
        let table = CavityFactorTable::build(corr, &c, GridSpec::default(), 1e-9).unwrap();
        let mut buf = Vec::new();
        table.dump_csv(&mut buf).unwrap();
        let loaded = CavityFactorTable::load_csv(std::io::BufReader::new(buf.as_slice()), corr, &c)
            .unwrap();
        for &k in &[0.35, 1.0, 7.7] {
            let a = table.eval(k, &c);
            let b = loaded.eval(k, &c);
            assert!((a.0 - b.0).norm() < 1e-12);
            assert!((a.1 - b.1).norm() < 1e-12);
        }
    }
}
