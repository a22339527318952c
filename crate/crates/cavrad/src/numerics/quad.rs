//! Adaptive Gauss–Kronrod quadrature for complex-valued integrands, with
//! integrable-singularity annotations, semi-infinite tails by truncation
//! doubling, and explicit PV + Sokhotski–Plemelj pole handling.

use super::{NumericsError, Result};
use crate::C64;
use std::collections::BinaryHeap;

/// 15-point Kronrod abscissae (positive half) with the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// Kind of an annotated singular point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularityKind {
    /// A simple pole; must be handled by [`integrate_with_pole`].
    SimplePole,
    /// Integrable (e.g. inverse square-root); handled by interval splitting
    /// plus an endpoint square-root substitution.
    Integrable,
}

/// Annotation of a singular abscissa of an integrand.
#[derive(Debug, Clone, Copy)]
pub struct Singularity {
    pub location: f64,
    pub kind: SingularityKind,
}

/// A complex-valued integrand of one real variable with singularity annotations.
pub struct Integrand1D<'a> {
    evaluator: &'a (dyn Fn(f64) -> C64 + Sync),
    singularities: Vec<Singularity>,
}

impl<'a> Integrand1D<'a> {
    pub fn new(evaluator: &'a (dyn Fn(f64) -> C64 + Sync)) -> Self {
        Self {
            evaluator,
            singularities: Vec::new(),
        }
    }

    pub fn with_singularities(
        evaluator: &'a (dyn Fn(f64) -> C64 + Sync),
        singularities: Vec<Singularity>,
    ) -> Self {
        Self {
            evaluator,
            singularities,
        }
    }

    fn eval(&self, x: f64) -> C64 {
        (self.evaluator)(x)
    }
}

/// Result of a quadrature: value, error bound, evaluation count.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureResult {
    pub value: C64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

impl QuadratureResult {
    fn checked(self) -> Self {
        debug_assert!(self.error_estimate >= 0.0);
        debug_assert!(self.evaluations >= 1);
        self
    }
}

/// Sokhotski–Plemelj sign prescription for [`integrate_with_pole`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoleShift {
    /// Outgoing-wave prescription; adds `-i pi residue_numerator`.
    PlusI0,
    /// Adds `+i pi residue_numerator`.
    MinusI0,
}

struct GkOutcome {
    value: C64,
    error: f64,
    singular_at: Option<f64>,
}

fn gk15<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> GkOutcome {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kron = C64::new(0.0, 0.0);
    let mut gauss = C64::new(0.0, 0.0);
    let mut res_abs = 0.0;
    let mut fv = [C64::new(0.0, 0.0); 15];
    for (j, &xi) in XGK.iter().enumerate() {
        let x1 = center - half * xi;
        let v1 = f(x1);
        if !v1.re.is_finite() || !v1.im.is_finite() {
            return GkOutcome {
                value: C64::new(f64::NAN, f64::NAN),
                error: f64::INFINITY,
                singular_at: Some(x1),
            };
        }
        fv[j] = v1;
        if xi != 0.0 {
            let x2 = center + half * xi;
            let v2 = f(x2);
            if !v2.re.is_finite() || !v2.im.is_finite() {
                return GkOutcome {
                    value: C64::new(f64::NAN, f64::NAN),
                    error: f64::INFINITY,
                    singular_at: Some(x2),
                };
            }
            fv[14 - j] = v2;
            kron += WGK[j] * (v1 + v2);
            res_abs += WGK[j] * (v1.norm() + v2.norm());
        } else {
            kron += WGK[j] * v1;
            res_abs += WGK[j] * v1.norm();
        }
    }
    // embedded Gauss rule uses the odd Kronrod abscissae
    for (jg, &wg) in WG.iter().enumerate() {
        let j = 2 * jg + 1;
        if j == 7 {
            gauss += wg * fv[7];
        } else {
            gauss += wg * (fv[j] + fv[14 - j]);
        }
    }
    let value = kron * half;
    let res_abs = res_abs * half.abs();
    let mean = kron * 0.5;
    let mut res_asc = 0.0;
    for v in &fv {
        res_asc += (v - mean).norm();
    }
    res_asc *= half.abs() * WGK[7]; // crude asc scale, standard rescale below
    let raw = ((kron - gauss) * half).norm();
    let mut err = raw;
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    GkOutcome {
        value,
        error: err,
        singular_at: None,
    }
}

struct Seg {
    a: f64,
    b: f64,
    value: C64,
    error: f64,
}

impl PartialEq for Seg {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Seg {}
impl PartialOrd for Seg {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Seg {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(std::cmp::Ordering::Equal)
    }
}

const MAX_SEGMENTS: usize = 4000;

fn adaptive_core<F: Fn(f64) -> C64>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_floor: f64,
) -> Result<QuadratureResult> {
    let mut evals = 0usize;
    let first = gk15(f, a, b);
    evals += 15;
    if let Some(x) = first.singular_at {
        return Err(NumericsError::SingularInterval { x });
    }
    let mut heap = BinaryHeap::new();
    let mut total = first.value;
    let mut total_err = first.error;
    heap.push(Seg {
        a,
        b,
        value: first.value,
        error: first.error,
    });
    let tol_of = |v: f64| (rel_tol * v).max(abs_floor).max(1e-300);
    while total_err > tol_of(total.norm()) && heap.len() < MAX_SEGMENTS {
        let worst = heap.pop().expect("heap nonempty");
        if worst.error <= f64::EPSILON * worst.value.norm() {
            // cannot improve further; put it back and stop
            total_err = heap.iter().map(|s| s.error).sum::<f64>() + worst.error;
            heap.push(worst);
            break;
        }
        let mid = 0.5 * (worst.a + worst.b);
        let width_floor = (b - a) * 2.0_f64.powi(-50);
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) < width_floor {
            // cannot (usefully) subdivide further; a stubborn large error
            // here means an unannotated singularity
            if worst.error > tol_of(total.norm()) / 10.0 {
                return Err(NumericsError::SingularInterval { x: mid });
            }
            heap.push(worst);
            break;
        }
        let left = gk15(f, worst.a, mid);
        let right = gk15(f, mid, worst.b);
        evals += 30;
        if let Some(x) = left.singular_at.or(right.singular_at) {
            return Err(NumericsError::SingularInterval { x });
        }
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(Seg {
            a: worst.a,
            b: mid,
            value: left.value,
            error: left.error,
        });
        heap.push(Seg {
            a: mid,
            b: worst.b,
            value: right.value,
            error: right.error,
        });
        if total_err <= tol_of(total.norm()) {
            break;
        }
    }
    // recompute the error sum to avoid drift
    let total_err: f64 = heap.iter().map(|s| s.error).sum();
    let result = QuadratureResult {
        value: total,
        error_estimate: total_err,
        evaluations: evals,
    }
    .checked();
    Ok(result)
}

/// Adaptive integration of `f` over the finite interval `[a, b]`.
///
/// Integrable-singularity annotations inside the interval cause a split so
/// that the singular points become endpoints; an annotated singular endpoint
/// is treated with the square-root substitution `x = endpoint ± t²`, which
/// regularizes inverse-square-root behavior. Simple-pole annotations inside
/// the interval are an error; use [`integrate_with_pole`].
pub fn integrate_adaptive(
    f: &Integrand1D,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> Result<QuadratureResult> {
    integrate_adaptive_floor(f, a, b, rel_tol, 0.0)
}

/// [`integrate_adaptive`] with an absolute error floor, for integrals whose
/// value is incidentally close to zero (oscillatory cancellation).
pub fn integrate_adaptive_floor(
    f: &Integrand1D,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_floor: f64,
) -> Result<QuadratureResult> {
    assert!(a < b, "integrate_adaptive requires a < b");
    for s in &f.singularities {
        if s.kind == SingularityKind::SimplePole && s.location > a + 1e-12 && s.location < b - 1e-12
        {
            return Err(NumericsError::PoleTooCloseToEndpoint {
                pole: s.location,
                distance: 0.0,
            });
        }
    }
    // collect interior integrable singular points, split there
    let mut cuts: Vec<f64> = f
        .singularities
        .iter()
        .filter(|s| s.kind == SingularityKind::Integrable && s.location > a && s.location < b)
        .map(|s| s.location)
        .collect();
    cuts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let mut edges = vec![a];
    edges.extend(cuts);
    edges.push(b);

    let mut value = C64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut evals = 0usize;
    let is_singular_at = |x: f64| {
        f.singularities
            .iter()
            .any(|s| s.kind == SingularityKind::Integrable && (s.location - x).abs() < 1e-12)
    };
    for win in edges.windows(2) {
        let (lo, hi) = (win[0], win[1]);
        let sub_tol = rel_tol / edges.len() as f64;
        let sub_floor = abs_floor / edges.len() as f64;
        let r = if is_singular_at(lo) {
            // x = lo + t^2, dx = 2t dt, t in [0, sqrt(hi-lo)]
            let g = |t: f64| f.eval(lo + t * t) * (2.0 * t);
            adaptive_core(&g, 0.0, (hi - lo).sqrt(), sub_tol, sub_floor)?
        } else if is_singular_at(hi) {
            let g = |t: f64| f.eval(hi - t * t) * (2.0 * t);
            adaptive_core(&g, 0.0, (hi - lo).sqrt(), sub_tol, sub_floor)?
        } else {
            adaptive_core(&|x| f.eval(x), lo, hi, sub_tol, sub_floor)?
        };
        value += r.value;
        err += r.error_estimate;
        evals += r.evaluations;
    }
    let tol = (rel_tol * value.norm()).max(abs_floor).max(1e-300);
    if err > tol * 10.0 && err > 1e-13 {
        return Err(NumericsError::NonConvergence {
            error: err,
            tol,
            evaluations: evals,
        });
    }
    Ok(QuadratureResult {
        value,
        error_estimate: err,
        evaluations: evals,
    }
    .checked())
}

/// Semi-infinite integration over `[a, ∞)` for integrands decaying like
/// `k^-tail_decay_order` with order > 1.
///
/// Integrates `[a, a + L]`, then doubles the truncation point; at each
/// doubling the remaining tail is extrapolated geometrically from the
/// declared decay order (consecutive doubling pieces of a pure power law
/// shrink by `2^{1-order}`). Iteration stops when the tail-corrected value
/// stabilizes below the tolerance; the last change enters the error bound.
pub fn integrate_semi_infinite(
    f: &Integrand1D,
    a: f64,
    tail_decay_order: f64,
    rel_tol: f64,
) -> Result<QuadratureResult> {
    integrate_semi_infinite_floor(f, a, tail_decay_order, rel_tol, 0.0)
}

/// [`integrate_semi_infinite`] with an absolute error floor; iteration stops
/// once the tail-corrected value stabilizes within `rel_tol` relative or
/// `abs_floor` absolute, whichever is looser.
pub fn integrate_semi_infinite_floor(
    f: &Integrand1D,
    a: f64,
    tail_decay_order: f64,
    rel_tol: f64,
    abs_floor: f64,
) -> Result<QuadratureResult> {
    assert!(tail_decay_order > 1.0, "tail must decay faster than 1/k");
    let span0 = if a.abs() > 1.0 { a.abs() } else { 1.0 };
    let mut hi = a + span0;
    let r = adaptive_core(&|x| f.eval(x), a, hi, rel_tol, abs_floor / 4.0)?;
    let mut partial = r.value;
    let mut err = r.error_estimate;
    let mut evals = r.evaluations;
    let mut last_piece = f64::INFINITY;
    let mut last_piece_err = 0.0_f64;
    let mut last_corrected: Option<C64> = None;
    let mut growths = 0usize;
    for _ in 0..48 {
        let next = a + (hi - a) * 2.0;
        let piece = adaptive_core(&|x| f.eval(x), hi, next, rel_tol, abs_floor / 4.0)?;
        partial += piece.value;
        err += piece.error_estimate;
        evals += piece.evaluations;
        let mag = piece.value.norm();
        // power-law extrapolation of the remaining tail: for f ~ k^{-p},
        // ∫_next^∞ = (piece over [hi, next]) / ((next/hi)^{p-1} - 1), exact
        // for pure power laws and a stabilizing estimate otherwise
        let q = (next / hi).powf(tail_decay_order - 1.0);
        let amplify = 1.0 / (q - 1.0);
        let tail = piece.value * amplify;
        let corrected = partial + tail;
        if let Some(prev) = last_corrected {
            let change = (corrected - prev).norm();
            // the change cannot be resolved below the (tail-amplified)
            // quadrature noise of the two pieces involved
            let noise = (1.0 + amplify) * (piece.error_estimate + last_piece_err);
            if change <= (rel_tol * corrected.norm()).max(abs_floor).max(1e-300) + noise {
                return Ok(QuadratureResult {
                    value: corrected,
                    error_estimate: err + change + noise,
                    evaluations: evals,
                }
                .checked());
            }
        }
        // oscillatory integrands produce transient growth of the doubling
        // pieces; only a sustained rise signals a non-decaying tail
        if mag > last_piece * 1.05 {
            growths += 1;
            if growths >= 3 {
                return Err(NumericsError::TailNotDecaying);
            }
        } else {
            growths = 0;
        }
        last_piece = mag;
        last_piece_err = piece.error_estimate;
        last_corrected = Some(corrected);
        hi = next;
    }
    Err(NumericsError::TailNotDecaying)
}

/// PV + Plemelj integration of `f_smooth(x) + residue_numerator / (pole - x)`
/// over `[a, b]` with `a < pole < b`.
///
/// The principal value of the rational part is `residue_numerator *
/// ln((pole - a)/(b - pole))`; the prescription adds the Sokhotski–Plemelj
/// delta term `∓ i π residue_numerator` (`PlusI0` gives `-iπ`, the
/// outgoing-wave choice used throughout the physics layer).
pub fn integrate_with_pole(
    f_smooth: &Integrand1D,
    pole: f64,
    residue_numerator: C64,
    a: f64,
    b: f64,
    prescription: PoleShift,
    rel_tol: f64,
) -> Result<QuadratureResult> {
    integrate_with_pole_floor(
        f_smooth,
        pole,
        residue_numerator,
        a,
        b,
        prescription,
        rel_tol,
        0.0,
    )
}

/// [`integrate_with_pole`] with an absolute error floor for the smooth part.
#[allow(clippy::too_many_arguments)]
pub fn integrate_with_pole_floor(
    f_smooth: &Integrand1D,
    pole: f64,
    residue_numerator: C64,
    a: f64,
    b: f64,
    prescription: PoleShift,
    rel_tol: f64,
    abs_floor: f64,
) -> Result<QuadratureResult> {
    assert!(a < b);
    let dist = (pole - a).min(b - pole);
    if dist <= 1e-12 * (b - a).abs() {
        return Err(NumericsError::PoleTooCloseToEndpoint {
            pole,
            distance: dist,
        });
    }
    let mut r = integrate_adaptive_floor(f_smooth, a, b, rel_tol, abs_floor)?;
    let pv_log = residue_numerator * ((pole - a) / (b - pole)).ln();
    let delta = match prescription {
        PoleShift::PlusI0 => -C64::i() * std::f64::consts::PI * residue_numerator,
        PoleShift::MinusI0 => C64::i() * std::f64::consts::PI * residue_numerator,
    };
    r.value += pv_log + delta;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn polynomial_exactness() {
        let f = |x: f64| c(x * x, 0.0);
        let g = Integrand1D::new(&f);
        let r = integrate_adaptive(&g, 0.0, 1.0, 1e-10).unwrap();
        assert_relative_eq!(r.value.re, 1.0 / 3.0, max_relative = 1e-10);
        assert!(r.value.im.abs() < 1e-14);
    }

    #[test]
    fn complex_exponential() {
        // int_0^pi e^{ix} dx = 2i
        let f = |x: f64| C64::new(0.0, x).exp();
        let g = Integrand1D::new(&f);
        let r = integrate_adaptive(&g, 0.0, std::f64::consts::PI, 1e-12).unwrap();
        assert!(r.value.re.abs() < 1e-12);
        assert_relative_eq!(r.value.im, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn inverse_sqrt_with_annotation() {
        // int_0^1 x^{-1/2} dx = 2, oracle: antiderivative 2 sqrt(x)
        let f = |x: f64| c(1.0 / x.sqrt(), 0.0);
        let g = Integrand1D::with_singularities(
            &f,
            vec![Singularity {
                location: 0.0,
                kind: SingularityKind::Integrable,
            }],
        );
        let r = integrate_adaptive(&g, 0.0, 1.0, 1e-10).unwrap();
        assert_relative_eq!(r.value.re, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn unannotated_singularity_detected() {
        let f = |x: f64| c(1.0 / x, 0.0);
        let g = Integrand1D::new(&f);
        // 1/x blows up at the left endpoint; GK abscissae approach it
        let r = integrate_adaptive(&g, 0.0, 1.0, 1e-10);
        assert!(matches!(
            r,
            Err(NumericsError::NonConvergence { .. }) | Err(NumericsError::SingularInterval { .. })
        ));
    }

    #[test]
    fn semi_infinite_lorentzian() {
        // int_0^inf dk/(1+k^2) = pi/2
        let f = |k: f64| c(1.0 / (1.0 + k * k), 0.0);
        let g = Integrand1D::new(&f);
        let r = integrate_semi_infinite(&g, 0.0, 2.0, 1e-10).unwrap();
        assert_relative_eq!(r.value.re, std::f64::consts::FRAC_PI_2, max_relative = 1e-9);
    }

    #[test]
    fn semi_infinite_rational() {
        // int_0^inf k^2/(1+k^2)^3 dk = pi/16 (symbolic oracle)
        let f = |k: f64| c(k * k / (1.0 + k * k).powi(3), 0.0);
        let g = Integrand1D::new(&f);
        let r = integrate_semi_infinite(&g, 0.0, 4.0, 1e-10).unwrap();
        assert_relative_eq!(r.value.re, std::f64::consts::PI / 16.0, max_relative = 1e-9);
    }

    #[test]
    fn semi_infinite_slow_power_law() {
        // int_1^inf k^{-1.01} dk = 100
        let f = |k: f64| c(k.powf(-1.01), 0.0);
        let g = Integrand1D::new(&f);
        let r = integrate_semi_infinite(&g, 1.0, 1.01, 1e-10);
        // extremely slow decay: doubling converges, just slowly; accept
        // either convergence to 100 or a TailNotDecaying signal is NOT ok.
        let r = r.unwrap();
        assert_relative_eq!(r.value.re, 100.0, max_relative = 1e-6);
    }

    #[test]
    fn pole_symmetric_interval() {
        // f_smooth = 0, residue 1, pole 0 on [-1,1], +i0 -> -i pi
        let zero = |_x: f64| c(0.0, 0.0);
        let g = Integrand1D::new(&zero);
        let r =
            integrate_with_pole(&g, 0.0, c(1.0, 0.0), -1.0, 1.0, PoleShift::PlusI0, 1e-12).unwrap();
        assert!(r.value.re.abs() < 1e-12);
        assert_relative_eq!(r.value.im, -std::f64::consts::PI, max_relative = 1e-12);
    }

    #[test]
    fn pole_symmetric_about_half() {
        let zero = |_x: f64| c(0.0, 0.0);
        let g = Integrand1D::new(&zero);
        let r =
            integrate_with_pole(&g, 0.5, c(1.0, 0.0), 0.0, 1.0, PoleShift::PlusI0, 1e-12).unwrap();
        assert!(r.value.re.abs() < 1e-12);
        assert_relative_eq!(r.value.im, -std::f64::consts::PI, max_relative = 1e-12);
    }

    #[test]
    fn plemelj_consistency() {
        // (+i0) minus (-i0) = -2 i pi residue, PV parts cancel
        let smooth = |x: f64| c(x.cos(), 0.3 * x);
        let g1 = Integrand1D::new(&smooth);
        let g2 = Integrand1D::new(&smooth);
        let res = c(0.7, -0.2);
        let plus = integrate_with_pole(&g1, 0.4, res, 0.0, 1.0, PoleShift::PlusI0, 1e-12).unwrap();
        let minus =
            integrate_with_pole(&g2, 0.4, res, 0.0, 1.0, PoleShift::MinusI0, 1e-12).unwrap();
        let diff = plus.value - minus.value;
        let expect = -C64::i() * 2.0 * std::f64::consts::PI * res;
        assert!((diff - expect).norm() < 1e-12);
    }

    #[test]
    fn radial_im_integral_of_free_transverse() {
        // (1/2pi^2) int_0^inf k^2 Im{1/(kt^2-k^2+i0)} dk = -kt/(4pi), kt = 1.
        // Residue-calculus oracle: Im{1/(kt^2-k^2+i0)} = -pi delta(kt^2-k^2).
        let kt = 1.0_f64;
        // full integrand n(k)/(kt^2-k^2), n(k) = k^2/(2 pi^2);
        // smooth part after extracting n(kt)/(2kt)/(kt - k):
        let n = |k: f64| k * k / (2.0 * std::f64::consts::PI * std::f64::consts::PI);
        let res = n(kt) / (2.0 * kt);
        let smooth = move |k: f64| {
            if (k - kt).abs() < 1e-8 {
                // limit of [n(k)/(kt+k) - n(kt)/(2kt)] / (kt - k)
                let d = 1e-5;
                let v1 = (n(kt + d) / (2.0 * kt + d) - res) / (-d);
                let v2 = (n(kt - d) / (2.0 * kt - d) - res) / d;
                c(0.5 * (v1 + v2), 0.0)
            } else {
                c((n(k) / (kt + k) - res) / (kt - k), 0.0)
            }
        };
        let g = Integrand1D::new(&smooth);
        let near = integrate_with_pole(&g, kt, c(res, 0.0), 0.0, 2.0, PoleShift::PlusI0, 1e-10)
            .unwrap();
        // tail beyond 2kt: full integrand, no pole
        let tail_f = move |k: f64| c(n(k) / (kt * kt - k * k), 0.0);
        let tg = Integrand1D::new(&tail_f);
        let tail = integrate_adaptive(&tg, 2.0, 4000.0, 1e-10).unwrap();
        let total_im = near.value.im + tail.value.im;
        assert_relative_eq!(
            total_im,
            -kt / (4.0 * std::f64::consts::PI),
            max_relative = 1e-8
        );
    }
}
