//! Sine and cosine integrals, and the oscillatory tail integrals
//! `∫_K^∞ cos(c k)/k^n dk`, `∫_K^∞ sin(c k)/k^n dk` built on them.
//!
//! Si/Ci are computed from the exponential integral E1(ix): the Maclaurin
//! series for small arguments and a modified Lentz continued fraction for
//! large ones, giving close to machine precision over the whole range.

use crate::C64;
use std::f64::consts::FRAC_PI_2;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Exponential integral E1(z) for Re z >= 0, z != 0.
fn e1_complex(z: C64) -> C64 {
    if z.norm() < 4.0 {
        // E1(z) = -gamma - ln z + sum_{n>=1} (-1)^{n+1} z^n / (n n!)
        let mut sum = C64::new(0.0, 0.0);
        let mut term = C64::new(1.0, 0.0);
        for n in 1..=160 {
            term *= -z / n as f64;
            let add = -term / n as f64;
            sum += add;
            if add.norm() < 1e-18 * sum.norm().max(1e-30) {
                break;
            }
        }
        -EULER_GAMMA - z.ln() + sum
    } else {
        // E1(z) = e^{-z} * 1/(z + 1 - 1/(z + 3 - 4/(z + 5 - 9/(z + 7 - ...))))
        // i.e. b_j = z + (2j - 1), a_1 = 1, a_{j+1} = -j^2 (modified Lentz,
        // b_0 = 0 so f_0 = C_0 = tiny, D_0 = 0)
        let tiny = C64::new(1e-150, 0.0);
        let mut f = tiny;
        let mut c = tiny;
        let mut d = C64::new(0.0, 0.0);
        for j in 1..500 {
            let a = if j == 1 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(-(((j - 1) * (j - 1)) as f64), 0.0)
            };
            let b = z + (2 * j - 1) as f64;
            d = b + a * d;
            if d.norm() < 1e-150 {
                d = tiny;
            }
            c = b + a / c;
            if c.norm() < 1e-150 {
                c = tiny;
            }
            d = d.inv();
            let delta = c * d;
            f *= delta;
            if (delta - C64::new(1.0, 0.0)).norm() < 1e-16 {
                break;
            }
        }
        (-z).exp() * f
    }
}

/// Sine and cosine integrals (Si(x), Ci(x)) for x > 0.
///
/// Uses Ci(x) = -Re E1(ix), Si(x) = pi/2 + Im E1(ix).
pub fn si_ci(x: f64) -> (f64, f64) {
    assert!(x > 0.0, "si_ci requires x > 0");
    let e1 = e1_complex(C64::new(0.0, x));
    let ci = -e1.re;
    let si = FRAC_PI_2 + e1.im;
    (si, ci)
}

/// `∫_K^∞ cos(c k) / k^n dk` for n >= 1, c >= 0, K > 0.
pub fn cos_tail(c: f64, n: u32, k0: f64) -> f64 {
    assert!(k0 > 0.0 && n >= 1);
    if c == 0.0 {
        assert!(n >= 2, "c = 0 needs n >= 2 for convergence");
        return 1.0 / ((n as f64 - 1.0) * k0.powi(n as i32 - 1));
    }
    if n == 1 {
        let (_si, ci) = si_ci(c * k0);
        return -ci;
    }
    // by parts: int cos/k^n = cos(cK)/((n-1)K^{n-1}) - c/(n-1) int sin/k^{n-1}
    let m = n as f64 - 1.0;
    (c * k0).cos() / (m * k0.powi(n as i32 - 1)) - (c / m) * sin_tail(c, n - 1, k0)
}

/// `∫_K^∞ sin(c k) / k^n dk` for n >= 1, c >= 0, K > 0.
pub fn sin_tail(c: f64, n: u32, k0: f64) -> f64 {
    assert!(k0 > 0.0 && n >= 1);
    if c == 0.0 {
        return 0.0;
    }
    if n == 1 {
        let (si, _ci) = si_ci(c * k0);
        return FRAC_PI_2 - si;
    }
    let m = n as f64 - 1.0;
    (c * k0).sin() / (m * k0.powi(n as i32 - 1)) + (c / m) * cos_tail(c, n - 1, k0)
}
