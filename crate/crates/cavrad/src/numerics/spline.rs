//! Not-a-knot cubic spline for complex samples on a strictly increasing grid.

use crate::C64;

/// Cubic spline through complex samples; real and imaginary parts share the
/// knot vector and are interpolated with not-a-knot end conditions.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<C64>,
    // second derivatives at the knots
    m: Vec<C64>,
}

impl CubicSpline {
    pub fn new(x: Vec<f64>, y: Vec<C64>) -> Self {
        assert!(x.len() == y.len() && x.len() >= 4, "need at least 4 points");
        for w in x.windows(2) {
            assert!(w[1] > w[0], "grid must be strictly increasing");
        }
        let m = second_derivatives(&x, &y);
        Self { x, y, m }
    }

    pub fn grid(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[C64] {
        &self.y
    }

    /// Evaluate at `t`; clamps to the grid range (callers keep t in range).
    pub fn eval(&self, t: f64) -> C64 {
        let n = self.x.len();
        let t = t.clamp(self.x[0], self.x[n - 1]);
        let i = match self.x.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        };
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * (h * h) / 6.0
    }

    /// Maximum relative interpolation error from a leave-one-out pass over
    /// the interior knots (each interior sample predicted from the others).
    pub fn leave_one_out_max_rel_error(&self) -> f64 {
        let n = self.x.len();
        let mut worst = 0.0_f64;
        let scale = self
            .y
            .iter()
            .map(|v| v.norm())
            .fold(0.0_f64, f64::max)
            .max(1e-300);
        for skip in 1..n - 1 {
            let xs: Vec<f64> = (0..n).filter(|&j| j != skip).map(|j| self.x[j]).collect();
            let ys: Vec<C64> = (0..n).filter(|&j| j != skip).map(|j| self.y[j]).collect();
            if xs.len() < 4 {
                break;
            }
            let s = CubicSpline::new(xs, ys);
            let err = (s.eval(self.x[skip]) - self.y[skip]).norm() / scale;
            worst = worst.max(err);
        }
        worst
    }
}

/// Second derivatives m_i for the not-a-knot spline.
///
/// Interior smoothness rows (i = 1..n-2):
///   h_{i-1} m_{i-1} + 2(h_{i-1}+h_i) m_i + h_i m_{i+1} = d_i,
///   d_i = 6[(y_{i+1}-y_i)/h_i - (y_i-y_{i-1})/h_{i-1}].
/// Not-a-knot closes the system with continuity of the third derivative at
/// x_1 and x_{n-2}:
///   h_1 m_0 - (h_0+h_1) m_1 + h_0 m_2 = 0,
///   h_{n-2} m_{n-1} - (h_{n-3}+h_{n-2}) m_{n-2} + h_{n-3} m_{n-3} = 0.
/// m_0 and m_{n-1} are eliminated into the first and last interior rows,
/// leaving a tridiagonal system in m_1..m_{n-2}.
fn second_derivatives(x: &[f64], y: &[C64]) -> Vec<C64> {
    let n = x.len();
    let h = |i: usize| x[i + 1] - x[i];
    let nn = n - 2; // unknowns m_1..m_{n-2}
    let mut sub = vec![0.0; nn];
    let mut diag = vec![0.0; nn];
    let mut sup = vec![0.0; nn];
    let mut rhs = vec![C64::new(0.0, 0.0); nn];
    for (row, i) in (1..n - 1).enumerate() {
        sub[row] = h(i - 1);
        diag[row] = 2.0 * (h(i - 1) + h(i));
        sup[row] = h(i);
        rhs[row] = 6.0 * ((y[i + 1] - y[i]) / h(i) - (y[i] - y[i - 1]) / h(i - 1));
    }
    // left not-a-knot: m_0 = [(h_0+h_1) m_1 - h_0 m_2] / h_1
    {
        let a = sub[0]; // multiplies m_0 in the i=1 row
        diag[0] += a * (h(0) + h(1)) / h(1);
        sup[0] -= a * h(0) / h(1);
        sub[0] = 0.0;
    }
    // right not-a-knot: m_{n-1} = [(h_{n-3}+h_{n-2}) m_{n-2} - h_{n-2} m_{n-3}] / h_{n-3}
    {
        let c = sup[nn - 1]; // multiplies m_{n-1} in the i=n-2 row
        diag[nn - 1] += c * (h(n - 3) + h(n - 2)) / h(n - 3);
        sub[nn - 1] -= c * h(n - 2) / h(n - 3);
        sup[nn - 1] = 0.0;
    }
    // Thomas
    let mut cp = vec![0.0; nn];
    let mut dp = vec![C64::new(0.0, 0.0); nn];
    cp[0] = sup[0] / diag[0];
    dp[0] = rhs[0] / diag[0];
    for i in 1..nn {
        let denom = diag[i] - sub[i] * cp[i - 1];
        cp[i] = if i < nn - 1 { sup[i] / denom } else { 0.0 };
        dp[i] = (rhs[i] - sub[i] * dp[i - 1]) / denom;
    }
    let mut mi = vec![C64::new(0.0, 0.0); nn];
    mi[nn - 1] = dp[nn - 1];
    for i in (0..nn - 1).rev() {
        mi[i] = dp[i] - cp[i] * mi[i + 1];
    }
    let mut m = vec![C64::new(0.0, 0.0); n];
    m[1..n - 1].copy_from_slice(&mi);
    m[0] = ((h(0) + h(1)) * m[1] - h(0) * m[2]) / h(1);
    m[n - 1] = ((h(n - 3) + h(n - 2)) * m[n - 2] - h(n - 2) * m[n - 3]) / h(n - 3);
    m
}
