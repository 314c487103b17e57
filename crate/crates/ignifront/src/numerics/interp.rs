//! Piecewise cubic Hermite interpolation on a strictly monotone node grid.
//!
//! Every curve stored by the integrator comes with exact derivatives at the
//! nodes (the ODE right-hand side), so cubic Hermite gives O(h^4) accuracy
//! between nodes without refitting.

/// A sampled scalar function with nodal derivatives.
#[derive(Debug, Clone)]
pub struct HermiteSeries {
    x: Vec<f64>,
    y: Vec<f64>,
    dy: Vec<f64>,
}

impl HermiteSeries {
    /// Nodes must be strictly increasing; `dy[i]` is dy/dx at `x[i]`.
    pub fn new(x: Vec<f64>, y: Vec<f64>, dy: Vec<f64>) -> Self {
        assert_eq!(x.len(), y.len());
        assert_eq!(x.len(), dy.len());
        assert!(x.len() >= 2, "need at least two nodes");
        assert!(
            x.windows(2).all(|w| w[0] < w[1]),
            "nodes must be strictly increasing"
        );
        HermiteSeries { x, y, dy }
    }

    pub fn x_max(&self) -> f64 {
        *self.x.last().unwrap()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.x
    }

    /// Index of the panel containing `x` (clamped to the end panels).
    fn panel(&self, x: f64) -> usize {
        let n = self.x.len();
        let idx = self.x.partition_point(|&xi| xi <= x);
        idx.clamp(1, n - 1) - 1
    }

    /// Evaluate the interpolant. Arguments outside the node range are
    /// clamped to the nearest end panel.
    pub fn eval(&self, x: f64) -> f64 {
        self.eval_with_deriv(x).0
    }

    /// Evaluate value and derivative.
    pub fn eval_with_deriv(&self, x: f64) -> (f64, f64) {
        let i = self.panel(x);
        let (x0, x1) = (self.x[i], self.x[i + 1]);
        let h = x1 - x0;
        let s = ((x - x0) / h).clamp(0.0, 1.0);
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let (m0, m1) = (self.dy[i], self.dy[i + 1]);

        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let value = h00 * y0 + h * (h10 * m0 + h11 * m1) + h01 * y1;

        let d00 = 6.0 * s2 - 6.0 * s;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = -6.0 * s2 + 6.0 * s;
        let d11 = 3.0 * s2 - 2.0 * s;
        let deriv = (d00 * y0 + d01 * y1) / h + d10 * m0 + d11 * m1;

        (value, deriv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubic_exactly() {
        // p(x) = x^3 - 2x + 1 is in the interpolation space.
        let p = |x: f64| x * x * x - 2.0 * x + 1.0;
        let dp = |x: f64| 3.0 * x * x - 2.0;
        let xs: Vec<f64> = (0..6).map(|i| -1.0 + 0.7 * i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| p(x)).collect();
        let dys: Vec<f64> = xs.iter().map(|&x| dp(x)).collect();
        let series = HermiteSeries::new(xs, ys, dys);
        for k in 0..50 {
            let x = -1.0 + 3.5 * k as f64 / 49.0;
            let (v, d) = series.eval_with_deriv(x);
            assert!((v - p(x)).abs() < 1e-12, "value off at x={x}");
            assert!((d - dp(x)).abs() < 1e-11, "deriv off at x={x}");
        }
    }

    #[test]
    fn fourth_order_on_smooth_function() {
        let f = |x: f64| (2.0 * x).sin();
        let df = |x: f64| 2.0 * (2.0 * x).cos();
        let mut errs = Vec::new();
        for &n in &[16usize, 32] {
            let xs: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
            let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
            let dys: Vec<f64> = xs.iter().map(|&x| df(x)).collect();
            let series = HermiteSeries::new(xs, ys, dys);
            let mut emax: f64 = 0.0;
            for k in 0..1000 {
                let x = k as f64 / 999.0;
                emax = emax.max((series.eval(x) - f(x)).abs());
            }
            errs.push(emax);
        }
        let rate = (errs[0] / errs[1]).log2();
        assert!(rate > 3.5, "expected ~4th order, got rate {rate}");
    }
}
