//! Adaptive embedded Runge-Kutta integrator (Dormand-Prince 5(4)).
//!
//! Stores every accepted node together with the right-hand side there, so
//! callers can build cubic Hermite dense output from the solution arrays.
//! The right-hand side returns `None` to veto a trial state (used by the
//! separatrix integration to reject excursions into v <= 0); a vetoed stage
//! is treated like a failed error test and the step is retried smaller.

use crate::error::{Error, Result};

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Difference between the 5th- and embedded 4th-order weights.
const E1: f64 = B1 - 5179.0 / 57600.0;
const E3: f64 = B3 - 7571.0 / 16695.0;
const E4: f64 = B4 - 393.0 / 640.0;
const E5: f64 = B5 - -92097.0 / 339200.0;
const E6: f64 = B6 - 187.0 / 2100.0;
const E7: f64 = -1.0 / 40.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

#[derive(Debug, Clone, Copy)]
pub struct AdaptiveRk {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    pub h_init: Option<f64>,
    /// `(i, cap)` limits each accepted step so component `i` changes by at
    /// most `cap`, via h <= cap / |y_i'|. Used to force dense node spacing.
    pub component_step_cap: Option<(usize, f64)>,
}

impl Default for AdaptiveRk {
    fn default() -> Self {
        AdaptiveRk {
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 1_000_000,
            h_init: None,
            component_step_cap: None,
        }
    }
}

/// Accepted nodes of one integration: abscissae, states and derivatives.
#[derive(Debug, Clone)]
pub struct OdeSolution<const N: usize> {
    pub x: Vec<f64>,
    pub y: Vec<[f64; N]>,
    pub dy: Vec<[f64; N]>,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] += h * acc;
    }
    out
}

impl AdaptiveRk {
    /// Integrate y' = f(x, y) from `x0` to `x_end` (ascending).
    pub fn solve<const N: usize>(
        &self,
        mut f: impl FnMut(f64, &[f64; N]) -> Option<[f64; N]>,
        x0: f64,
        x_end: f64,
        y0: [f64; N],
    ) -> Result<OdeSolution<N>> {
        assert!(x_end > x0, "ascending integration only");
        let span = x_end - x0;
        let mut x = x0;
        let mut y = y0;
        let mut k1 = f(x, &y).ok_or(Error::ToleranceFailure { x, h: 0.0 })?;

        let mut sol = OdeSolution {
            x: vec![x],
            y: vec![y],
            dy: vec![k1],
        };

        let mut h = self.h_init.unwrap_or(span * 1e-4).min(span);
        let mut steps = 0usize;
        while x < x_end {
            steps += 1;
            if steps > self.max_steps {
                return Err(Error::ToleranceFailure { x, h });
            }
            if let Some((i, cap)) = self.component_step_cap {
                if k1[i].abs() * h > cap {
                    h = cap / k1[i].abs();
                }
            }
            let mut last = false;
            if x + h >= x_end {
                h = x_end - x;
                last = true;
            }
            if h <= 16.0 * f64::EPSILON * x.abs().max(1.0) {
                return Err(Error::ToleranceFailure { x, h });
            }

            let stages = (|| {
                let k2 = f(x + C2 * h, &axpy(&y, h, &[(A21, &k1)]))?;
                let k3 = f(x + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]))?;
                let k4 = f(
                    x + C4 * h,
                    &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
                )?;
                let k5 = f(
                    x + C5 * h,
                    &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
                )?;
                let k6 = f(
                    x + h,
                    &axpy(
                        &y,
                        h,
                        &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                    ),
                )?;
                let y_new = axpy(
                    &y,
                    h,
                    &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
                );
                let k7 = f(x + h, &y_new)?;
                Some((y_new, k3, k4, k5, k6, k7))
            })();

            let Some((y_new, k3, k4, k5, k6, k7)) = stages else {
                h *= 0.25;
                continue;
            };

            let mut err_sq = 0.0;
            for i in 0..N {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                        + E7 * k7[i]);
                let scale = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                err_sq += (e / scale) * (e / scale);
            }
            let err = (err_sq / N as f64).sqrt();

            if err <= 1.0 {
                x = if last { x_end } else { x + h };
                y = y_new;
                k1 = k7; // FSAL
                sol.x.push(x);
                sol.y.push(y);
                sol.dy.push(k1);
                let factor = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                h *= factor;
            } else {
                h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            }
        }
        Ok(sol)
    }
}
