//! Quadrature helpers: adaptive Simpson and a fixed 7-point Gauss panel.

/// Adaptive Simpson with the classic 1/15 error estimate.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 60)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

// 7-point Gauss-Legendre abscissae/weights on [-1, 1].
const GL7_X: [f64; 7] = [
    -0.949107912342758524526189684047851,
    -0.741531185599394439863864773280788,
    -0.405845151377397166906606412076961,
    0.0,
    0.405845151377397166906606412076961,
    0.741531185599394439863864773280788,
    0.949107912342758524526189684047851,
];
const GL7_W: [f64; 7] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
];

/// One 7-point Gauss-Legendre panel over [a, b]; exact for degree 13.
pub fn gauss7(mut f: impl FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for k in 0..7 {
        sum += GL7_W[k] * f(mid + half * GL7_X[k]);
    }
    sum * half
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_matches_closed_forms() {
        let val = adaptive_simpson(&|x: f64| x.exp(), 0.0, 1.0, 1e-13);
        assert!((val - (1f64.exp() - 1.0)).abs() < 1e-12);
        let val = adaptive_simpson(&|x: f64| 1.0 / (1.0 + x * x), 0.0, 1.0, 1e-13);
        assert!((val - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
    }

    #[test]
    fn gauss7_is_exact_for_high_degree() {
        // x^12 on [0, 1]: integral 1/13.
        let val = gauss7(|x: f64| x.powi(12), 0.0, 1.0);
        assert!((val - 1.0 / 13.0).abs() < 1e-15);
    }
}
