//! Bracketing scalar root finders: bisection and bisection-safeguarded Newton.

use crate::error::{Error, Result};

/// A sign-change interval for a continuous function.
#[derive(Debug, Clone, Copy)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64, f_lo: f64, f_hi: f64) -> Self {
        debug_assert!(lo < hi);
        debug_assert!(f_lo * f_hi <= 0.0, "not a sign change: [{f_lo}, {f_hi}]");
        Bracket { lo, hi, f_lo, f_hi }
    }
}

/// Plain bisection to an absolute interval width `xtol` (or until `f` hits
/// `ftol` in magnitude). Returns the midpoint of the final interval.
pub fn bisect(mut f: impl FnMut(f64) -> f64, bracket: Bracket, xtol: f64, ftol: f64) -> f64 {
    let Bracket {
        mut lo,
        mut hi,
        mut f_lo,
        ..
    } = bracket;
    if f_lo == 0.0 {
        return lo;
    }
    if bracket.f_hi == 0.0 {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= xtol || mid == lo || mid == hi {
            return mid;
        }
        let f_mid = f(mid);
        if f_mid.abs() <= ftol {
            return mid;
        }
        if f_lo * f_mid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    0.5 * (lo + hi)
}

/// Newton iteration constrained to a sign-change bracket: any step that
/// leaves the interval, or fails to shrink it fast enough, falls back to
/// bisection. `f_df` returns (f, f').
///
/// Stops when `|f| <= ftol(x)` or the interval width drops below `xtol(x)`.
pub fn newton_bisect(
    mut f_df: impl FnMut(f64) -> (f64, f64),
    bracket: Bracket,
    xtol: impl Fn(f64) -> f64,
    ftol: impl Fn(f64) -> f64,
) -> f64 {
    let Bracket {
        mut lo,
        mut hi,
        mut f_lo,
        ..
    } = bracket;
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (fx, dfx) = f_df(x);
        if fx.abs() <= ftol(x) {
            return x;
        }
        if f_lo * fx < 0.0 {
            hi = x;
        } else {
            lo = x;
            f_lo = fx;
        }
        if hi - lo <= xtol(x) {
            return 0.5 * (lo + hi);
        }
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            return mid;
        }
        let newton = x - fx / dfx;
        x = if dfx != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            mid
        };
    }
    0.5 * (lo + hi)
}

/// Expand `hi` geometrically (doubling) until `f` changes sign against
/// `f_lo`, capped at `cap`.
pub fn grow_bracket_up(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    f_lo: f64,
    hi_start: f64,
    cap: f64,
    what: &'static str,
) -> Result<Bracket> {
    let mut hi = hi_start.max(lo * (1.0 + 1e-9));
    for _ in 0..240 {
        let f_hi = f(hi);
        if f_lo * f_hi <= 0.0 {
            return Ok(Bracket::new(lo, hi, f_lo, f_hi));
        }
        if hi >= cap {
            break;
        }
        hi = (hi * 2.0).min(cap);
    }
    Err(Error::BracketFailure {
        what,
        detail: format!("no sign change on [{lo}, {cap}] (f({lo}) = {f_lo})"),
    })
}

/// Count sign changes of `f` on a uniform `n`-point grid over `[lo, hi]`
/// and return the first sign-change bracket found, if any.
pub fn scan_sign_changes(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    n: usize,
) -> (usize, Option<Bracket>) {
    let mut count = 0;
    let mut first = None;
    let mut x_prev = lo;
    let mut f_prev = f(lo);
    for i in 1..n {
        let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let fx = f(x);
        if f_prev * fx < 0.0 {
            count += 1;
            if first.is_none() {
                first = Some(Bracket::new(x_prev, x, f_prev, fx));
            }
        }
        x_prev = x;
        f_prev = fx;
    }
    (count, first)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt2() {
        let f = |x: f64| x * x - 2.0;
        let b = Bracket::new(1.0, 2.0, f(1.0), f(2.0));
        let root = bisect(f, b, 1e-14, 0.0);
        assert!((root - std::f64::consts::SQRT_2).abs() < 1e-13);
    }

    #[test]
    fn newton_bisect_handles_flat_start() {
        // f'(0.5) is small; the safeguard must keep the iterate inside.
        let f_df = |x: f64| ((x - 1.0).powi(3) + 0.1, 3.0 * (x - 1.0).powi(2));
        let b = Bracket::new(-2.0, 1.0, -27.0 + 0.1, 0.1);
        let root = newton_bisect(f_df, b, |_| 1e-14, |_| 1e-15);
        assert!(((root - 1.0).powi(3) + 0.1).abs() < 1e-12);
    }

    #[test]
    fn scan_counts_all_roots() {
        let f = |x: f64| (x * std::f64::consts::PI).sin();
        let (count, first) = scan_sign_changes(f, 0.1, 3.9, 2000);
        assert_eq!(count, 3);
        let b = first.unwrap();
        assert!(b.lo < 1.0 && 1.0 < b.hi);
    }

    #[test]
    fn grow_bracket_reports_failure() {
        let err = grow_bracket_up(|_| 1.0, 1.0, 1.0, 2.0, 1e6, "test").unwrap_err();
        assert!(matches!(err, Error::BracketFailure { .. }));
    }
}
