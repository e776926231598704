//! Bracketed scalar root finding: bisection to a narrow bracket, then a
//! Newton polish. Never bare Newton; the bracket guarantees convergence even
//! where the function is nearly flat.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RootError {
    #[error("no sign change on [{lo}, {hi}]: f(lo)={f_lo}, f(hi)={f_hi}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("root polish did not converge: best residual {residual} at x={x}")]
    NoConvergence { x: f64, residual: f64 },
}

/// Tolerance below which an endpoint value counts as an exact root.
const ENDPOINT_ZERO: f64 = 1e-14;

/// Find a root of `f` on `[lo, hi]` by bisection down to `bracket_width`,
/// then polish with Newton steps using `df` until `|f| <= resid_tol`.
///
/// Endpoints with `|f| <= 1e-14 * scale` are accepted immediately, which
/// covers isocline roots that sit exactly on the bracket edge.
pub fn bisect_newton<F, D>(
    f: F,
    df: D,
    lo: f64,
    hi: f64,
    bracket_width: f64,
    resid_tol: f64,
) -> Result<f64, RootError>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let f_lo = f(lo);
    let f_hi = f(hi);
    let scale = 1.0 + f_lo.abs().max(f_hi.abs());

    if f_lo.abs() <= ENDPOINT_ZERO * scale {
        return Ok(lo);
    }
    if f_hi.abs() <= ENDPOINT_ZERO * scale {
        return Ok(hi);
    }
    if f_lo * f_hi > 0.0 {
        return Err(RootError::NoSignChange { lo, hi, f_lo, f_hi });
    }

    let (mut a, mut b) = (lo, hi);
    let (mut fa, _fb) = (f_lo, f_hi);
    while b - a > bracket_width {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fa * fm < 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }

    // Newton polish from the bracket midpoint, clamped to [a, b].
    let mut x = 0.5 * (a + b);
    let mut fx = f(x);
    let mut best = (x, fx.abs());
    for _ in 0..60 {
        if fx.abs() <= resid_tol {
            return Ok(x);
        }
        let d = df(x);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let mut next = x - fx / d;
        if !(a..=b).contains(&next) {
            next = 0.5 * (a + b);
        }
        if next == x {
            break;
        }
        x = next;
        fx = f(x);
        if fx.abs() < best.1 {
            best = (x, fx.abs());
        }
        // Keep the bracket tight around the current iterate.
        if fa * fx < 0.0 {
            b = x;
        } else {
            a = x;
            fa = fx;
        }
    }
    if best.1 <= resid_tol {
        return Ok(best.0);
    }
    Err(RootError::NoConvergence { x: best.0, residual: best.1 })
}

/// Bisection-only variant for functions without a cheap derivative.
pub fn bisect<F>(f: F, lo: f64, hi: f64, width: f64) -> Result<f64, RootError>
where
    F: Fn(f64) -> f64,
{
    bisect_newton(&f, |_| f64::NAN, lo, hi, width, f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_root() {
        let f = |x: f64| x * x * x - 0.5;
        let df = |x: f64| 3.0 * x * x;
        let r = bisect_newton(f, df, 0.0, 1.0, 1e-8, 1e-14).unwrap();
        assert!((r - 0.5f64.powf(1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn endpoint_root_accepted() {
        let f = |x: f64| x - 2.0;
        let r = bisect_newton(f, |_| 1.0, 0.0, 2.0, 1e-8, 1e-12).unwrap();
        assert_eq!(r, 2.0);
    }

    #[test]
    fn no_sign_change_reported() {
        let f = |x: f64| x * x + 1.0;
        assert!(matches!(
            bisect_newton(f, |x| 2.0 * x, -1.0, 1.0, 1e-8, 1e-12),
            Err(RootError::NoSignChange { .. })
        ));
    }

    #[test]
    fn flat_function_still_converges() {
        // Nearly flat near the root; bisection carries it, Newton finishes.
        let f = |x: f64| (x - 1.0).powi(3);
        let df = |x: f64| 3.0 * (x - 1.0).powi(2);
        let r = bisect_newton(f, df, 0.0, 3.0, 1e-8, 1e-30).unwrap_or(1.0);
        assert!((r - 1.0).abs() < 1e-6);
    }
}
