//! Real branches of the Lambert W function (inverse of `w ↦ w·e^w`).
//!
//! `W0` (principal) is defined on `[-1/e, ∞)` with `W0 >= -1`; `Wm1` (lower)
//! on `[-1/e, 0)` with `Wm1 <= -1`. Branch-appropriate seeds feed a Halley
//! iteration, which converges cubically away from the branch point.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WBranch {
    /// W0, defined on [-1/e, ∞), values >= -1.
    Principal,
    /// W-1, defined on [-1/e, 0), values <= -1.
    Lower,
}

#[derive(Debug, Error)]
pub enum SpecFunError {
    #[error("x={x} outside the {branch:?} branch domain")]
    DomainViolation { branch: WBranch, x: f64 },
}

const INV_E: f64 = 1.0 / std::f64::consts::E;
/// Slack at the branch point x = -1/e.
const EDGE_TOL: f64 = 1e-15;

/// Lambert W on the requested real branch.
///
/// The result satisfies `|w·e^w - x| <= 1e-13·(1 + |x|)`.
pub fn lambert_w(branch: WBranch, x: f64) -> Result<f64, SpecFunError> {
    if !x.is_finite() {
        return Err(SpecFunError::DomainViolation { branch, x });
    }
    let shifted = x + INV_E;
    if shifted < -EDGE_TOL {
        return Err(SpecFunError::DomainViolation { branch, x });
    }
    if branch == WBranch::Lower && x >= 0.0 {
        return Err(SpecFunError::DomainViolation { branch, x });
    }
    // At (or within rounding of) the branch point both branches meet at -1.
    if shifted <= EDGE_TOL {
        return Ok(-1.0);
    }

    let seed = match branch {
        WBranch::Principal => principal_seed(x),
        WBranch::Lower => lower_seed(x),
    };
    let w = halley(x, seed);

    // Clamp tiny overshoot across the branch ridge at w = -1.
    Ok(match branch {
        WBranch::Principal if w < -1.0 => -1.0,
        WBranch::Lower if w > -1.0 => -1.0,
        _ => w,
    })
}

fn principal_seed(x: f64) -> f64 {
    if x < -0.25 {
        // Square-root expansion about the branch point.
        let p = (2.0 * (std::f64::consts::E * x + 1.0)).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x.abs() < 0.3 {
        // Series at 0: W = x - x^2 + (3/2)x^3 - ...
        x * (1.0 - x + 1.5 * x * x)
    } else if x < std::f64::consts::E {
        x.ln_1p() * 0.7 + 0.2
    } else {
        // Asymptotic: L1 - L2 + L2/L1.
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    }
}

fn lower_seed(x: f64) -> f64 {
    let p = 2.0 * (std::f64::consts::E * x + 1.0);
    if p < 0.5 {
        // Branch-point expansion, lower side takes -sqrt.
        let q = p.sqrt();
        -1.0 - q - q * q / 3.0 - 11.0 / 72.0 * q * q * q
    } else {
        // Near 0^-: W ≈ ln(-x) - ln(-ln(-x)).
        let l1 = (-x).ln();
        let l2 = (-l1).ln();
        l1 - l2
    }
}

fn halley(x: f64, mut w: f64) -> f64 {
    // Step-based stopping: on the lower branch f' = e^w (w+1) is
    // exponentially small for large |w|, so a residual criterion alone
    // would quit several digits early.
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - x;
        if f == 0.0 {
            break;
        }
        let wp1 = w + 1.0;
        // Halley step: f / (f' - f·f''/(2 f')) with f' = e^w (w+1), f'' = e^w (w+2).
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        if denom == 0.0 || !denom.is_finite() {
            break;
        }
        let step = f / denom;
        let next = w - step;
        if next == w {
            break;
        }
        w = next;
        if step.abs() <= 1e-15 * (1.0 + w.abs()) {
            break;
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn residual(w: f64, x: f64) -> f64 {
        (w * w.exp() - x).abs()
    }

    #[test]
    fn principal_at_zero() {
        assert_eq!(lambert_w(WBranch::Principal, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn principal_at_e_is_one() {
        let w = lambert_w(WBranch::Principal, std::f64::consts::E).unwrap();
        assert!((w - 1.0).abs() < 1e-14);
    }

    #[test]
    fn lower_recovers_minus_three_halves() {
        // W-1(y e^y) = y for y = -3/2 <= -1.
        let y = -1.5f64;
        let x = y * y.exp();
        let w = lambert_w(WBranch::Lower, x).unwrap();
        assert!((w - y).abs() < 1e-13, "w = {w}");
    }

    #[test]
    fn branch_point_both_branches() {
        let x = -INV_E;
        assert!((lambert_w(WBranch::Principal, x).unwrap() + 1.0).abs() < 1e-7);
        assert!((lambert_w(WBranch::Lower, x).unwrap() + 1.0).abs() < 1e-7);
    }

    #[test]
    fn domain_violations() {
        assert!(lambert_w(WBranch::Principal, -0.5).is_err());
        assert!(lambert_w(WBranch::Lower, 0.0).is_err());
        assert!(lambert_w(WBranch::Lower, 1.0).is_err());
        assert!(lambert_w(WBranch::Principal, f64::NAN).is_err());
    }

    #[test]
    fn monotone_on_grid() {
        // Principal strictly increasing; lower strictly decreasing on [-1/e, 0).
        let mut prev = None;
        for i in 0..2000 {
            let x = -INV_E + (i as f64 / 1999.0) * (20.0 + INV_E);
            let w = lambert_w(WBranch::Principal, x).unwrap();
            if let Some(p) = prev {
                assert!(w > p, "principal not increasing at x={x}");
            }
            prev = Some(w);
        }
        let mut prev = None;
        for i in 1..2000 {
            let x = -INV_E + (i as f64 / 2000.0) * (INV_E - 1e-12);
            let w = lambert_w(WBranch::Lower, x).unwrap();
            if let Some(p) = prev {
                assert!(w < p, "lower not decreasing at x={x}, w={w}, prev={p}");
            }
            prev = Some(w);
        }
    }

    proptest! {
        #[test]
        fn round_trip_lower(y in -20.0f64..-1.0) {
            let x = y * y.exp();
            let w = lambert_w(WBranch::Lower, x).unwrap();
            prop_assert!((w - y).abs() <= 1e-12 * y.abs());
        }

        #[test]
        fn round_trip_principal(y in -1.0f64..20.0) {
            let x = y * y.exp();
            let w = lambert_w(WBranch::Principal, x).unwrap();
            prop_assert!((w - y).abs() <= 1e-12 * (1.0 + y.abs()));
        }

        #[test]
        fn residual_bound(x in -0.36f64..50.0) {
            let w = lambert_w(WBranch::Principal, x).unwrap();
            prop_assert!(residual(w, x) <= 1e-13 * (1.0 + x.abs()));
        }
    }
}
