//! Core types for the generalized planar Kolmogorov system
//!
//! ```text
//!     x' = g(x)·G(x,y),    y' = h(y)·H(x,y)
//! ```
//!
//! on an axis-aligned rectangle `[0, x_max] × [0, y_max]`. The factors and
//! their first derivatives are supplied as closures; catalog models supply
//! analytic partials, user-defined systems may fall back to central finite
//! differences.

use crate::linearize;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

pub type Fn1 = Box<dyn Fn(f64) -> f64 + Send + Sync>;
pub type Fn2 = Box<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// 2x2 real matrix in row-major order.
pub type Mat2 = [[f64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

pub fn point(x: f64, y: f64) -> Point {
    Point { x, y }
}

impl Point {
    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Axis-aligned rectangle `[0, x_max] × [0, y_max]`. A finite `x_max` can
/// encode a singularity wall (e.g. `x < 1/(8π)` in the relativistic model).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub x_max: f64,
    pub y_max: f64,
}

impl Domain {
    pub fn contains(&self, p: Point) -> bool {
        p.x >= 0.0 && p.x <= self.x_max && p.y >= 0.0 && p.y <= self.y_max
    }
}

#[derive(Debug, Error)]
pub enum SystemError {
    #[error("point ({x}, {y}) outside domain [0, {x_max}] x [0, {y_max}]")]
    DomainViolation { x: f64, y: f64, x_max: f64, y_max: f64 },
    #[error("equilibrium search did not converge after {iterations} iterations (best residual {residual})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("singular Jacobian of (G, H) at ({x}, {y})")]
    SingularJacobian { x: f64, y: f64 },
    #[error("supplied partial {name} disagrees with finite differences at ({x}, {y}): analytic {analytic}, numeric {numeric}")]
    InvalidDefinition { name: &'static str, x: f64, y: f64, analytic: f64, numeric: f64 },
}

/// A concrete Kolmogorov system: the four factors, their first derivatives,
/// the validity rectangle and identification metadata.
///
/// Immutable after construction; every operation is a pure function of its
/// inputs, so values can be shared freely across threads.
pub struct SystemDefinition {
    pub name: String,
    pub parameters: BTreeMap<String, f64>,
    pub domain: Domain,
    pub g: Fn1,
    pub g_prime: Fn1,
    pub h: Fn1,
    pub h_prime: Fn1,
    pub cap_g: Fn2,
    pub cap_g_x: Fn2,
    pub cap_g_y: Fn2,
    pub cap_h: Fn2,
    pub cap_h_x: Fn2,
    pub cap_h_y: Fn2,
}

impl std::fmt::Debug for SystemDefinition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SystemDefinition")
            .field("name", &self.name)
            .field("parameters", &self.parameters)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl SystemDefinition {
    fn check_domain(&self, p: Point) -> Result<(), SystemError> {
        if self.domain.contains(p) {
            Ok(())
        } else {
            Err(SystemError::DomainViolation {
                x: p.x,
                y: p.y,
                x_max: self.domain.x_max,
                y_max: self.domain.y_max,
            })
        }
    }

    /// Vector field `(g(x)·G(x,y), h(y)·H(x,y))` at `p`.
    pub fn eval_rhs(&self, p: Point) -> Result<(f64, f64), SystemError> {
        self.check_domain(p)?;
        Ok(self.eval_rhs_unchecked(p))
    }

    /// Same as [`eval_rhs`](Self::eval_rhs) without the domain check; used by
    /// the integrator which validates containment itself.
    pub fn eval_rhs_unchecked(&self, p: Point) -> (f64, f64) {
        (
            (self.g)(p.x) * (self.cap_g)(p.x, p.y),
            (self.h)(p.y) * (self.cap_h)(p.x, p.y),
        )
    }

    /// Analytic Jacobian of the vector field:
    ///
    /// ```text
    /// [ g'G + g·G_x   g·G_y       ]
    /// [ h·H_x         h'H + h·H_y ]
    /// ```
    pub fn jacobian_at(&self, p: Point) -> Result<Mat2, SystemError> {
        self.check_domain(p)?;
        let (x, y) = (p.x, p.y);
        let g = (self.g)(x);
        let h = (self.h)(y);
        Ok([
            [
                (self.g_prime)(x) * (self.cap_g)(x, y) + g * (self.cap_g_x)(x, y),
                g * (self.cap_g_y)(x, y),
            ],
            [
                h * (self.cap_h_x)(x, y),
                (self.h_prime)(y) * (self.cap_h)(x, y) + h * (self.cap_h_y)(x, y),
            ],
        ])
    }

    /// Damped 2-D Newton iteration on `(G, H) = 0` for the interior
    /// equilibrium. The step is halved until the residual decreases
    /// (at most 30 halvings); convergence requires residual <= 1e-13.
    pub fn find_equilibrium(&self, guess: Point) -> Result<Equilibrium, SystemError> {
        self.check_domain(guess)?;
        let resid = |p: Point| -> (f64, f64) { ((self.cap_g)(p.x, p.y), (self.cap_h)(p.x, p.y)) };
        let norm = |r: (f64, f64)| r.0.hypot(r.1);

        let mut p = guess;
        let mut r = resid(p);
        let tol = 1e-13;
        for iter in 0..100 {
            if norm(r) <= tol {
                return Ok(self.make_interior_equilibrium(p));
            }
            let j = [
                [(self.cap_g_x)(p.x, p.y), (self.cap_g_y)(p.x, p.y)],
                [(self.cap_h_x)(p.x, p.y), (self.cap_h_y)(p.x, p.y)],
            ];
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det.abs() < 1e-300 || !det.is_finite() {
                return Err(SystemError::SingularJacobian { x: p.x, y: p.y });
            }
            let dx = (j[1][1] * r.0 - j[0][1] * r.1) / det;
            let dy = (j[0][0] * r.1 - j[1][0] * r.0) / det;

            let mut lambda = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let cand = point(p.x - lambda * dx, p.y - lambda * dy);
                if self.domain.contains(cand) {
                    let rc = resid(cand);
                    if norm(rc) < norm(r) {
                        p = cand;
                        r = rc;
                        accepted = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !accepted {
                return Err(SystemError::NoConvergence { iterations: iter + 1, residual: norm(r) });
            }
        }
        Err(SystemError::NoConvergence { iterations: 100, residual: norm(r) })
    }

    fn make_interior_equilibrium(&self, p: Point) -> Equilibrium {
        let jac = self.jacobian_at(p).expect("equilibrium inside domain");
        let kind = if p.x > 0.0 && p.y > 0.0 {
            EquilibriumKind::InteriorAttractor
        } else {
            EquilibriumKind::Other
        };
        Equilibrium {
            location: p,
            jacobian: jac,
            kind,
            classification: linearize::classify(&jac).classification.coarse(),
        }
    }

    /// The origin as an equilibrium, classified from the Jacobian. Valid
    /// whenever `g(0)·G(0,0) = 0` and `h(0)·H(0,0) = 0`.
    pub fn origin_equilibrium(&self) -> Equilibrium {
        let p = point(0.0, 0.0);
        let jac = self.jacobian_at(p).expect("origin inside domain");
        let report = linearize::classify(&jac);
        let kind = if report.classification == linearize::Classification::Saddle {
            EquilibriumKind::OriginSaddle
        } else {
            EquilibriumKind::Other
        };
        Equilibrium { location: p, jacobian: jac, kind, classification: report.classification.coarse() }
    }

    /// Cross-check the supplied partials against central finite differences
    /// (step `1e-6·(1+|coordinate|)`) at the given points, relative tolerance
    /// `rtol`.
    pub fn validate_partials(&self, points: &[Point], rtol: f64) -> Result<(), SystemError> {
        for &p in points {
            let (x, y) = (p.x, p.y);
            let hx = 1e-6 * (1.0 + x.abs());
            let hy = 1e-6 * (1.0 + y.abs());
            let checks: [(&'static str, f64, f64); 6] = [
                ("g'", (self.g_prime)(x), ((self.g)(x + hx) - (self.g)(x - hx)) / (2.0 * hx)),
                ("h'", (self.h_prime)(y), ((self.h)(y + hy) - (self.h)(y - hy)) / (2.0 * hy)),
                (
                    "G_x",
                    (self.cap_g_x)(x, y),
                    ((self.cap_g)(x + hx, y) - (self.cap_g)(x - hx, y)) / (2.0 * hx),
                ),
                (
                    "G_y",
                    (self.cap_g_y)(x, y),
                    ((self.cap_g)(x, y + hy) - (self.cap_g)(x, y - hy)) / (2.0 * hy),
                ),
                (
                    "H_x",
                    (self.cap_h_x)(x, y),
                    ((self.cap_h)(x + hx, y) - (self.cap_h)(x - hx, y)) / (2.0 * hx),
                ),
                (
                    "H_y",
                    (self.cap_h_y)(x, y),
                    ((self.cap_h)(x, y + hy) - (self.cap_h)(x, y - hy)) / (2.0 * hy),
                ),
            ];
            for (name, analytic, numeric) in checks {
                let scale = 1.0 + analytic.abs().max(numeric.abs());
                if (analytic - numeric).abs() > rtol * scale {
                    return Err(SystemError::InvalidDefinition { name, x, y, analytic, numeric });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquilibriumKind {
    OriginSaddle,
    InteriorAttractor,
    Other,
}

/// Coarse equilibrium classification used on [`Equilibrium`]; the fine
/// six-way split lives in [`linearize::Classification`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquilibriumClass {
    Saddle,
    StableNode,
    StableSpiral,
    Unstable,
    Degenerate,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Equilibrium {
    pub location: Point,
    pub jacobian: Mat2,
    pub kind: EquilibriumKind,
    pub classification: EquilibriumClass,
}

/// Central finite-difference Jacobian of the full vector field, step
/// `1e-6·(1+|coordinate|)` per axis. Test oracle for
/// [`SystemDefinition::jacobian_at`]; also usable for user-defined systems.
pub fn fd_jacobian(sys: &SystemDefinition, p: Point) -> Mat2 {
    let hx = 1e-6 * (1.0 + p.x.abs());
    let hy = 1e-6 * (1.0 + p.y.abs());
    let fxp = sys.eval_rhs_unchecked(point(p.x + hx, p.y));
    let fxm = sys.eval_rhs_unchecked(point(p.x - hx, p.y));
    let fyp = sys.eval_rhs_unchecked(point(p.x, p.y + hy));
    let fym = sys.eval_rhs_unchecked(point(p.x, p.y - hy));
    [
        [(fxp.0 - fxm.0) / (2.0 * hx), (fyp.0 - fym.0) / (2.0 * hy)],
        [(fxp.1 - fxm.1) / (2.0 * hx), (fyp.1 - fym.1) / (2.0 * hy)],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Toy system with interior equilibrium (1, 1): G = y - x, H = x + y - 2.
    fn toy() -> SystemDefinition {
        SystemDefinition {
            name: "toy".into(),
            parameters: BTreeMap::new(),
            domain: Domain { x_max: 4.0, y_max: 4.0 },
            g: Box::new(|_| 1.0),
            g_prime: Box::new(|_| 0.0),
            h: Box::new(|_| 1.0),
            h_prime: Box::new(|_| 0.0),
            cap_g: Box::new(|x, y| y - x),
            cap_g_x: Box::new(|_, _| -1.0),
            cap_g_y: Box::new(|_, _| 1.0),
            cap_h: Box::new(|x, y| x + y - 2.0),
            cap_h_x: Box::new(|_, _| 1.0),
            cap_h_y: Box::new(|_, _| 1.0),
        }
    }

    #[test]
    fn rhs_and_domain() {
        let sys = toy();
        let (vx, vy) = sys.eval_rhs(point(1.0, 1.0)).unwrap();
        assert_eq!((vx, vy), (0.0, 0.0));
        assert!(matches!(
            sys.eval_rhs(point(5.0, 1.0)),
            Err(SystemError::DomainViolation { .. })
        ));
        assert!(matches!(
            sys.eval_rhs(point(1.0, -0.1)),
            Err(SystemError::DomainViolation { .. })
        ));
    }

    #[test]
    fn jacobian_matches_fd() {
        let sys = toy();
        let p = point(0.7, 1.9);
        let j = sys.jacobian_at(p).unwrap();
        let fd = fd_jacobian(&sys, p);
        for r in 0..2 {
            for c in 0..2 {
                assert!((j[r][c] - fd[r][c]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn newton_finds_toy_equilibrium() {
        let sys = toy();
        let eq = sys.find_equilibrium(point(0.4, 2.1)).unwrap();
        assert!((eq.location.x - 1.0).abs() < 1e-12);
        assert!((eq.location.y - 1.0).abs() < 1e-12);
        assert_eq!(eq.kind, EquilibriumKind::InteriorAttractor);
    }

    #[test]
    fn newton_idempotent_at_solution() {
        let sys = toy();
        let eq = sys.find_equilibrium(point(0.4, 2.1)).unwrap();
        let again = sys.find_equilibrium(eq.location).unwrap();
        assert!(eq.location.dist(&again.location) <= 1e-14);
    }

    #[test]
    fn validate_partials_catches_typo() {
        let mut sys = toy();
        sys.cap_h_x = Box::new(|_, _| 1.5); // wrong on purpose
        let pts = [point(0.5, 0.5), point(1.5, 2.0)];
        assert!(matches!(
            sys.validate_partials(&pts, 1e-6),
            Err(SystemError::InvalidDefinition { name: "H_x", .. })
        ));
        let good = toy();
        good.validate_partials(&pts, 1e-6).unwrap();
    }
}
