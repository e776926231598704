//! Isocline functions, the tangent–isocline intersection `v`, hypothesis
//! verification for the trapping construction, and the heteroclinic bound
//!
//! ```text
//!     X = H|_{[w,δ)}^{-1}( G(c·v) ),
//! ```
//!
//! the unique level-equation root `L(X, z) = L(w, c·v)` right of the
//! attractor, with `δ` the detected right edge of monotonicity of `H`.

use crate::lyapunov::{self, LyapunovFunction, LyapunovError};
use crate::quad::QuadError;
use crate::roots::{self, RootError};
use crate::system::{point, Equilibrium, Point, SystemDefinition};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BoundError {
    #[error("root finding failed: {0}")]
    NoRoot(#[from] RootError),
    #[error("hypotheses violated: {}", failed.join("; "))]
    HypothesisViolated { failed: Vec<String> },
    #[error("no level root in (w, delta): G(c v) = {level} exceeds sup H = {sup}")]
    NoRootInInterval { level: f64, sup: f64 },
    #[error(transparent)]
    Lyapunov(#[from] LyapunovError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub point: Point,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Prerequisite (slope or intersection) unavailable; check not run.
    Skipped,
}

/// Outcome of one sampled hypothesis check. A failing check always carries
/// the worst violating point; a passing check carries the point closest to
/// violation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub status: CheckStatus,
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckOutcome {
    fn skipped(reason: &str) -> Self {
        CheckOutcome { status: CheckStatus::Skipped, witness: None, note: Some(reason.into()) }
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }
}

/// Sign conditions on the partials over the sampled domain. The published
/// statement lists `G_y` strictly negative and `H_y >= 0`, yet the slope
/// lemma and every worked model need `G_y > 0` and `H_y <= 0`; both readings
/// are reported, and [`HypothesisReport::all_pass`] uses the
/// `G_y > 0`, `H_y <= 0` pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub g_x_negative: CheckOutcome,
    pub h_x_negative: CheckOutcome,
    pub g_y_negative_as_stated: CheckOutcome,
    pub g_y_positive: CheckOutcome,
    pub h_y_nonnegative_as_stated: CheckOutcome,
    pub h_y_nonpositive: CheckOutcome,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StationaryReport {
    /// h(0) = 0.
    pub h_zero_at_origin: CheckOutcome,
    /// H(w, z) = 0.
    pub cap_h_at_interior: CheckOutcome,
    /// G(0, 0) = 0.
    pub cap_g_at_origin: CheckOutcome,
    /// G(w, z) = 0.
    pub cap_g_at_interior: CheckOutcome,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IsoclineReport {
    /// `x₊ : [0, z] → [0, w]` exists and is strictly increasing.
    pub x_plus_increasing: CheckOutcome,
    /// `x₋ : [z, cv] → [v, w]` exists and is nonincreasing.
    pub x_minus_nonincreasing: CheckOutcome,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub monotonicity: MonotonicityReport,
    pub stationary: StationaryReport,
    /// `h·H <= c·g·G` sampled along the ray `y = c x` up to `(v, cv)`.
    pub unstable_tangent: CheckOutcome,
    /// `H'(x) > 0` sampled on `(w, min(cv, δ))`.
    pub derivative_sign: CheckOutcome,
    pub derivative_sign_interval: (f64, f64),
    pub isoclines: IsoclineReport,
}

impl HypothesisReport {
    /// Effective gate for the bound: the as-stated `G_y < 0` / `H_y >= 0`
    /// readings are reported but not gating (see [`MonotonicityReport`]).
    pub fn all_pass(&self) -> bool {
        self.monotonicity.g_x_negative.passed()
            && self.monotonicity.h_x_negative.passed()
            && self.monotonicity.g_y_positive.passed()
            && self.monotonicity.h_y_nonpositive.passed()
            && self.stationary.h_zero_at_origin.passed()
            && self.stationary.cap_h_at_interior.passed()
            && self.stationary.cap_g_at_origin.passed()
            && self.stationary.cap_g_at_interior.passed()
            && self.unstable_tangent.passed()
            && self.derivative_sign.passed()
            && self.isoclines.x_plus_increasing.passed()
            && self.isoclines.x_minus_nonincreasing.passed()
    }

    /// Names of gating checks that did not pass, with witnesses where
    /// available; drives the CLI refusal message.
    pub fn failed_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut add = |name: &str, c: &CheckOutcome| {
            if !c.passed() {
                match &c.witness {
                    Some(w) => out.push(format!(
                        "{name} (value {} at ({}, {}))",
                        w.value, w.point.x, w.point.y
                    )),
                    None => out.push(name.to_string()),
                }
            }
        };
        add("stationary: G(0,0)=0", &self.stationary.cap_g_at_origin);
        add("stationary: h(0)=0", &self.stationary.h_zero_at_origin);
        add("stationary: G(w,z)=0", &self.stationary.cap_g_at_interior);
        add("stationary: H(w,z)=0", &self.stationary.cap_h_at_interior);
        add("monotonicity: G_x<0", &self.monotonicity.g_x_negative);
        add("monotonicity: H_x<0", &self.monotonicity.h_x_negative);
        add("monotonicity: G_y>0", &self.monotonicity.g_y_positive);
        add("monotonicity: H_y<=0", &self.monotonicity.h_y_nonpositive);
        add("unstable tangent: hH<=cgG on y=cx", &self.unstable_tangent);
        add("derivative sign: H'>0 on (w, min(cv, delta))", &self.derivative_sign);
        add("isoclines: x+ increasing", &self.isoclines.x_plus_increasing);
        add("isoclines: x- nonincreasing", &self.isoclines.x_minus_nonincreasing);
        out
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoundResult {
    pub c: f64,
    pub v: f64,
    pub cv: f64,
    /// The bound on the first coordinate of the heteroclinic orbit.
    pub x: f64,
    /// `G(c·v)`, the Lyapunov level of the trapping set.
    pub level_value: f64,
    /// Detected right edge of monotonicity of `H` (first sign change of
    /// `H'` right of `w`, else the tabulated edge).
    pub delta: f64,
    /// Catalog closed form (via Lambert W / radicals) where available.
    pub closed_form_x: Option<f64>,
}

/// Strictness margin: a sampled strict inequality must clear zero by this.
const STRICT_TOL: f64 = 1e-12;

/// Solve `G(x, y) = 0` for `x` on `[0, w]`; the increasing isocline branch.
pub fn isocline_x_plus(
    sys: &SystemDefinition,
    eq: &Equilibrium,
    y: f64,
) -> Result<f64, BoundError> {
    let w = eq.location.x;
    let f = |x: f64| (sys.cap_g)(x, y);
    let df = |x: f64| (sys.cap_g_x)(x, y);
    Ok(roots::bisect_newton(f, df, 0.0, w, 1e-10, 1e-12)?)
}

/// Solve `H(x, y) = 0` for `x` on `[v - margin, w + margin]`; the
/// nonincreasing isocline branch.
pub fn isocline_x_minus(
    sys: &SystemDefinition,
    eq: &Equilibrium,
    v: f64,
    y: f64,
) -> Result<f64, BoundError> {
    let w = eq.location.x;
    let margin = 0.05 * (w - v).abs() + 1e-6 * (1.0 + w);
    let lo = (v - margin).max(0.0);
    let hi = (w + margin).min(sys.domain.x_max);
    let f = |x: f64| (sys.cap_h)(x, y);
    let df = |x: f64| (sys.cap_h_x)(x, y);
    Ok(roots::bisect_newton(f, df, lo, hi, 1e-10, 1e-12)?)
}

/// The tangent–isocline intersection: `v > 0` with `H(v, c·v) = 0`,
/// bracketed on `(0, w]`.
pub fn solve_v(sys: &SystemDefinition, eq: &Equilibrium, c: f64) -> Result<f64, BoundError> {
    let w = eq.location.x;
    let f = |x: f64| (sys.cap_h)(x, c * x);
    let df = |x: f64| (sys.cap_h_x)(x, c * x) + c * (sys.cap_h_y)(x, c * x);
    Ok(roots::bisect_newton(f, df, 0.0, w, 1e-10, 1e-12)?)
}

/// First zero of `H'` strictly right of the anchor `w` (scan step
/// `span/10⁴`, then bisection), else the tabulated right edge. This is the
/// `δ` on which `H` is invertible.
pub fn detect_delta(sys: &SystemDefinition, lyap: &LyapunovFunction) -> f64 {
    let w = lyap.anchors.x;
    let hi = lyap.h_comp.hi();
    let hp = lyapunov::h_prime_fn(sys, lyap.variant, lyap.anchors.y);
    let n = 10_000usize;
    let step = (hi - w) / (n as f64);
    if step <= 0.0 {
        return hi;
    }
    let mut prev = w + step;
    let mut prev_v = hp(prev);
    for k in 2..=n {
        let x = w + step * (k as f64);
        let v = hp(x);
        if prev_v > 0.0 && v <= 0.0 {
            return roots::bisect(&hp, prev, x, 1e-12 * (1.0 + hi)).unwrap_or(x);
        }
        prev = x;
        prev_v = v;
    }
    hi
}

fn run_samples<I>(samples: I, pass: impl Fn(f64) -> bool, worse: impl Fn(f64, f64) -> bool) -> CheckOutcome
where
    I: IntoIterator<Item = (Point, f64)>,
{
    let mut worst: Option<Witness> = None;
    let mut ok = true;
    for (p, value) in samples {
        if !pass(value) {
            ok = false;
        }
        match &worst {
            Some(w) if !worse(value, w.value) => {}
            _ => worst = Some(Witness { point: p, value }),
        }
    }
    CheckOutcome {
        status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
        witness: worst,
        note: None,
    }
}

/// Sample every hypothesis of the bound construction. Failures are data,
/// not errors: each failed check carries its worst witness.
///
/// `c` and `v` may be absent (e.g. the slope formula is undefined); the
/// checks that need them are then reported as skipped.
pub fn check_hypotheses(
    sys: &SystemDefinition,
    eq: &Equilibrium,
    lyap: &LyapunovFunction,
    c: Option<f64>,
    v: Option<f64>,
    grid: (usize, usize),
    ray_samples: usize,
) -> HypothesisReport {
    let (w, z) = (eq.location.x, eq.location.y);
    let d = sys.domain;
    let (nx, ny) = (grid.0.max(2), grid.1.max(2));

    let mut grid_pts = Vec::with_capacity(nx * ny);
    for i in 0..nx {
        let x = d.x_max * (i as f64) / ((nx - 1) as f64);
        for j in 0..ny {
            let y = d.y_max * (j as f64) / ((ny - 1) as f64);
            grid_pts.push(point(x, y));
        }
    }

    let strict_neg = |v: f64| v <= -STRICT_TOL;
    let strict_pos = |v: f64| v >= STRICT_TOL;
    let nonneg = |v: f64| v >= -STRICT_TOL;
    let nonpos = |v: f64| v <= STRICT_TOL;
    let larger = |a: f64, b: f64| a > b;
    let smaller = |a: f64, b: f64| a < b;

    let eval = |f: &crate::system::Fn2| -> Vec<(Point, f64)> {
        grid_pts.iter().map(|&p| (p, f(p.x, p.y))).collect()
    };
    let gx = eval(&sys.cap_g_x);
    let hx = eval(&sys.cap_h_x);
    let gy = eval(&sys.cap_g_y);
    let hy = eval(&sys.cap_h_y);

    let monotonicity = MonotonicityReport {
        g_x_negative: run_samples(gx.iter().copied(), strict_neg, larger),
        h_x_negative: run_samples(hx.iter().copied(), strict_neg, larger),
        g_y_negative_as_stated: run_samples(gy.iter().copied(), strict_neg, larger),
        g_y_positive: run_samples(gy.iter().copied(), strict_pos, smaller),
        h_y_nonnegative_as_stated: run_samples(hy.iter().copied(), nonneg, smaller),
        h_y_nonpositive: run_samples(hy.iter().copied(), nonpos, larger),
    };

    let zero_check = |p: Point, value: f64| -> CheckOutcome {
        let pass = value.abs() <= 1e-12;
        CheckOutcome {
            status: if pass { CheckStatus::Pass } else { CheckStatus::Fail },
            witness: Some(Witness { point: p, value }),
            note: None,
        }
    };
    let stationary = StationaryReport {
        h_zero_at_origin: zero_check(point(0.0, 0.0), (sys.h)(0.0)),
        cap_h_at_interior: zero_check(eq.location, (sys.cap_h)(w, z)),
        cap_g_at_origin: zero_check(point(0.0, 0.0), (sys.cap_g)(0.0, 0.0)),
        cap_g_at_interior: zero_check(eq.location, (sys.cap_g)(w, z)),
    };

    let unstable_tangent = match (c, v) {
        (Some(c), Some(v)) => {
            let n = ray_samples.max(2);
            let samples = (1..=n).map(|k| {
                let x = v * (k as f64) / (n as f64);
                let y = c * x;
                let val = (sys.h)(y) * (sys.cap_h)(x, y) - c * (sys.g)(x) * (sys.cap_g)(x, y);
                (point(x, y), val)
            });
            run_samples(samples, nonpos, larger)
        }
        _ => CheckOutcome::skipped("slope or intersection unavailable"),
    };

    let delta = detect_delta(sys, lyap);
    let (derivative_sign, derivative_sign_interval) = match (c, v) {
        (Some(c), Some(v)) => {
            let end = (c * v).min(delta);
            let n = ray_samples.max(2);
            let hp = lyapunov::h_prime_fn(sys, lyap.variant, z);
            let samples = (1..=n).map(|k| {
                let x = w + (end - w) * (k as f64) / ((n + 1) as f64);
                (point(x, z), hp(x))
            });
            (run_samples(samples, strict_pos, smaller), (w, end))
        }
        _ => (CheckOutcome::skipped("slope or intersection unavailable"), (w, delta)),
    };

    let x_plus_increasing = {
        let n = 64usize;
        let mut prev: Option<f64> = None;
        let mut outcome = CheckOutcome { status: CheckStatus::Pass, witness: None, note: None };
        for k in 0..=n {
            let y = z * (k as f64) / (n as f64);
            match isocline_x_plus(sys, eq, y) {
                Ok(x) => {
                    let in_range = (-1e-9..=w + 1e-9).contains(&x);
                    let increasing = prev.map_or(true, |p| x > p - 1e-10);
                    if !in_range || !increasing {
                        outcome.status = CheckStatus::Fail;
                        outcome.witness = Some(Witness { point: point(x, y), value: x });
                        outcome.note = Some(if in_range {
                            "not strictly increasing".into()
                        } else {
                            "root outside [0, w]".into()
                        });
                        break;
                    }
                    prev = Some(x);
                }
                Err(e) => {
                    outcome.status = CheckStatus::Fail;
                    outcome.witness = Some(Witness { point: point(0.0, y), value: 0.0 });
                    outcome.note = Some(format!("no root: {e}"));
                    break;
                }
            }
        }
        outcome
    };

    let x_minus_nonincreasing = match (c, v) {
        (Some(c), Some(v)) => {
            let cv = c * v;
            let n = 64usize;
            let mut prev: Option<f64> = None;
            let mut outcome = CheckOutcome { status: CheckStatus::Pass, witness: None, note: None };
            for k in 0..=n {
                let y = z + (cv - z) * (k as f64) / (n as f64);
                match isocline_x_minus(sys, eq, v, y) {
                    Ok(x) => {
                        let in_range = (v - 1e-9..=w + 1e-9).contains(&x);
                        let nonincreasing = prev.map_or(true, |p| x <= p + 1e-10);
                        if !in_range || !nonincreasing {
                            outcome.status = CheckStatus::Fail;
                            outcome.witness = Some(Witness { point: point(x, y), value: x });
                            outcome.note = Some(if in_range {
                                "not nonincreasing".into()
                            } else {
                                "root outside [v, w]".into()
                            });
                            break;
                        }
                        prev = Some(x);
                    }
                    Err(e) => {
                        outcome.status = CheckStatus::Fail;
                        outcome.witness = Some(Witness { point: point(0.0, y), value: 0.0 });
                        outcome.note = Some(format!("no root: {e}"));
                        break;
                    }
                }
            }
            outcome
        }
        _ => CheckOutcome::skipped("slope or intersection unavailable"),
    };

    HypothesisReport {
        monotonicity,
        stationary,
        unstable_tangent,
        derivative_sign,
        derivative_sign_interval,
        isoclines: IsoclineReport { x_plus_increasing, x_minus_nonincreasing },
    }
}

/// Compute the bound `X`: the unique root of `H(X) = G(c·v)` in `(w, δ)`,
/// by bisection on the tabulated component and a Newton polish against
/// direct quadrature with the analytic `H'`.
///
/// Precondition: the hypothesis report passes (else
/// [`BoundError::HypothesisViolated`]).
pub fn heteroclinic_bound(
    sys: &SystemDefinition,
    eq: &Equilibrium,
    lyap: &LyapunovFunction,
    c: f64,
    v: f64,
    report: &HypothesisReport,
) -> Result<BoundResult, BoundError> {
    if !report.all_pass() {
        return Err(BoundError::HypothesisViolated { failed: report.failed_names() });
    }
    let w = eq.location.x;
    let cv = c * v;
    let level_exact = lyap.g_exact(sys, cv, 1e-13)?;
    let delta = detect_delta(sys, lyap);

    // Bracket on the table: H(w) = 0 < level, so f(w) < 0.
    let f_tbl = |x: f64| lyap.h_comp.eval("x", x).unwrap_or(f64::NAN) - level_exact;
    let sup = lyap.h_comp.eval("x", delta)?;
    if sup < level_exact {
        return Err(BoundError::NoRootInInterval { level: level_exact, sup });
    }
    let x0 = roots::bisect(&f_tbl, w, delta, 1e-8)?;

    // Newton polish against direct quadrature values with the analytic H'.
    let hp = lyapunov::h_prime_fn(sys, lyap.variant, lyap.anchors.y);
    let mut x = x0;
    let resid_tol = 1e-12 * (1.0 + level_exact.abs());
    for _ in 0..12 {
        let fx = lyap.h_exact(sys, x, 1e-14)? - level_exact;
        if fx.abs() <= resid_tol {
            break;
        }
        let d = hp(x);
        if d <= 0.0 || !d.is_finite() {
            break;
        }
        let next = (x - fx / d).clamp(w, delta);
        if next == x {
            break;
        }
        x = next;
    }

    Ok(BoundResult { c, v, cv, x, level_value: level_exact, delta, closed_form_x: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{load_model, CatalogEntry, ModelId};
    use crate::lyapunov::{build, select_variant};
    use std::collections::BTreeMap;

    struct Ctx {
        entry: CatalogEntry,
        eq: Equilibrium,
        lyap: LyapunovFunction,
    }

    fn ctx(id: ModelId) -> Ctx {
        let entry = load_model(id, &BTreeMap::new()).unwrap();
        let eq = entry.system.find_equilibrium(entry.closed.equilibrium).unwrap();
        let variant = select_variant(&entry.system, &eq, 33, 33).unwrap();
        let d = entry.system.domain;
        let lyap = build(&entry.system, &eq, variant, (0.0, d.x_max), (0.0, d.y_max)).unwrap();
        Ctx { entry, eq, lyap }
    }

    #[test]
    fn isocline_x_plus_identity_for_diagonal_g() {
        // G = y - x makes x+ the identity.
        let c = ctx(ModelId::Pp2);
        let x = isocline_x_plus(&c.entry.system, &c.eq, 0.5).unwrap();
        assert!((x - 0.5).abs() < 1e-12);
        let c1 = ctx(ModelId::Pp1);
        let x = isocline_x_plus(&c1.entry.system, &c1.eq, 1.0).unwrap();
        assert!((x - 1.0).abs() < 1e-12);
        // y = z lands on the equilibrium for every catalog model.
        for id in [ModelId::Classical, ModelId::Relativistic, ModelId::Pp1, ModelId::Pp2] {
            let c = ctx(id);
            let x = isocline_x_plus(&c.entry.system, &c.eq, c.eq.location.y).unwrap();
            assert!((x - c.eq.location.x).abs() < 1e-10, "{id}");
        }
    }

    #[test]
    fn isocline_x_minus_pp2_values() {
        let c = ctx(ModelId::Pp2);
        // Oracle: 2/(1+2x) = 2/3 at y = z = 1 gives x = 1.
        let x = isocline_x_minus(&c.entry.system, &c.eq, 0.5, 1.0).unwrap();
        assert!((x - 1.0).abs() < 1e-10);
        // H(v, 3v) = 0 gives 2v = 1, so at y = 3/2 the root is 1/2.
        let x = isocline_x_minus(&c.entry.system, &c.eq, 0.5, 1.5).unwrap();
        assert!((x - 0.5).abs() < 1e-10);
    }

    #[test]
    fn isocline_x_minus_classical_constant() {
        // H = 2 - x does not depend on y.
        let c = ctx(ModelId::Classical);
        for y in [2.0, 3.0, 4.5, 6.0] {
            let x = isocline_x_minus(&c.entry.system, &c.eq, 2.0, y).unwrap();
            assert!((x - 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn solve_v_catalog_values() {
        let c = ctx(ModelId::Pp2);
        let v = solve_v(&c.entry.system, &c.eq, 3.0).unwrap();
        assert!((v - 0.5).abs() < 1e-10);

        let c = ctx(ModelId::Pp1);
        let v = solve_v(&c.entry.system, &c.eq, 7.0).unwrap();
        // Root residual of 3 = 7 v^2 (1 + 2v).
        assert!((3.0 - 7.0 * v * v * (1.0 + 2.0 * v)).abs() <= 1e-10);

        let c = ctx(ModelId::Relativistic);
        let v = solve_v(&c.entry.system, &c.eq, 3.0).unwrap();
        // Oracle: 2 - 24 pi v - 24 pi v = 0 gives v = 1/(24 pi).
        assert!((v - 1.0 / (24.0 * std::f64::consts::PI)).abs() < 1e-12);
    }

    #[test]
    fn hypotheses_pp2_all_pass() {
        let c = ctx(ModelId::Pp2);
        let r = check_hypotheses(&c.entry.system, &c.eq, &c.lyap, Some(3.0), Some(0.5), (120, 120), 500);
        assert!(r.all_pass(), "failures: {:?}", r.failed_names());
        // As-stated readings that every worked model violates:
        assert!(!r.monotonicity.g_y_negative_as_stated.passed());
        assert!(!r.monotonicity.h_y_nonnegative_as_stated.passed());
    }

    #[test]
    fn hypotheses_classical_h_y_boundary() {
        let c = ctx(ModelId::Classical);
        let cc = 3.0;
        let v = solve_v(&c.entry.system, &c.eq, cc).unwrap();
        let r = check_hypotheses(&c.entry.system, &c.eq, &c.lyap, Some(cc), Some(v), (120, 120), 500);
        assert!(r.all_pass(), "failures: {:?}", r.failed_names());
        // H_y = 0: the non-strict readings pass on both sides.
        assert!(r.monotonicity.h_y_nonpositive.passed());
        assert!(r.monotonicity.h_y_nonnegative_as_stated.passed());
    }

    #[test]
    fn hypotheses_pp3_fails_origin_stationarity() {
        let c = ctx(ModelId::Pp3);
        let r = check_hypotheses(&c.entry.system, &c.eq, &c.lyap, None, None, (80, 80), 200);
        assert!(!r.all_pass());
        assert!(!r.stationary.cap_g_at_origin.passed());
        let wit = r.stationary.cap_g_at_origin.witness.as_ref().unwrap();
        // G(0,0) = -gamma = -1 at the defaults.
        assert!((wit.value + 1.0).abs() < 1e-15);
        assert!(r.failed_names().iter().any(|n| n.contains("G(0,0)")));
        // Checks needing c and v are skipped, not failed.
        assert_eq!(r.unstable_tangent.status, CheckStatus::Skipped);
    }

    #[test]
    fn bound_refused_without_all_pass() {
        let c = ctx(ModelId::Pp3);
        let r = check_hypotheses(&c.entry.system, &c.eq, &c.lyap, None, None, (40, 40), 100);
        let err = heteroclinic_bound(&c.entry.system, &c.eq, &c.lyap, 1.0, 0.2, &r).unwrap_err();
        assert!(matches!(err, BoundError::HypothesisViolated { .. }));
    }

    #[test]
    fn classical_bound_closed_form() {
        let c = ctx(ModelId::Classical);
        let cc = crate::linearize::unstable_slope_c(&c.entry.system).unwrap();
        assert!((cc - 3.0).abs() < 1e-15);
        let v = solve_v(&c.entry.system, &c.eq, cc).unwrap();
        assert!((v - 2.0).abs() < 1e-10);
        let r = check_hypotheses(&c.entry.system, &c.eq, &c.lyap, Some(cc), Some(v), (120, 120), 500);
        let b = heteroclinic_bound(&c.entry.system, &c.eq, &c.lyap, cc, v, &r).unwrap();
        let closed = 2.0 + 2.0 * (2.0 - 3f64.ln()).sqrt();
        assert!((b.x - closed).abs() < 1e-9, "X = {}, closed = {closed}", b.x);
        assert!(b.x < 4.0);
        assert!(b.x > c.eq.location.x);
    }

    #[test]
    fn pp2_bound_is_seven_quarters() {
        let c = ctx(ModelId::Pp2);
        let r = check_hypotheses(&c.entry.system, &c.eq, &c.lyap, Some(3.0), Some(0.5), (120, 120), 500);
        let b = heteroclinic_bound(&c.entry.system, &c.eq, &c.lyap, 3.0, 0.5, &r).unwrap();
        assert!((b.x - 1.75).abs() < 1e-9, "X = {}", b.x);
        // Level identity on the tables: |H(X) - G(cv)| <= 1e-10.
        let lhs = c.lyap.h_comp.eval("x", b.x).unwrap();
        let rhs = c.lyap.g_comp.eval("y", b.cv).unwrap();
        assert!((lhs - rhs).abs() <= 1e-10);
        // Equivalently through L: L(X, z) = L(w, cv).
        let l1 = c.lyap.eval(point(b.x, c.eq.location.y)).unwrap();
        let l2 = c.lyap.eval(point(c.eq.location.x, b.cv)).unwrap();
        assert!((l1 - l2).abs() <= 1e-10);
    }

    #[test]
    fn delta_detection_on_synthetic_hump() {
        // H(x, y) = (x - 1)(x - 3) with g = 1: the MinusPlus derivative
        // -H(x, z) is positive on (1, 3) and flips sign at delta = 3.
        let sys = SystemDefinition {
            name: "hump".into(),
            parameters: BTreeMap::new(),
            domain: crate::system::Domain { x_max: 5.0, y_max: 5.0 },
            g: Box::new(|_| 1.0),
            g_prime: Box::new(|_| 0.0),
            h: Box::new(|y| y),
            h_prime: Box::new(|_| 1.0),
            cap_g: Box::new(|x, y| y - x),
            cap_g_x: Box::new(|_, _| -1.0),
            cap_g_y: Box::new(|_, _| 1.0),
            cap_h: Box::new(|x, _| (x - 1.0) * (x - 3.0)),
            cap_h_x: Box::new(|x, _| 2.0 * x - 4.0),
            cap_h_y: Box::new(|_, _| 0.0),
        };
        let eq = sys.find_equilibrium(point(0.9, 0.9)).unwrap();
        assert!((eq.location.x - 1.0).abs() < 1e-10);
        // Tabulate only to 3.8: the component stays positive there while the
        // derivative sign change at 3 is interior to the table.
        let lyap = build(&sys, &eq, crate::lyapunov::Variant::MinusPlus, (0.5, 3.8), (0.5, 5.0))
            .unwrap();
        let delta = detect_delta(&sys, &lyap);
        assert!((delta - 3.0).abs() < 1e-6, "delta = {delta}");
    }
}
