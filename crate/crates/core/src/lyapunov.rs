//! Construction and evaluation of the Lyapunov function
//!
//! ```text
//!     L(x, y) = H(x) + G(y),   H(w) = G(z) = 0,
//! ```
//!
//! where the component derivatives are `H'(x) = ±H(x,z)/g(x)` and
//! `G'(y) = ∓G(w,y)/h(y)`, the sign pair picked by which monotonicity
//! hypothesis the system satisfies. Components are tabulated by adaptive
//! Gauss–Kronrod quadrature from the anchors and interpolated with cubic
//! Hermite segments built on the analytic derivative values.

use crate::quad::{self, QuadError};
use crate::system::{Equilibrium, Point, SystemDefinition};
use serde::{Deserialize, Serialize};
use std::io::Write;
use thiserror::Error;

/// Sign convention of the component derivatives:
///
/// * `PlusMinus`: `H' = +H(x,z)/g`, `G' = -G(w,y)/h`; valid when
///   `G_x·H_x(.,z) <= 0` and `H_y·G_y(w,.) >= 0` everywhere.
/// * `MinusPlus`: `H' = -H(x,z)/g`, `G' = +G(w,y)/h`; valid when
///   `G_x·H_x(.,z) >= 0` and `H_y·G_y(w,.) <= 0` everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    PlusMinus,
    MinusPlus,
}

impl Variant {
    /// Sign applied to `H(x,z)/g(x)` in the x-component derivative.
    pub fn h_sign(self) -> f64 {
        match self {
            Variant::PlusMinus => 1.0,
            Variant::MinusPlus => -1.0,
        }
    }
}

#[derive(Debug, Error)]
pub enum LyapunovError {
    #[error("neither sign variant holds: product {product} = {value} at ({x}, {y})")]
    NeitherVariant { product: &'static str, value: f64, x: f64, y: f64 },
    #[error("quadrature failure: {0}")]
    Quadrature(#[from] QuadError),
    #[error("{which} is nonpositive at {at}: tabulation interval invalid")]
    NonpositiveDenominator { which: &'static str, at: f64 },
    #[error("{axis} = {coord} outside tabulated interval [{lo}, {hi}]")]
    OutOfTable { axis: &'static str, coord: f64, lo: f64, hi: f64 },
    #[error("component not positive away from anchor: {axis} = {at} gives {value}")]
    NonpositiveComponent { axis: &'static str, at: f64, value: f64 },
    #[error("table grew past {0} nodes")]
    TableOverflow(usize),
}

/// Lower clip applied to a tabulation endpoint whose denominator vanishes
/// there (integrable logarithmic singularity, e.g. `h(y) = y` at `y = 0`).
pub const SINGULAR_EDGE_CLIP: f64 = 1e-6;

/// Absolute interpolation-error target for the component tables. Tighter
/// than the 1e-8 contract so that bound roots inherit little table error.
const INTERP_TOL: f64 = 1e-11;

const MAX_NODES: usize = 400_000;

/// Monotone-piecewise scalar function tabulated at adaptively chosen nodes,
/// with the analytic derivative stored per node; evaluation is cubic Hermite
/// on each segment.
#[derive(Debug, Clone)]
pub struct Table1d {
    xs: Vec<f64>,
    vals: Vec<f64>,
    slopes: Vec<f64>,
}

impl Table1d {
    pub fn lo(&self) -> f64 {
        self.xs[0]
    }

    pub fn hi(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..self.xs.len()).map(move |i| (self.xs[i], self.vals[i], self.slopes[i]))
    }

    fn locate(&self, axis: &'static str, x: f64) -> Result<f64, LyapunovError> {
        let (lo, hi) = (self.lo(), self.hi());
        let slack = 1e-9 * (1.0 + (hi - lo).abs());
        if x < lo - slack || x > hi + slack {
            return Err(LyapunovError::OutOfTable { axis, coord: x, lo, hi });
        }
        Ok(x.clamp(lo, hi))
    }

    pub fn eval(&self, axis: &'static str, x: f64) -> Result<f64, LyapunovError> {
        let x = self.locate(axis, x)?;
        if self.xs.len() == 1 {
            return Ok(self.vals[0]);
        }
        let i = match self.xs.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => return Ok(self.vals[i]),
            Err(i) => i.clamp(1, self.xs.len() - 1),
        };
        Ok(hermite(
            self.xs[i - 1],
            self.vals[i - 1],
            self.slopes[i - 1],
            self.xs[i],
            self.vals[i],
            self.slopes[i],
            x,
        ))
    }

    pub fn eval_deriv(&self, axis: &'static str, x: f64) -> Result<f64, LyapunovError> {
        let x = self.locate(axis, x)?;
        if self.xs.len() == 1 {
            return Ok(self.slopes[0]);
        }
        let i = match self.xs.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => return Ok(self.slopes[i]),
            Err(i) => i.clamp(1, self.xs.len() - 1),
        };
        Ok(hermite_deriv(
            self.xs[i - 1],
            self.vals[i - 1],
            self.slopes[i - 1],
            self.xs[i],
            self.vals[i],
            self.slopes[i],
            x,
        ))
    }
}

fn hermite(x0: f64, v0: f64, d0: f64, x1: f64, v1: f64, d1: f64, x: f64) -> f64 {
    let dx = x1 - x0;
    let t = (x - x0) / dx;
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * v0
        + (t3 - 2.0 * t2 + t) * dx * d0
        + (-2.0 * t3 + 3.0 * t2) * v1
        + (t3 - t2) * dx * d1
}

fn hermite_deriv(x0: f64, v0: f64, d0: f64, x1: f64, v1: f64, d1: f64, x: f64) -> f64 {
    let dx = x1 - x0;
    let t = (x - x0) / dx;
    let t2 = t * t;
    ((6.0 * t2 - 6.0 * t) * v0
        + (3.0 * t2 - 4.0 * t + 1.0) * dx * d0
        + (-6.0 * t2 + 6.0 * t) * v1
        + (3.0 * t2 - 2.0 * t) * dx * d1)
        / dx
}

/// The pair (H, G) with its variant tag and anchors `H(w) = G(z) = 0`.
/// Immutable after [`build`]; evaluation is pure and thread-safe.
#[derive(Debug, Clone)]
pub struct LyapunovFunction {
    pub variant: Variant,
    pub h_comp: Table1d,
    pub g_comp: Table1d,
    pub anchors: Point,
}

impl LyapunovFunction {
    /// `L(p) = H(p.x) + G(p.y)`.
    pub fn eval(&self, p: Point) -> Result<f64, LyapunovError> {
        Ok(self.h_comp.eval("x", p.x)? + self.g_comp.eval("y", p.y)?)
    }

    /// High-accuracy x-component value by direct quadrature from the anchor
    /// (bypasses the interpolation table).
    pub fn h_exact(
        &self,
        sys: &SystemDefinition,
        x: f64,
        tol: f64,
    ) -> Result<f64, LyapunovError> {
        let d = h_prime_fn(sys, self.variant, self.anchors.y);
        let (v, _) = quad::integrate_adaptive(&d, self.anchors.x, x, tol)?;
        Ok(v)
    }

    /// High-accuracy y-component value by direct quadrature from the anchor.
    pub fn g_exact(
        &self,
        sys: &SystemDefinition,
        y: f64,
        tol: f64,
    ) -> Result<f64, LyapunovError> {
        let d = g_prime_fn(sys, self.variant, self.anchors.x);
        let (v, _) = quad::integrate_adaptive(&d, self.anchors.y, y, tol)?;
        Ok(v)
    }
}

/// Analytic `H'(x) = ±H(x,z)/g(x)` for the given variant.
pub fn h_prime_fn<'a>(
    sys: &'a SystemDefinition,
    variant: Variant,
    z: f64,
) -> impl Fn(f64) -> f64 + 'a {
    let sign = variant.h_sign();
    move |x| sign * (sys.cap_h)(x, z) / (sys.g)(x)
}

/// Analytic `G'(y) = ∓G(w,y)/h(y)` for the given variant.
pub fn g_prime_fn<'a>(
    sys: &'a SystemDefinition,
    variant: Variant,
    w: f64,
) -> impl Fn(f64) -> f64 + 'a {
    let sign = -variant.h_sign();
    move |y| sign * (sys.cap_g)(w, y) / (sys.h)(y)
}

/// Decide which sign variant's hypotheses hold on a probe grid over the
/// domain. Evaluates `G_x`, `H_y` at `(x, y)`, `H_x` at `(x, z)` and `G_y`
/// at `(w, y)` per the superscript convention. If both variants hold (all
/// products within rounding of zero) the `MinusPlus` convention is
/// preferred.
pub fn select_variant(
    sys: &SystemDefinition,
    eq: &Equilibrium,
    nx: usize,
    ny: usize,
) -> Result<Variant, LyapunovError> {
    let (w, z) = (eq.location.x, eq.location.y);
    let d = sys.domain;
    let mut p1 = Vec::with_capacity(nx * ny);
    let mut p2 = Vec::with_capacity(nx * ny);
    for i in 0..nx {
        let x = d.x_max * (i as f64) / ((nx - 1) as f64);
        for j in 0..ny {
            let y = d.y_max * (j as f64) / ((ny - 1) as f64);
            p1.push((x, y, (sys.cap_g_x)(x, y) * (sys.cap_h_x)(x, z)));
            p2.push((x, y, (sys.cap_h_y)(x, y) * (sys.cap_g_y)(w, y)));
        }
    }
    let scale1 = p1.iter().map(|t| t.2.abs()).fold(0.0, f64::max);
    let scale2 = p2.iter().map(|t| t.2.abs()).fold(0.0, f64::max);
    let tol1 = 1e-12 * (1.0 + scale1);
    let tol2 = 1e-12 * (1.0 + scale2);

    let plus_minus = p1.iter().all(|t| t.2 <= tol1) && p2.iter().all(|t| t.2 >= -tol2);
    let minus_plus = p1.iter().all(|t| t.2 >= -tol1) && p2.iter().all(|t| t.2 <= tol2);

    match (plus_minus, minus_plus) {
        // Zero-product tie resolves to MinusPlus.
        (_, true) => Ok(Variant::MinusPlus),
        (true, false) => Ok(Variant::PlusMinus),
        (false, false) => {
            // Report the worst violator of whichever product is closer to
            // admissible under the MinusPlus reading.
            let worst1 = p1.iter().min_by(|a, b| a.2.total_cmp(&b.2)).unwrap();
            let worst2 = p2.iter().max_by(|a, b| a.2.total_cmp(&b.2)).unwrap();
            if -worst1.2 >= worst2.2 {
                Err(LyapunovError::NeitherVariant {
                    product: "G_x * H_x(., z)",
                    value: worst1.2,
                    x: worst1.0,
                    y: worst1.1,
                })
            } else {
                Err(LyapunovError::NeitherVariant {
                    product: "H_y * G_y(w, .)",
                    value: worst2.2,
                    x: worst2.0,
                    y: worst2.1,
                })
            }
        }
    }
}

/// Tabulate both components over the given 1-D intervals (which must contain
/// the anchors). An interval endpoint where the denominator vanishes is
/// clipped inward by [`SINGULAR_EDGE_CLIP`].
pub fn build(
    sys: &SystemDefinition,
    eq: &Equilibrium,
    variant: Variant,
    x_interval: (f64, f64),
    y_interval: (f64, f64),
) -> Result<LyapunovFunction, LyapunovError> {
    let (w, z) = (eq.location.x, eq.location.y);

    let x_iv = clip_interval(x_interval, w, |x| (sys.g)(x), "g")?;
    let y_iv = clip_interval(y_interval, z, |y| (sys.h)(y), "h")?;

    let hp = h_prime_fn(sys, variant, z);
    let gp = g_prime_fn(sys, variant, w);
    let h_comp = build_component(&hp, w, x_iv.0, x_iv.1)?;
    let g_comp = build_component(&gp, z, y_iv.0, y_iv.1)?;

    validate_positive(&h_comp, w, "x")?;
    validate_positive(&g_comp, z, "y")?;

    Ok(LyapunovFunction { variant, h_comp, g_comp, anchors: Point { x: w, y: z } })
}

fn clip_interval(
    (mut lo, hi): (f64, f64),
    anchor: f64,
    denom: impl Fn(f64) -> f64,
    which: &'static str,
) -> Result<(f64, f64), LyapunovError> {
    if denom(lo) == 0.0 {
        lo = lo.max(SINGULAR_EDGE_CLIP);
    }
    if lo > anchor || hi < anchor {
        return Err(LyapunovError::NonpositiveDenominator { which, at: anchor });
    }
    // The denominator must be strictly positive across the (clipped) span.
    let n = 257;
    for i in 0..=n {
        let x = lo + (hi - lo) * (i as f64) / (n as f64);
        if denom(x) <= 0.0 {
            return Err(LyapunovError::NonpositiveDenominator { which, at: x });
        }
    }
    Ok((lo, hi))
}

fn validate_positive(t: &Table1d, anchor: f64, axis: &'static str) -> Result<(), LyapunovError> {
    for (x, v, _) in t.nodes() {
        if x == anchor {
            continue;
        }
        if v <= 0.0 {
            return Err(LyapunovError::NonpositiveComponent { axis, at: x, value: v });
        }
    }
    Ok(())
}

/// Tabulate the antiderivative of `deriv` anchored at `anchor` (value 0)
/// over `[lo, hi]`. Nodes are refined until the Hermite interpolant matches
/// a direct quadrature midpoint value to [`INTERP_TOL`].
fn build_component(
    deriv: &dyn Fn(f64) -> f64,
    anchor: f64,
    lo: f64,
    hi: f64,
) -> Result<Table1d, LyapunovError> {
    if lo == hi {
        return Ok(Table1d { xs: vec![anchor], vals: vec![0.0], slopes: vec![deriv(anchor)] });
    }
    let span = hi - lo;
    let mut nodes: Vec<(f64, f64, f64)> = vec![(anchor, 0.0, deriv(anchor))];

    for (from, to) in [(anchor, hi), (anchor, lo)] {
        if (to - from).abs() == 0.0 {
            continue;
        }
        let mut v_run = 0.0;
        let initial = 8usize;
        for k in 0..initial {
            let a = from + (to - from) * (k as f64) / (initial as f64);
            let b = from + (to - from) * ((k + 1) as f64) / (initial as f64);
            v_run = fill_segment(deriv, a, b, v_run, span, &mut nodes, 0)?;
            if nodes.len() > MAX_NODES {
                return Err(LyapunovError::TableOverflow(MAX_NODES));
            }
        }
    }

    nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
    nodes.dedup_by(|a, b| a.0 == b.0);
    let xs: Vec<f64> = nodes.iter().map(|n| n.0).collect();
    let vals: Vec<f64> = nodes.iter().map(|n| n.1).collect();
    let slopes: Vec<f64> = nodes.iter().map(|n| n.2).collect();
    Ok(Table1d { xs, vals, slopes })
}

/// Extend the table across `[a, b]` (either orientation), starting from the
/// running value `v_a` at `a`; returns the value at `b`. Splits recursively
/// while the Hermite midpoint prediction misses the quadrature value.
fn fill_segment(
    deriv: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    v_a: f64,
    span: f64,
    nodes: &mut Vec<(f64, f64, f64)>,
    depth: usize,
) -> Result<f64, LyapunovError> {
    let len = (b - a).abs();
    let seg_tol = (1e-11 * len / span).max(1e-16);
    let mid = 0.5 * (a + b);
    let (i_left, _) = quad::integrate_adaptive(deriv, a, mid, seg_tol * 0.5)?;
    let (i_right, _) = quad::integrate_adaptive(deriv, mid, b, seg_tol * 0.5)?;
    let v_mid = v_a + i_left;
    let v_b = v_mid + i_right;
    let (d_a, d_b) = (deriv(a), deriv(b));

    let predicted = hermite(a, v_a, d_a, b, v_b, d_b, mid);
    let converged = (predicted - v_mid).abs() <= INTERP_TOL
        || depth >= 48
        || len <= 1e-12 * span
        || nodes.len() > MAX_NODES;

    if converged {
        nodes.push((b, v_b, d_b));
        Ok(v_b)
    } else {
        let v_mid = fill_segment(deriv, a, mid, v_a, span, nodes, depth + 1)?;
        fill_segment(deriv, mid, b, v_mid, span, nodes, depth + 1)
    }
}

/// Orbital derivative of `L` at `p`, alongside the mean-value closed form.
#[derive(Debug, Clone, Copy)]
pub struct OrbitalDerivative {
    /// Chain-rule value `x'·H'(x) + y'·G'(y)`; the `g`, `h` factors cancel
    /// exactly against the denominators, leaving
    /// `±(G(x,y)·H(x,z) − H(x,y)·G(w,y))`.
    pub value: f64,
    /// `±(G_x·H_x(.,z)·(x−w)² − H_y·G_y(w,.)·(y−z)²)` with the partials
    /// taken at `p` rather than at the (uncomputable) mean-value points;
    /// advisory cross-check only.
    pub mvt_form: f64,
}

/// Derivative of `t ↦ L(x(t), y(t))` along the flow, evaluated at `p`.
pub fn orbital_derivative(
    sys: &SystemDefinition,
    lyap: &LyapunovFunction,
    p: Point,
) -> Result<OrbitalDerivative, LyapunovError> {
    // Contract ties evaluation to the tabulated region.
    lyap.h_comp.locate("x", p.x)?;
    lyap.g_comp.locate("y", p.y)?;

    let (w, z) = (lyap.anchors.x, lyap.anchors.y);
    let sign = lyap.variant.h_sign();
    let value = sign
        * ((sys.cap_g)(p.x, p.y) * (sys.cap_h)(p.x, z)
            - (sys.cap_h)(p.x, p.y) * (sys.cap_g)(w, p.y));
    let dx = p.x - w;
    let dy = p.y - z;
    let mvt_form = sign
        * ((sys.cap_g_x)(p.x, p.y) * (sys.cap_h_x)(p.x, z) * dx * dx
            - (sys.cap_h_y)(p.x, p.y) * (sys.cap_g_y)(w, p.y) * dy * dy);
    Ok(OrbitalDerivative { value, mvt_form })
}

/// Write one component table as CSV (`coordinate,value,derivative`),
/// 17 significant digits per float.
pub fn write_component_csv<W: Write>(table: &Table1d, out: &mut W) -> std::io::Result<()> {
    writeln!(out, "coordinate,value,derivative")?;
    for (x, v, d) in table.nodes() {
        writeln!(out, "{x:.16e},{v:.16e},{d:.16e}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{load_model, ModelId};
    use crate::system::point;
    use std::collections::BTreeMap;

    fn entry(id: ModelId) -> crate::catalog::CatalogEntry {
        load_model(id, &BTreeMap::new()).unwrap()
    }

    fn interior(e: &crate::catalog::CatalogEntry) -> Equilibrium {
        e.system.find_equilibrium(e.closed.equilibrium).unwrap()
    }

    #[test]
    fn classical_selects_minus_plus() {
        // Sign-table oracle: G_x = -1, H_x(., z) = -1 so the product is +1;
        // H_y = 0. Only the MinusPlus hypotheses hold.
        let e = entry(ModelId::Classical);
        let eq = interior(&e);
        let v = select_variant(&e.system, &eq, 33, 33).unwrap();
        assert_eq!(v, Variant::MinusPlus);
    }

    #[test]
    fn pp3_selects_minus_plus() {
        // G_x = 0 kills the first product; H_y·G_y(w,.) = (-alpha/m)·delta < 0.
        let e = entry(ModelId::Pp3);
        let eq = interior(&e);
        let v = select_variant(&e.system, &eq, 33, 33).unwrap();
        assert_eq!(v, Variant::MinusPlus);
    }

    #[test]
    fn hypothetical_plus_minus_system() {
        // G = y - x (G_x < 0), H = x + y - 2 (H_x > 0, H_y > 0): the
        // PlusMinus products are -1 <= 0 and +1 >= 0 everywhere.
        let sys = SystemDefinition {
            name: "hypothetical".into(),
            parameters: BTreeMap::new(),
            domain: crate::system::Domain { x_max: 3.0, y_max: 3.0 },
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
        };
        let eq = sys.find_equilibrium(point(0.9, 1.1)).unwrap();
        let v = select_variant(&sys, &eq, 17, 17).unwrap();
        assert_eq!(v, Variant::PlusMinus);
    }

    #[test]
    fn classical_table_matches_closed_form() {
        let e = entry(ModelId::Classical);
        let eq = interior(&e);
        let lyap = build(&e.system, &eq, Variant::MinusPlus, (0.1, 4.0), (0.1, 4.0)).unwrap();
        for i in 0..=390 {
            let x = 0.1 + (i as f64) * 0.01;
            let got = lyap.h_comp.eval("x", x).unwrap();
            let want = 0.5 * (x - 2.0) * (x - 2.0);
            assert!((got - want).abs() < 1e-8, "x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn pp2_g_table_matches_closed_form() {
        let e = entry(ModelId::Pp2);
        let eq = interior(&e);
        let lyap = build(&e.system, &eq, Variant::MinusPlus, (0.1, 4.0), (0.1, 4.0)).unwrap();
        for i in 0..=390 {
            let y = 0.1 + (i as f64) * 0.01;
            let got = lyap.g_comp.eval("y", y).unwrap();
            let want = y - y.ln() - 1.0;
            assert!((got - want).abs() < 1e-8, "y={y}: {got} vs {want}");
        }
    }

    #[test]
    fn degenerate_interval_is_identically_zero() {
        let e = entry(ModelId::Classical);
        let eq = interior(&e);
        let lyap = build(&e.system, &eq, Variant::MinusPlus, (2.0, 2.0), (0.1, 4.0)).unwrap();
        assert_eq!(lyap.h_comp.eval("x", 2.0).unwrap(), 0.0);
        assert!(lyap.h_comp.eval("x", 2.5).is_err());
    }

    #[test]
    fn eval_at_anchor_and_samples() {
        let e = entry(ModelId::Classical);
        let eq = interior(&e);
        let sysdom = e.system.domain;
        let lyap = build(
            &e.system,
            &eq,
            Variant::MinusPlus,
            (0.0, sysdom.x_max),
            (0.0, sysdom.y_max),
        )
        .unwrap();
        assert_eq!(lyap.eval(point(2.0, 2.0)).unwrap(), 0.0);
        // Oracle: closed form (4-2)^2/2 + 0 = 2.
        let v = lyap.eval(point(4.0, 2.0)).unwrap();
        assert!((v - 2.0).abs() < 1e-9, "{v}");
        // pp2 value at (1, 3/2): 1/2 - ln(3/2).
        let e2 = entry(ModelId::Pp2);
        let eq2 = interior(&e2);
        let l2 = build(&e2.system, &eq2, Variant::MinusPlus, (0.0, 4.0), (0.0, 8.0)).unwrap();
        let v2 = l2.eval(point(1.0, 1.5)).unwrap();
        assert!((v2 - (0.5 - 1.5f64.ln())).abs() < 1e-9, "{v2}");
    }

    #[test]
    fn orbital_derivative_classical() {
        let e = entry(ModelId::Classical);
        let eq = interior(&e);
        let lyap = build(&e.system, &eq, Variant::MinusPlus, (0.0, 8.0), (0.0, 16.0)).unwrap();
        // At the anchor the derivative vanishes.
        let od = orbital_derivative(&e.system, &lyap, point(2.0, 2.0)).unwrap();
        assert_eq!(od.value, 0.0);
        // Direct arithmetic with the closed forms: the classical chain rule
        // collapses to -(x-2)^2, so at (3,1) the value is -1.
        let od = orbital_derivative(&e.system, &lyap, point(3.0, 1.0)).unwrap();
        assert!((od.value - (-1.0)).abs() < 1e-13, "{}", od.value);
        assert!(od.value < 0.0);
        // H is affine in each variable, so the pointwise mean-value form is
        // exact here as well.
        assert!((od.mvt_form - (-1.0)).abs() < 1e-13);
        // Sweep: -(x-2)^2 everywhere on a small grid.
        for (x, y) in [(0.5, 0.5), (1.0, 3.0), (2.5, 7.0), (4.0, 0.2)] {
            let od = orbital_derivative(&e.system, &lyap, point(x, y)).unwrap();
            let want = -(x - 2.0) * (x - 2.0);
            assert!((od.value - want).abs() < 1e-12);
        }
    }

    #[test]
    fn out_of_table_reported() {
        let e = entry(ModelId::Pp2);
        let eq = interior(&e);
        let lyap = build(&e.system, &eq, Variant::MinusPlus, (0.5, 2.0), (0.5, 2.0)).unwrap();
        assert!(matches!(
            lyap.eval(point(3.0, 1.0)),
            Err(LyapunovError::OutOfTable { axis: "x", .. })
        ));
        assert!(matches!(
            orbital_derivative(&e.system, &lyap, point(1.0, 4.0)),
            Err(LyapunovError::OutOfTable { axis: "y", .. })
        ));
    }

    #[test]
    fn csv_export_shape() {
        let e = entry(ModelId::Pp2);
        let eq = interior(&e);
        let lyap = build(&e.system, &eq, Variant::MinusPlus, (0.5, 2.0), (0.5, 2.0)).unwrap();
        let mut buf = Vec::new();
        write_component_csv(&lyap.h_comp, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("coordinate,value,derivative"));
        let first = lines.next().unwrap();
        assert_eq!(first.split(',').count(), 3);
    }
}
