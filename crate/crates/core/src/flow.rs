//! Trajectory integration: an embedded Dormand–Prince 5(4) pair with
//! adaptive step control, heteroclinic shooting from the origin's unstable
//! direction, and backward-time slope measurement.

use crate::linearize;
use crate::lyapunov::LyapunovFunction;
use crate::system::{point, Point, SystemDefinition};
use serde::{Deserialize, Serialize};
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FlowError {
    #[error("start point ({x}, {y}) outside the system domain")]
    StartOutsideDomain { x: f64, y: f64 },
    #[error("tolerances must lie in [1e-14, 1e-2]: rel={rel}, abs={abs}")]
    InvalidTolerance { rel: f64, abs: f64 },
    #[error("integration exceeded the step budget")]
    TooManySteps,
    #[error("origin hypotheses for shooting fail: {reason}")]
    NotASaddle { reason: String },
    #[error("shooting terminated with {termination:?} instead of reaching the attractor")]
    NoConvergence { termination: Termination },
    #[error("backward orbit never approached the origin (closest distance {closest})")]
    DidNotApproachOrigin { closest: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    ReachedAttractor,
    MaxTime,
    LeftDomain,
    StepUnderflow,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub state: Point,
    /// Absolute per-step error estimate of the accepted step that produced
    /// this sample (zero for the initial sample).
    pub step_error: f64,
    pub lyapunov: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub termination: Termination,
}

impl Trajectory {
    pub fn last_state(&self) -> Point {
        self.samples.last().expect("trajectory has at least the start sample").state
    }

    pub fn max_x(&self) -> f64 {
        self.samples.iter().map(|s| s.state.x).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Attach Lyapunov values where the state lies inside the tabulated
    /// region; samples outside keep `None`.
    pub fn attach_lyapunov(&mut self, lyap: &LyapunovFunction) {
        for s in &mut self.samples {
            s.lyapunov = lyap.eval(s.state).ok();
        }
    }

    /// Indices of an at-most-`max_points` subsample that always keeps the
    /// first and last sample; stride resampler for CSV/plot export.
    pub fn resampled_indices(&self, max_points: usize) -> Vec<usize> {
        let n = self.samples.len();
        if n <= max_points || max_points < 2 {
            return (0..n).collect();
        }
        let stride = n.div_ceil(max_points);
        let mut idx: Vec<usize> = (0..n).step_by(stride).collect();
        if *idx.last().unwrap() != n - 1 {
            idx.push(n - 1);
        }
        idx
    }
}

/// Write a trajectory as CSV (`t,x,y,err,L`), 17 significant digits; the
/// `L` field is empty for samples without an attached Lyapunov value.
pub fn write_csv<W: Write>(traj: &Trajectory, out: &mut W) -> std::io::Result<()> {
    writeln!(out, "t,x,y,err,L")?;
    for s in &traj.samples {
        match s.lyapunov {
            Some(l) => writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                s.t, s.state.x, s.state.y, s.step_error, l
            )?,
            None => writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},",
                s.t, s.state.x, s.state.y, s.step_error
            )?,
        }
    }
    Ok(())
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
// Error weights: 5th-order minus embedded 4th-order coefficients.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const MAX_STEPS: usize = 5_000_000;

type Vec2 = [f64; 2];

fn rhs(sys: &SystemDefinition, p: Vec2) -> Vec2 {
    let (vx, vy) = sys.eval_rhs_unchecked(point(p[0], p[1]));
    [vx, vy]
}

struct StopCriterion<'a> {
    target: Point,
    dist_tol: f64,
    /// Lyapunov gate derived from the local quadratic behaviour of L at the
    /// target; primary criterion, with the Euclidean distance as the guard.
    l_gate: Option<(f64, &'a LyapunovFunction)>,
}

impl StopCriterion<'_> {
    fn met(&self, p: Point) -> bool {
        if let Some((l_tol, lyap)) = &self.l_gate {
            if let Ok(l) = lyap.eval(p) {
                if l > *l_tol {
                    return false;
                }
            }
        }
        p.dist(&self.target) <= self.dist_tol
    }
}

fn check_tolerances(rel: f64, abs: f64) -> Result<(), FlowError> {
    let ok = |v: f64| (1e-14..=1e-2).contains(&v);
    if ok(rel) && ok(abs) {
        Ok(())
    } else {
        Err(FlowError::InvalidTolerance { rel, abs })
    }
}

/// Integrate from `p0` for a signed duration `t_end` (negative means
/// backward time). Terminates at `t_end` (`MaxTime`), on leaving the domain
/// (the exit sample is recorded), on step underflow, or when the optional
/// stop criterion fires (`ReachedAttractor`).
fn integrate_driver(
    sys: &SystemDefinition,
    p0: Point,
    t_end: f64,
    rel_tol: f64,
    abs_tol: f64,
    stop: Option<&StopCriterion>,
) -> Result<Trajectory, FlowError> {
    check_tolerances(rel_tol, abs_tol)?;
    if !sys.domain.contains(p0) {
        return Err(FlowError::StartOutsideDomain { x: p0.x, y: p0.y });
    }

    let dir = if t_end < 0.0 { -1.0 } else { 1.0 };
    let span = t_end.abs().max(1e-12);
    let mut samples = vec![Sample { t: 0.0, state: p0, step_error: 0.0, lyapunov: None }];

    if let Some(s) = stop {
        if s.met(p0) {
            return Ok(Trajectory { samples, termination: Termination::ReachedAttractor });
        }
    }
    if t_end == 0.0 {
        return Ok(Trajectory { samples, termination: Termination::MaxTime });
    }

    let mut t = 0.0f64;
    let mut y: Vec2 = [p0.x, p0.y];
    let mut k1 = rhs(sys, y);

    let fnorm = 1.0 + k1[0].hypot(k1[1]);
    let mut h = dir * (1e-4 * (1.0 + y[0].hypot(y[1])) / fnorm).min(0.1 * span).max(1e-10);

    let h_min = 1e-14 * span;
    let mut steps = 0usize;

    loop {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(FlowError::TooManySteps);
        }
        // Do not overshoot the end time.
        if (t + h - t_end) * dir > 0.0 {
            h = t_end - t;
        }
        if h.abs() < h_min {
            return Ok(Trajectory { samples, termination: Termination::StepUnderflow });
        }

        // Stage evaluations.
        let mut k = [[0.0f64; 2]; 7];
        k[0] = k1;
        let mut failed = false;
        for i in 0..6 {
            let mut yi = y;
            for (j, kj) in k.iter().enumerate().take(i + 1) {
                yi[0] += h * A[i][j] * kj[0];
                yi[1] += h * A[i][j] * kj[1];
            }
            let _ = C;
            let ki = rhs(sys, yi);
            if !(ki[0].is_finite() && ki[1].is_finite()) {
                failed = true;
                break;
            }
            k[i + 1] = ki;
        }

        // y_new uses the 6th stage row of A (FSAL construction).
        let y_new = if failed {
            [f64::NAN, f64::NAN]
        } else {
            let mut yn = y;
            for (j, kj) in k.iter().enumerate().take(6) {
                yn[0] += h * A[5][j] * kj[0];
                yn[1] += h * A[5][j] * kj[1];
            }
            yn
        };

        let err = if failed || !(y_new[0].is_finite() && y_new[1].is_finite()) {
            f64::INFINITY
        } else {
            let mut e2 = 0.0;
            for dim in 0..2 {
                let mut ei = 0.0;
                for (j, kj) in k.iter().enumerate() {
                    ei += E[j] * kj[dim];
                }
                ei *= h;
                let sk = abs_tol + rel_tol * y[dim].abs().max(y_new[dim].abs());
                e2 += (ei / sk) * (ei / sk);
            }
            (e2 / 2.0).sqrt()
        };

        if err <= 1.0 {
            // Accept.
            t += h;
            y = y_new;
            k1 = k[6];
            let state = point(y[0], y[1]);
            let scale = abs_tol + rel_tol * y[0].hypot(y[1]);
            samples.push(Sample { t, state, step_error: err * scale, lyapunov: None });

            if !sys.domain.contains(state) {
                return Ok(Trajectory { samples, termination: Termination::LeftDomain });
            }
            if let Some(s) = stop {
                if s.met(state) {
                    return Ok(Trajectory { samples, termination: Termination::ReachedAttractor });
                }
            }
            if (t - t_end) * dir >= 0.0 {
                return Ok(Trajectory { samples, termination: Termination::MaxTime });
            }
            let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
            h *= fac;
        } else {
            let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.2, 1.0) } else { 0.5 };
            h *= fac;
        }
    }
}

/// Adaptive integration for a signed duration `t_end`; negative `t_end`
/// integrates backward in time.
pub fn integrate(
    sys: &SystemDefinition,
    p0: Point,
    t_end: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Trajectory, FlowError> {
    integrate_driver(sys, p0, t_end, rel_tol, abs_tol, None)
}

/// Derive the Lyapunov gate level from the quadratic behaviour of L at the
/// target: `L ≈ ½ H''(w) dx² + ½ G''(z) dy²`.
fn lyapunov_gate(sys: &SystemDefinition, lyap: &LyapunovFunction, dist_tol: f64) -> Option<f64> {
    let (w, z) = (lyap.anchors.x, lyap.anchors.y);
    let s = lyap.variant.h_sign();
    let h2 = s * (sys.cap_h_x)(w, z) / (sys.g)(w);
    let g2 = -s * (sys.cap_g_y)(w, z) / (sys.h)(z);
    let min_curv = h2.min(g2);
    (min_curv > 0.0).then(|| 0.5 * min_curv * (2.0 * dist_tol) * (2.0 * dist_tol))
}

/// Integrate until within `dist_tol` of `target` (or `t_max`). When a
/// Lyapunov function is supplied, `L <= L_tol` is the primary stopping
/// gate with the Euclidean distance as the authoritative guard.
pub fn integrate_to_attractor(
    sys: &SystemDefinition,
    p0: Point,
    target: Point,
    lyap: Option<&LyapunovFunction>,
    dist_tol: f64,
    t_max: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Trajectory, FlowError> {
    let l_gate = lyap.and_then(|l| lyapunov_gate(sys, l, dist_tol).map(|tol| (tol, l)));
    let stop = StopCriterion { target, dist_tol, l_gate };
    integrate_driver(sys, p0, t_max, rel_tol, abs_tol, Some(&stop))
}

/// Shoot the heteroclinic orbit: start at `(eps, c·eps)` on the unstable
/// tangent ray of the origin saddle and integrate forward until within
/// `tol` of the interior attractor.
///
/// Origin hypotheses are verified first: `h(0) = 0`, `G(0,0) = 0` and a
/// saddle classification of the origin Jacobian.
pub fn shoot_heteroclinic(
    sys: &SystemDefinition,
    target: Point,
    lyap: Option<&LyapunovFunction>,
    c: f64,
    eps: f64,
    tol: f64,
) -> Result<Trajectory, FlowError> {
    if !(1e-8..=1e-2).contains(&eps) {
        return Err(FlowError::NotASaddle { reason: format!("eps = {eps} outside [1e-8, 1e-2]") });
    }
    let h0 = (sys.h)(0.0);
    if h0.abs() > 1e-12 {
        return Err(FlowError::NotASaddle { reason: format!("h(0) = {h0} != 0") });
    }
    let g00 = (sys.cap_g)(0.0, 0.0);
    if g00.abs() > 1e-12 {
        return Err(FlowError::NotASaddle { reason: format!("G(0,0) = {g00} != 0") });
    }
    let origin = sys.origin_equilibrium();
    let report = linearize::classify(&origin.jacobian);
    if report.classification != linearize::Classification::Saddle {
        return Err(FlowError::NotASaddle {
            reason: format!("origin classifies as {:?}", report.classification),
        });
    }

    let start = point(eps, c * eps);
    let traj = integrate_to_attractor(sys, start, target, lyap, tol, 1e3, 1e-10, 1e-13)?;
    if traj.termination != Termination::ReachedAttractor {
        return Err(FlowError::NoConvergence { termination: traj.termination });
    }
    Ok(traj)
}

/// Integrate backward from `p0` (for at most `t_back` time units, stopping
/// early if the orbit leaves the domain past the saddle) and return the
/// observable limit of the slope `y/x` on the approach to the origin.
///
/// The raw per-sample ratio is polluted at large radius by the curvature
/// of the unstable manifold and at small radius by the transversal drift
/// of a numerically perturbed orbit, so the returned value is taken at the
/// flattest point (plateau) of the slope sequence along the approach. If
/// the orbit never comes meaningfully closer to the origin than where it
/// started, the limit is not observable and `DidNotApproachOrigin` is
/// returned.
pub fn backward_slope(sys: &SystemDefinition, p0: Point, t_back: f64) -> Result<f64, FlowError> {
    let traj = integrate_driver(sys, p0, -t_back.abs(), 1e-11, 1e-14, None)?;
    let start_norm = p0.norm();

    // Closest approach over the first-quadrant part of the orbit.
    let mut idx_min = 0usize;
    let mut min_norm = f64::INFINITY;
    for (k, s) in traj.samples.iter().enumerate() {
        if s.state.x <= 0.0 || s.state.y < 0.0 {
            break;
        }
        let n = s.state.norm();
        if n < min_norm {
            min_norm = n;
            idx_min = k;
        }
    }
    if min_norm > 0.25 * start_norm {
        return Err(FlowError::DidNotApproachOrigin { closest: min_norm });
    }

    // Slopes along the approach, inside the asymptotic band.
    let band: Vec<f64> = traj.samples[..=idx_min]
        .iter()
        .filter(|s| s.state.x > 0.0 && s.state.norm() <= 0.25 * start_norm)
        .map(|s| s.state.y / s.state.x)
        .collect();
    if band.len() < 3 {
        let s = traj.samples[idx_min].state;
        return Ok(s.y / s.x);
    }
    let mut best = (1usize, f64::INFINITY);
    for k in 1..band.len() - 1 {
        let flatness = (band[k + 1] - band[k - 1]).abs();
        if flatness < best.1 {
            best = (k, flatness);
        }
    }
    Ok(band[best.0])
}
