//! Equilibrium classification from the 2x2 Jacobian (trace / determinant /
//! discriminant) and the unstable-tangent slope of the origin saddle.

use crate::system::{EquilibriumClass, Mat2, SystemDefinition};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinearizeError {
    #[error("slope formula undefined: {reason}")]
    DivisionByZero { reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Saddle,
    StableNode,
    StableSpiral,
    UnstableNode,
    UnstableSpiral,
    CenterDegenerate,
}

impl Classification {
    pub fn coarse(self) -> EquilibriumClass {
        match self {
            Classification::Saddle => EquilibriumClass::Saddle,
            Classification::StableNode => EquilibriumClass::StableNode,
            Classification::StableSpiral => EquilibriumClass::StableSpiral,
            Classification::UnstableNode | Classification::UnstableSpiral => {
                EquilibriumClass::Unstable
            }
            Classification::CenterDegenerate => EquilibriumClass::Degenerate,
        }
    }

    pub fn is_stable(self) -> bool {
        matches!(self, Classification::StableNode | Classification::StableSpiral)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StabilityReport {
    pub trace: f64,
    pub determinant: f64,
    /// Δ = tr² − 4·det.
    pub discriminant: f64,
    pub eigenvalues: [Complex64; 2],
    pub classification: Classification,
}

/// Classify a finite 2x2 matrix by the sign table on (tr, det, Δ).
///
/// Eigenvalues come from the quadratic formula on the characteristic
/// polynomial λ² − tr·λ + det. A discriminant within `1e-12·(1+tr²)` of zero
/// is a repeated real eigenvalue and is resolved to the node side; the
/// `CenterDegenerate` label is reserved for the genuinely boundary cases
/// det ≈ 0 (zero eigenvalue) and tr ≈ 0 with det > 0 (center).
pub fn classify(j: &Mat2) -> StabilityReport {
    let trace = j[0][0] + j[1][1];
    let determinant = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let discriminant = trace * trace - 4.0 * determinant;

    let eigenvalues = if discriminant >= 0.0 {
        let s = discriminant.sqrt();
        [
            Complex64::new(0.5 * (trace - s), 0.0),
            Complex64::new(0.5 * (trace + s), 0.0),
        ]
    } else {
        let s = (-discriminant).sqrt();
        [
            Complex64::new(0.5 * trace, -0.5 * s),
            Complex64::new(0.5 * trace, 0.5 * s),
        ]
    };

    let frob2 = j.iter().flatten().map(|v| v * v).sum::<f64>();
    let disc_tol = 1e-12 * (1.0 + trace * trace);
    let det_tol = 1e-12 * (1.0 + frob2);
    let trace_tol = 1e-12 * (1.0 + frob2.sqrt());

    let classification = if determinant < -det_tol {
        Classification::Saddle
    } else if determinant.abs() <= det_tol {
        Classification::CenterDegenerate
    } else if trace.abs() <= trace_tol {
        Classification::CenterDegenerate
    } else {
        let stable = trace < 0.0;
        // Δ within tolerance of zero is a repeated root: a (degenerate) node.
        let spiral = discriminant < -disc_tol;
        match (stable, spiral) {
            (true, true) => Classification::StableSpiral,
            (true, false) => Classification::StableNode,
            (false, true) => Classification::UnstableSpiral,
            (false, false) => Classification::UnstableNode,
        }
    };

    StabilityReport { trace, determinant, discriminant, eigenvalues, classification }
}

/// Unstable-tangent slope of the origin saddle:
///
/// ```text
/// c = (H(0,0)·h'(0)/g(0) − G_x(0,0)) / G_y(0,0)
/// ```
///
/// the limiting ratio y/x of trajectories leaving the origin.
pub fn unstable_slope_c(sys: &SystemDefinition) -> Result<f64, LinearizeError> {
    let g0 = (sys.g)(0.0);
    if g0 == 0.0 {
        return Err(LinearizeError::DivisionByZero { reason: "g(0) = 0".into() });
    }
    let gy = (sys.cap_g_y)(0.0, 0.0);
    if gy == 0.0 {
        return Err(LinearizeError::DivisionByZero { reason: "G_y(0,0) = 0".into() });
    }
    let h00 = (sys.cap_h)(0.0, 0.0);
    let hp0 = (sys.h_prime)(0.0);
    let gx = (sys.cap_g_x)(0.0, 0.0);
    Ok((h00 * hp0 / g0 - gx) / gy)
}
