//! Analysis of generalized planar Kolmogorov systems
//!
//! ```text
//!     x' = g(x)·G(x,y),    y' = h(y)·H(x,y)
//! ```
//!
//! The crate builds Lyapunov functions `L(x,y) = H(x) + G(y)` by adaptive
//! quadrature, classifies equilibria by trace/determinant, computes the
//! unstable-tangent slope of the origin saddle, derives the Lyapunov-level
//! bound `X` on the heteroclinic orbit and integrates / shoots trajectories.
//! A catalog ships five ready-made models from astrophysics (classical and
//! relativistic self-gravitating matter in Milne variables) and population
//! dynamics (three predator-prey variants).

pub mod bound;
pub mod catalog;
pub mod contour;
pub mod flow;
pub mod linearize;
pub mod lyapunov;
pub mod quad;
pub mod roots;
pub mod specfun;
pub mod system;

pub use catalog::{list_models, load_model, CatalogEntry, ModelId};
pub use linearize::{classify, unstable_slope_c, Classification, StabilityReport};
pub use lyapunov::{LyapunovFunction, Variant};
pub use specfun::{lambert_w, WBranch};
pub use system::{point, Domain, Equilibrium, Point, SystemDefinition};
