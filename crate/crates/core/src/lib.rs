//! Mollifier smoothing of strongly convex asymmetric norms on low-dimensional Lie algebras,
//! dual norms and their maximizers, and integration of coadjoint extremals with group reconstruction.

// `!(x > t)` is used on purpose so that NaN fails the test; indexed loops mirror structure-constant sums.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod asymnorm;
pub mod converge;
pub mod dualmax;
pub mod error;
pub mod extremal;
pub mod liealg;
pub mod mollify;
pub mod profile;
pub mod quadrature;
pub mod report;
pub mod sphere;
pub mod spline;
pub mod vecops;

pub use asymnorm::{GammaSource, Modulus, NormConstants, NormKind, NormModel};
pub use converge::{ConvergenceReport, SweepConfig};
pub use dualmax::{DualAnnulus, DualEval, LipschitzBudget};
pub use error::{Error, Result};
pub use extremal::{ExtremalTrajectory, GroupIntegrator, IntegrationOptions};
pub use liealg::{AlgebraName, GroupElement, LieAlgebraModel};
pub use mollify::{MollifiedNorm, Mollifier, SmoothingOptions};
pub use profile::{ProfileGrid, RadialProfile};
pub use report::CheckReport;
