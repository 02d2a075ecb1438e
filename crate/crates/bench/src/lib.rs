//! Shared fixtures for the kernel benchmarks.

use finsmooth_core::asymnorm;
use finsmooth_core::{AlgebraName, LieAlgebraModel, NormConstants, NormModel, Result};

/// Randers norm with drift `(0.5, 0)` on the plane.
pub fn planar_randers() -> Result<(NormModel, NormConstants)> {
    let norm = NormModel::randers(vec![0.5, 0.0])?;
    let consts = asymnorm::constants(&norm, 400)?;
    Ok((norm, consts))
}

/// Randers norm with a generic drift in three dimensions.
pub fn spatial_randers() -> Result<(NormModel, NormConstants)> {
    let norm = NormModel::randers(vec![0.2, -0.1, 0.3])?;
    let consts = asymnorm::constants(&norm, 400)?;
    Ok((norm, consts))
}

pub fn algebra(name: AlgebraName) -> LieAlgebraModel {
    LieAlgebraModel::named(name).expect("named algebras are valid")
}
