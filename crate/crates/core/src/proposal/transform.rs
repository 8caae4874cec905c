use nalgebra::DMatrix;

use super::{is_rotation, ProposalParams};
use crate::lcd::SampleSet;
use crate::{Error, Result};

/// Maps unit-Gaussian rows `x̃` to `ȳ + L R x̃` (rotation optional).
pub fn transform_points(
    base: &DMatrix<f64>,
    params: &ProposalParams,
    rotation: Option<&DMatrix<f64>>,
) -> Result<DMatrix<f64>> {
    let d = params.dim();
    if base.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, actual: base.ncols() });
    }
    let rotated = match rotation {
        Some(r) => {
            if r.nrows() != d || !is_rotation(r, 1e-8) {
                return Err(Error::InvalidArgument("rotation must be a DxD element of SO(D)".into()));
            }
            base * r.transpose()
        }
        None => base.clone(),
    };
    let l = params.sqrt_factor();
    let mut out = rotated * l.transpose();
    for mut row in out.row_iter_mut() {
        row += params.mean().transpose();
    }
    Ok(out)
}

pub fn transform_samples(
    base: &SampleSet,
    params: &ProposalParams,
    rotation: Option<&DMatrix<f64>>,
) -> Result<DMatrix<f64>> {
    transform_points(base.points(), params, rotation)
}
