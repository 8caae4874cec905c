//! Small dense linear-algebra helpers on top of nalgebra.

use alloc::format;
use nalgebra::{DMatrix, SymmetricEigen};

use crate::{Error, Result};

/// Outcome of [`repair_spd`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpdRepair {
    /// Input was already positive definite above the floor.
    Untouched,
    /// `jitter · I` was added.
    Jitter(f64),
}

impl SpdRepair {
    pub fn was_repaired(&self) -> bool {
        matches!(self, SpdRepair::Jitter(_))
    }
}

/// Relative eigenvalue floor, also the first jitter level.
pub const JITTER_START: f64 = 1e-10;
/// Largest relative jitter before giving up.
pub const JITTER_MAX: f64 = 1e-4;

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Lower Cholesky factor, or an error carrying basic conditioning info.
pub fn cholesky_lower(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), actual: m.ncols() });
    }
    match m.clone().cholesky() {
        Some(c) => Ok(c.l()),
        None => {
            let eig = SymmetricEigen::new(symmetrize(m)).eigenvalues;
            let lo = eig.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            Err(Error::SquareRoot(format!(
                "{}x{} matrix not positive definite (eigenvalues in [{lo:e}, {hi:e}])",
                m.nrows(),
                m.ncols()
            )))
        }
    }
}

/// Symmetrizes `m` and, if its smallest eigenvalue is below
/// `1e-10 · trace/D`, adds jitter `c · trace/D · I` with `c` escalating by
/// ×10 from `1e-10` to `1e-4`.
pub fn repair_spd(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, SpdRepair)> {
    let dim = m.nrows();
    let mut sym = symmetrize(m);
    let scale = sym.trace() / dim as f64;
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::NotPositiveDefinite);
    }
    let floor = JITTER_START * scale;
    let lo = min_eigenvalue(&sym);
    if lo >= floor && sym.clone().cholesky().is_some() {
        return Ok((sym, SpdRepair::Untouched));
    }
    let mut c = JITTER_START;
    while c <= JITTER_MAX * 1.000_001 {
        let jitter = c * scale;
        if lo + jitter >= floor {
            for i in 0..dim {
                sym[(i, i)] += jitter;
            }
            if sym.clone().cholesky().is_some() {
                return Ok((sym, SpdRepair::Jitter(jitter)));
            }
            for i in 0..dim {
                sym[(i, i)] -= jitter;
            }
        }
        c *= 10.0;
    }
    Err(Error::NotPositiveDefinite)
}
