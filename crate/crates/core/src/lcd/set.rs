use alloc::format;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum SampleScheme {
    LcdOptimized,
    RandomGaussian,
}

impl SampleScheme {
    pub fn code(self) -> u8 {
        match self {
            SampleScheme::LcdOptimized => 0,
            SampleScheme::RandomGaussian => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(SampleScheme::LcdOptimized),
            1 => Some(SampleScheme::RandomGaussian),
            _ => None,
        }
    }
}

/// Addresses one cached set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SampleCacheKey {
    pub dim: usize,
    pub count: usize,
}

/// `N` points in `R^d`, one per row, approximating `N(0, I)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    points: DMatrix<f64>,
    scheme: SampleScheme,
    cvm_score: Option<f64>,
}

impl SampleSet {
    pub fn new(points: DMatrix<f64>, scheme: SampleScheme, cvm_score: Option<f64>) -> Result<Self> {
        if points.nrows() == 0 || points.ncols() == 0 {
            return Err(Error::InvalidArgument(format!(
                "sample set must be non-empty, got {}x{}",
                points.nrows(),
                points.ncols()
            )));
        }
        if points.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("sample set contains non-finite entries".into()));
        }
        if let Some(s) = cvm_score {
            if !(s >= 0.0) {
                return Err(Error::InvalidArgument(format!("negative cvm score {s}")));
            }
        }
        Ok(Self { points, scheme, cvm_score })
    }

    /// `count` i.i.d. standard-normal points.
    pub fn random_gaussian<R: Rng + ?Sized>(dim: usize, count: usize, rng: &mut R) -> Result<Self> {
        let points = DMatrix::from_fn(count, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        Self::new(points, SampleScheme::RandomGaussian, None)
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn count(&self) -> usize {
        self.points.nrows()
    }

    pub fn key(&self) -> SampleCacheKey {
        SampleCacheKey { dim: self.dim(), count: self.count() }
    }

    pub fn points(&self) -> &DMatrix<f64> {
        &self.points
    }

    pub fn scheme(&self) -> SampleScheme {
        self.scheme
    }

    pub fn cvm_score(&self) -> Option<f64> {
        self.cvm_score
    }

    pub fn into_points(self) -> DMatrix<f64> {
        self.points
    }

    pub fn column_means(&self) -> DVector<f64> {
        DVector::from_fn(self.dim(), |j, _| self.points.column(j).mean())
    }

    /// Empirical covariance with `1/N` normalization, about the sample mean.
    pub fn covariance(&self) -> DMatrix<f64> {
        let mean = self.column_means();
        let mut centered = self.points.clone();
        for mut row in centered.row_iter_mut() {
            row -= mean.transpose();
        }
        centered.transpose() * &centered / self.count() as f64
    }
}
