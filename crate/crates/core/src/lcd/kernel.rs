use alloc::format;
use nalgebra::{DMatrix, DVector};

use super::SampleSet;
use crate::{Error, Result};

/// Gaussian kernel `K(y, m, b) = exp(-‖y − m‖² / (2b²))`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelParams {
    pub center: DVector<f64>,
    pub bandwidth: f64,
}

impl KernelParams {
    pub fn new(center: DVector<f64>, bandwidth: f64) -> Result<Self> {
        if !(bandwidth > 0.0) || !bandwidth.is_finite() {
            return Err(Error::InvalidArgument(format!("kernel bandwidth must be > 0, got {bandwidth}")));
        }
        Ok(Self { center, bandwidth })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        let sq: f64 = y.iter().zip(self.center.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
        libm::exp(-sq / (2.0 * self.bandwidth * self.bandwidth))
    }
}

/// LCD of `N(mean, cov)` at `(m, b)`.
///
/// The kernel is `(2πb²)^{d/2} N(y; m, b²I)`, so the integral collapses to
/// `b^d |cov + b²I|^{-1/2} exp(-½ (m−μ)ᵀ (cov + b²I)^{-1} (m−μ))`.
pub fn gaussian_lcd(mean: &DVector<f64>, cov: &DMatrix<f64>, kernel: &KernelParams) -> Result<f64> {
    let d = mean.len();
    if cov.nrows() != d || cov.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, actual: cov.nrows() });
    }
    if kernel.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, actual: kernel.dim() });
    }
    if cov.clone().cholesky().is_none() || (cov - cov.transpose()).abs().max() > 1e-12 * cov.abs().max() {
        return Err(Error::NotPositiveDefinite);
    }
    let b2 = kernel.bandwidth * kernel.bandwidth;
    let mut smoothed = cov.clone();
    for i in 0..d {
        smoothed[(i, i)] += b2;
    }
    let chol = smoothed.cholesky().ok_or(Error::NotPositiveDefinite)?;
    let delta = &kernel.center - mean;
    let z = chol.l().solve_lower_triangular(&delta).ok_or(Error::NotPositiveDefinite)?;
    let log_det: f64 = chol.l().diagonal().iter().map(|v| libm::log(*v)).sum::<f64>() * 2.0;
    let log_f = d as f64 * libm::log(kernel.bandwidth) - 0.5 * log_det - 0.5 * z.norm_squared();
    Ok(libm::exp(log_f))
}

/// LCD of the equally weighted Dirac mixture on the rows of `samples`.
pub fn dirac_lcd(samples: &SampleSet, kernel: &KernelParams) -> Result<f64> {
    if kernel.dim() != samples.dim() {
        return Err(Error::DimensionMismatch { expected: samples.dim(), actual: kernel.dim() });
    }
    let pts = samples.points();
    let two_b2 = 2.0 * kernel.bandwidth * kernel.bandwidth;
    let sum: f64 = (0..samples.count())
        .map(|i| {
            let sq: f64 = (0..samples.dim())
                .map(|j| {
                    let v = pts[(i, j)] - kernel.center[j];
                    v * v
                })
                .sum();
            libm::exp(-sq / two_b2)
        })
        .sum();
    Ok(sum / samples.count() as f64)
}
