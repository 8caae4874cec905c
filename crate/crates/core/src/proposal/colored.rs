use alloc::vec::Vec;
use core::f64::consts::PI;
use nalgebra::DMatrix;

use crate::linalg::repair_spd;
use crate::{Error, Result};

/// Power-law noise `PSD(f) ∝ 1/f^β` over a horizon of `horizon` steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseColorSpec {
    pub beta: f64,
    pub horizon: usize,
    pub control_dim: usize,
}

impl NoiseColorSpec {
    pub fn dim(&self) -> usize {
        self.horizon * self.control_dim
    }
}

/// Lag autocorrelation `r[0..H)` of power-law noise, `r[0] = 1`.
///
/// The spectrum is sampled on the `2H`-point DFT grid, so every `H×H`
/// Toeplitz section is a principal block of a positive definite circulant.
/// The zero frequency reuses the value of the first nonzero one.
pub(crate) fn autocorrelation(beta: f64, horizon: usize) -> Vec<f64> {
    let m = 2 * horizon;
    let psd: Vec<f64> = (0..m)
        .map(|k| {
            let f = k.min(m - k).max(1) as f64 / m as f64;
            libm::pow(f, -beta)
        })
        .collect();
    let mut r: Vec<f64> = (0..horizon)
        .map(|lag| {
            psd.iter()
                .enumerate()
                .map(|(k, s)| s * libm::cos(2.0 * PI * (k * lag) as f64 / m as f64))
                .sum::<f64>()
        })
        .collect();
    let r0 = r[0];
    r.iter_mut().for_each(|v| *v /= r0);
    r[0] = 1.0;
    r
}

/// Block-diagonal Toeplitz correlation of the flattened sequence.
pub fn colored_correlation(spec: &NoiseColorSpec) -> Result<DMatrix<f64>> {
    if spec.horizon == 0 || spec.control_dim == 0 {
        return Err(Error::InvalidArgument("horizon and control_dim must be >= 1".into()));
    }
    if !(spec.beta >= 0.0) || !spec.beta.is_finite() {
        return Err(Error::InvalidArgument(alloc::format!("beta must be >= 0, got {}", spec.beta)));
    }
    let du = spec.control_dim;
    let dim = spec.dim();
    if spec.beta == 0.0 {
        return Ok(DMatrix::identity(dim, dim));
    }
    let r = autocorrelation(spec.beta, spec.horizon);
    let corr = DMatrix::from_fn(dim, dim, |i, j| {
        if i % du != j % du {
            0.0
        } else {
            r[(i / du).abs_diff(j / du)]
        }
    });
    let (mut repaired, _) = repair_spd(&corr)?;
    // Keep the unit diagonal exact even if jitter was needed.
    let scale: Vec<f64> = (0..dim).map(|i| 1.0 / libm::sqrt(repaired[(i, i)])).collect();
    for i in 0..dim {
        for j in 0..dim {
            repaired[(i, j)] *= scale[i] * scale[j];
        }
        repaired[(i, i)] = 1.0;
    }
    Ok(repaired)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::min_eigenvalue;

    fn spec(beta: f64, horizon: usize) -> NoiseColorSpec {
        NoiseColorSpec { beta, horizon, control_dim: 1 }
    }

    #[test]
    fn white_noise_is_identity() {
        let c = colored_correlation(&NoiseColorSpec { beta: 0.0, horizon: 7, control_dim: 2 }).unwrap();
        assert_eq!(c, DMatrix::identity(14, 14));
    }

    #[test]
    fn pink_noise_decays_with_lag() {
        let c = colored_correlation(&spec(1.0, 30)).unwrap();
        for lag in 1..30 {
            assert!(c[(0, lag)] <= c[(0, lag - 1)], "lag {lag}");
            // Toeplitz
            for i in 0..30 - lag {
                assert_eq!(c[(i, i + lag)], c[(0, lag)]);
            }
        }
        assert!(min_eigenvalue(&c) > 0.0);
    }

    #[test]
    fn weaker_color_correlates_less() {
        let weak = colored_correlation(&spec(0.25, 30)).unwrap();
        let pink = colored_correlation(&spec(1.0, 30)).unwrap();
        for lag in 1..30 {
            assert!(weak[(0, lag)].abs() < pink[(0, lag)].abs(), "lag {lag}");
        }
    }

    #[test]
    fn control_dims_are_uncorrelated() {
        let c = colored_correlation(&NoiseColorSpec { beta: 1.0, horizon: 5, control_dim: 2 }).unwrap();
        for i in 0..10 {
            for j in 0..10 {
                if i % 2 != j % 2 {
                    assert_eq!(c[(i, j)], 0.0);
                }
            }
        }
        assert_eq!(c[(0, 2)], c[(1, 3)]);
    }

    #[test]
    fn horizon_one() {
        assert_eq!(colored_correlation(&spec(2.0, 1)).unwrap(), DMatrix::identity(1, 1));
    }

    #[test]
    fn negative_beta_rejected() {
        assert!(colored_correlation(&spec(-0.5, 3)).is_err());
    }
}
