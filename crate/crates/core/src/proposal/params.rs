use alloc::format;
use alloc::sync::Arc;
use nalgebra::{DMatrix, DVector};

use crate::linalg::{cholesky_lower, repair_spd, SpdRepair};
use crate::{Error, Result};

/// A fixed correlation matrix together with its lower Cholesky factor `A_ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Correlation {
    matrix: DMatrix<f64>,
    factor: DMatrix<f64>,
}

impl Correlation {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let n = matrix.nrows();
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch { expected: n, actual: matrix.ncols() });
        }
        if (0..n).any(|i| (matrix[(i, i)] - 1.0).abs() > 1e-12) {
            return Err(Error::InvalidArgument("correlation matrix needs a unit diagonal".into()));
        }
        if (&matrix - matrix.transpose()).abs().max() > 1e-12 {
            return Err(Error::InvalidArgument("correlation matrix is not symmetric".into()));
        }
        let factor = cholesky_lower(&matrix)?;
        Ok(Self { matrix, factor })
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: DMatrix::identity(dim, dim), factor: DMatrix::identity(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn factor(&self) -> &DMatrix<f64> {
        &self.factor
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CovarianceModel {
    /// `C = diag(σ) C_ρ diag(σ)` with `C_ρ` held fixed.
    FixedCorrelation { corr: Arc<Correlation>, sigmas: DVector<f64> },
    /// Free covariance with its cached lower Cholesky factor.
    Full { cov: DMatrix<f64>, factor: DMatrix<f64> },
}

/// Gaussian proposal `N(mean, C)` over flattened control sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct ProposalParams {
    mean: DVector<f64>,
    model: CovarianceModel,
}

impl ProposalParams {
    pub fn fixed_correlation(mean: DVector<f64>, corr: Arc<Correlation>, sigmas: DVector<f64>) -> Result<Self> {
        let d = mean.len();
        if corr.dim() != d || sigmas.len() != d {
            return Err(Error::DimensionMismatch { expected: d, actual: corr.dim().max(sigmas.len()) });
        }
        if sigmas.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
            return Err(Error::InvalidArgument("marginal standard deviations must be > 0".into()));
        }
        Ok(Self { mean, model: CovarianceModel::FixedCorrelation { corr, sigmas } })
    }

    pub fn full(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let d = mean.len();
        if cov.nrows() != d || cov.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, actual: cov.nrows() });
        }
        if (&cov - cov.transpose()).abs().max() > 1e-12 * cov.abs().max() {
            return Err(Error::NotPositiveDefinite);
        }
        let factor = cholesky_lower(&cov)?;
        Ok(Self { mean, model: CovarianceModel::Full { cov, factor } })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn model(&self) -> &CovarianceModel {
        &self.model
    }

    /// Marginal standard deviations.
    pub fn sigmas(&self) -> DVector<f64> {
        match &self.model {
            CovarianceModel::FixedCorrelation { sigmas, .. } => sigmas.clone(),
            CovarianceModel::Full { cov, .. } => cov.diagonal().map(libm::sqrt),
        }
    }

    pub fn covariance(&self) -> DMatrix<f64> {
        match &self.model {
            CovarianceModel::FixedCorrelation { corr, sigmas } => {
                DMatrix::from_fn(self.dim(), self.dim(), |i, j| sigmas[i] * corr.matrix()[(i, j)] * sigmas[j])
            }
            CovarianceModel::Full { cov, .. } => cov.clone(),
        }
    }

    /// `L` with `C = L Lᵀ`; `diag(σ) A_ρ` for the fixed-correlation model.
    pub fn sqrt_factor(&self) -> DMatrix<f64> {
        match &self.model {
            CovarianceModel::FixedCorrelation { corr, sigmas } => {
                let mut l = corr.factor().clone();
                for (i, mut row) in l.row_iter_mut().enumerate() {
                    row *= sigmas[i];
                }
                l
            }
            CovarianceModel::Full { factor, .. } => factor.clone(),
        }
    }

    pub fn with_mean(&self, mean: DVector<f64>) -> Result<Self> {
        if mean.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: mean.len() });
        }
        Ok(Self { mean, model: self.model.clone() })
    }
}

/// Which scale parameter the momentum blends in the variance-only update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum VarianceMomentum {
    /// `σ ← α σ + (1−α) σ_elite`
    #[default]
    StdDev,
    /// `σ² ← α σ² + (1−α) σ²_elite`
    Variance,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct UpdateOptions {
    pub variance_momentum: VarianceMomentum,
    /// Per-coordinate lower bound on σ; empty disables it.
    pub sigma_floor: DVector<f64>,
}

impl UpdateOptions {
    /// Floor at `1e-6 · σ₀`.
    pub fn with_floor_from(initial_sigmas: &DVector<f64>) -> Self {
        Self { variance_momentum: VarianceMomentum::default(), sigma_floor: initial_sigmas * 1e-6 }
    }

    fn floor(&self, i: usize) -> f64 {
        self.sigma_floor.get(i).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct UpdateStatus {
    /// At least one coordinate was raised to the σ floor.
    pub floored: bool,
    /// Jitter added to restore positive definiteness (full model).
    pub jitter: Option<f64>,
}

impl UpdateStatus {
    pub fn warning(&self) -> bool {
        self.floored || self.jitter.is_some()
    }
}

fn check_elite(params: &ProposalParams, elite: &DMatrix<f64>, min_rows: usize, alpha: f64) -> Result<()> {
    if elite.ncols() != params.dim() {
        return Err(Error::DimensionMismatch { expected: params.dim(), actual: elite.ncols() });
    }
    if elite.nrows() < min_rows {
        return Err(Error::InvalidArgument(format!(
            "update needs at least {min_rows} elite rows, got {}",
            elite.nrows()
        )));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!("momentum must lie in [0, 1], got {alpha}")));
    }
    Ok(())
}

fn blended_mean(params: &ProposalParams, elite: &DMatrix<f64>, alpha: f64) -> DVector<f64> {
    let k = elite.nrows() as f64;
    let elite_mean = DVector::from_fn(elite.ncols(), |j, _| elite.column(j).sum() / k);
    params.mean() * alpha + elite_mean * (1.0 - alpha)
}

/// Variance-only update with fixed correlation.
///
/// The mean is blended with momentum `α`; the elite variance is taken
/// about the new mean, then blended per [`VarianceMomentum`].
pub fn update_m1(
    params: &ProposalParams,
    elite: &DMatrix<f64>,
    alpha: f64,
    opts: &UpdateOptions,
) -> Result<(ProposalParams, UpdateStatus)> {
    check_elite(params, elite, 2, alpha)?;
    let CovarianceModel::FixedCorrelation { corr, sigmas } = params.model() else {
        return Err(Error::InvalidArgument("variance-only update needs the fixed-correlation model".into()));
    };
    if alpha == 1.0 {
        return Ok((params.clone(), UpdateStatus::default()));
    }
    let mean = blended_mean(params, elite, alpha);
    let k = elite.nrows() as f64;
    let mut status = UpdateStatus::default();
    let new_sigmas = DVector::from_fn(params.dim(), |j, _| {
        let var = elite.column(j).iter().map(|y| (y - mean[j]) * (y - mean[j])).sum::<f64>() / k;
        let sigma = match opts.variance_momentum {
            VarianceMomentum::StdDev => alpha * sigmas[j] + (1.0 - alpha) * libm::sqrt(var),
            VarianceMomentum::Variance => libm::sqrt(alpha * sigmas[j] * sigmas[j] + (1.0 - alpha) * var),
        };
        let floor = opts.floor(j);
        if sigma < floor || !(sigma > 0.0) {
            status.floored = true;
            floor.max(f64::MIN_POSITIVE)
        } else {
            sigma
        }
    });
    Ok((ProposalParams { mean, model: CovarianceModel::FixedCorrelation { corr: corr.clone(), sigmas: new_sigmas } }, status))
}

/// Full-covariance update: momentum blend of the old covariance and the
/// elite maximum-likelihood covariance about the new mean, repaired to SPD.
pub fn update_m2(
    params: &ProposalParams,
    elite: &DMatrix<f64>,
    alpha: f64,
    opts: &UpdateOptions,
) -> Result<(ProposalParams, UpdateStatus)> {
    let d = params.dim();
    check_elite(params, elite, d + 1, alpha)?;
    if alpha == 1.0 {
        return Ok((params.clone(), UpdateStatus::default()));
    }
    let mean = blended_mean(params, elite, alpha);
    let mut centered = elite.clone();
    for mut row in centered.row_iter_mut() {
        row -= mean.transpose();
    }
    let mle = centered.transpose() * &centered / elite.nrows() as f64;
    let mut cov = params.covariance() * alpha + mle * (1.0 - alpha);
    let mut status = UpdateStatus::default();
    for i in 0..d {
        let floor = opts.floor(i);
        if cov[(i, i)] < floor * floor {
            cov[(i, i)] = floor * floor;
            status.floored = true;
        }
    }
    let (cov, repair) = repair_spd(&cov)?;
    if let SpdRepair::Jitter(j) = repair {
        status.jitter = Some(j);
    }
    let factor = cholesky_lower(&cov)?;
    Ok((ProposalParams { mean, model: CovarianceModel::Full { cov, factor } }, status))
}
