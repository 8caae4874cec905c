use alloc::format;

use crate::proposal::{VarianceMomentum, VarietyScheme};
use crate::{Error, Result};

/// How the proposal is refit to the elite set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Adaptation {
    /// Fixed correlation, adaptive per-coordinate standard deviations.
    M1,
    /// Full covariance.
    M2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum SamplerKind {
    /// Independent Gaussian draws every iteration.
    Random,
    /// A precomputed sample set varied by the given scheme.
    Deterministic(VarietyScheme),
}

/// Hyperparameters of one CEM optimizer.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CemConfig {
    pub n_samples: usize,
    pub n_elite: usize,
    pub n_iter: usize,
    /// Weight of the previous parameters in each update, `α ∈ [0, 1)`.
    pub momentum: f64,
    /// Fraction of the elite set carried into the next MPC step.
    pub elite_carry_fraction: f64,
    /// Also re-inject that fraction of elites into the next iteration of the
    /// same step.
    pub keep_elites_within_step: bool,
    /// Sample-count decay `η ≥ 1`; 1 disables decay.
    pub decay: f64,
    pub sampler: SamplerKind,
    pub adaptation: Adaptation,
    pub variance_momentum: VarianceMomentum,
    /// Control appended by the warm-start shift.
    pub u_init: f64,
}

impl CemConfig {
    fn base(n_samples: usize, n_elite: usize, sampler: SamplerKind, adaptation: Adaptation) -> Self {
        Self {
            n_samples,
            n_elite,
            n_iter: 3,
            momentum: 0.1,
            elite_carry_fraction: 0.3,
            keep_elites_within_step: true,
            decay: 1.0,
            sampler,
            adaptation,
            variance_momentum: VarianceMomentum::StdDev,
            u_init: 0.0,
        }
    }

    /// Random colored-noise sampling with variance adaptation, decay disabled.
    pub fn icem(n_samples: usize) -> Self {
        Self::base(n_samples, 10, SamplerKind::Random, Adaptation::M1)
    }

    /// Deterministic sampling with variance adaptation.
    pub fn dscem_var(n_samples: usize, scheme: VarietyScheme) -> Self {
        Self::base(n_samples, 10, SamplerKind::Deterministic(scheme), Adaptation::M1)
    }

    /// Deterministic sampling (per-step rotated joint set) with full
    /// covariance adaptation; needs more elites.
    pub fn dscem_cov(n_samples: usize) -> Self {
        Self::base(n_samples, 40, SamplerKind::Deterministic(VarietyScheme::Combined), Adaptation::M2)
    }

    /// Number of elites carried between MPC steps (and iterations).
    pub fn carried_count(&self) -> usize {
        libm::floor(self.elite_carry_fraction * self.n_elite as f64 + 1e-9) as usize
    }

    /// Checks the configuration for a problem of dimension `dim`.
    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.n_iter == 0 {
            return Err(Error::NoIterations);
        }
        let bad = |msg: alloc::string::String| Err(Error::InvalidArgument(msg));
        if dim == 0 {
            return bad("problem dimension must be >= 1".into());
        }
        if self.n_elite < 2 || self.n_elite > self.n_samples {
            return bad(format!("need 2 <= K <= N, got K={} N={}", self.n_elite, self.n_samples));
        }
        if self.adaptation == Adaptation::M2 && self.n_elite < dim + 1 {
            return bad(format!("full covariance needs K >= D+1 = {}, got K={}", dim + 1, self.n_elite));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return bad(format!("momentum must lie in [0, 1), got {}", self.momentum));
        }
        if !(0.0..=1.0).contains(&self.elite_carry_fraction) {
            return bad(format!("elite carry fraction must lie in [0, 1], got {}", self.elite_carry_fraction));
        }
        if !(self.decay >= 1.0) || !self.decay.is_finite() {
            return bad(format!("decay must be finite and >= 1, got {}", self.decay));
        }
        if !self.u_init.is_finite() {
            return bad("u_init must be finite".into());
        }
        Ok(())
    }
}
