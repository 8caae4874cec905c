use alloc::format;
use alloc::sync::Arc;
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{random_rotation, transform_points, ProposalParams};
use crate::lcd::SampleSet;
use crate::{Error, Result};

/// How a precomputed set is varied across CEM iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum VarietyScheme {
    /// V1: one `D`-dimensional set, freshly rotated every iteration.
    RandomRotation,
    /// V2: one `D·n_iter`-dimensional set, block `j` used in iteration `j`.
    JointDeterministic,
    /// V3: as V2, with all blocks rotated by one rotation drawn per MPC step.
    Combined,
}

impl VarietyScheme {
    /// Dimension of the base set this scheme needs.
    pub fn base_dim(self, dim: usize, n_iter: usize) -> usize {
        match self {
            VarietyScheme::RandomRotation => dim,
            VarietyScheme::JointDeterministic | VarietyScheme::Combined => dim * n_iter,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            VarietyScheme::RandomRotation => "v1",
            VarietyScheme::JointDeterministic => "v2",
            VarietyScheme::Combined => "v3",
        }
    }
}

/// Candidate generator backed by one precomputed sample set.
#[derive(Debug, Clone)]
pub struct DeterministicSampler {
    scheme: VarietyScheme,
    base: Arc<SampleSet>,
    dim: usize,
    n_iter: usize,
    step_rotation: Option<DMatrix<f64>>,
}

impl DeterministicSampler {
    pub fn new(scheme: VarietyScheme, base: Arc<SampleSet>, dim: usize, n_iter: usize) -> Result<Self> {
        if dim == 0 || n_iter == 0 {
            return Err(Error::InvalidArgument("sampler needs dim >= 1 and n_iter >= 1".into()));
        }
        let want = scheme.base_dim(dim, n_iter);
        if base.dim() != want {
            return Err(Error::DimensionMismatch { expected: want, actual: base.dim() });
        }
        Ok(Self { scheme, base, dim, n_iter, step_rotation: None })
    }

    pub fn scheme(&self) -> VarietyScheme {
        self.scheme
    }

    pub fn count(&self) -> usize {
        self.base.count()
    }

    pub fn step_rotation(&self) -> Option<&DMatrix<f64>> {
        self.step_rotation.as_ref()
    }

    /// Called at the start of every MPC step; V3 draws its rotation here.
    pub fn begin_step<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        if self.scheme == VarietyScheme::Combined {
            self.step_rotation = Some(random_rotation(self.dim, rng));
        }
    }

    /// Unit-Gaussian points for iteration `j`, before any rotation.
    pub fn block(&self, j: usize) -> Result<DMatrix<f64>> {
        match self.scheme {
            VarietyScheme::RandomRotation => Ok(self.base.points().clone()),
            _ => {
                if j >= self.n_iter {
                    return Err(Error::BlockOutOfRange { index: j, blocks: self.n_iter });
                }
                Ok(self.base.points().columns(j * self.dim, self.dim).into_owned())
            }
        }
    }

    /// First `count` rows of iteration `j`'s set, mapped through the proposal.
    pub fn next_candidates<R: Rng + ?Sized>(
        &mut self,
        j: usize,
        params: &ProposalParams,
        count: usize,
        rng: &mut R,
    ) -> Result<DMatrix<f64>> {
        if count > self.base.count() {
            return Err(Error::InvalidArgument(format!(
                "requested {count} candidates from a set of {}",
                self.base.count()
            )));
        }
        let block = self.block(j)?;
        let rows = block.rows(0, count).into_owned();
        match self.scheme {
            VarietyScheme::RandomRotation => {
                let r = random_rotation(self.dim, rng);
                transform_points(&rows, params, Some(&r))
            }
            VarietyScheme::JointDeterministic => transform_points(&rows, params, None),
            VarietyScheme::Combined => {
                if self.step_rotation.is_none() {
                    self.begin_step(rng);
                }
                transform_points(&rows, params, self.step_rotation.as_ref())
            }
        }
    }
}

/// Either i.i.d. Gaussian sampling (iCEM) or a deterministic sampler.
#[derive(Debug, Clone)]
pub enum CandidateSource {
    Random,
    Deterministic(DeterministicSampler),
}

impl CandidateSource {
    pub fn begin_step<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        if let CandidateSource::Deterministic(s) = self {
            s.begin_step(rng);
        }
    }

    pub fn candidates<R: Rng + ?Sized>(
        &mut self,
        j: usize,
        params: &ProposalParams,
        count: usize,
        rng: &mut R,
    ) -> Result<DMatrix<f64>> {
        match self {
            CandidateSource::Random => {
                let base = DMatrix::from_fn(count, params.dim(), |_, _| rng.sample::<f64, _>(StandardNormal));
                transform_points(&base, params, None)
            }
            CandidateSource::Deterministic(s) => s.next_candidates(j, params, count, rng),
        }
    }
}
