use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::config::{Adaptation, CemConfig, SamplerKind};
use super::elite::{select_elite, EliteSet};
use crate::proposal::{update_m1, update_m2, CandidateSource, ProposalParams, UpdateOptions, UpdateStatus};
use crate::{Error, Result};

/// Evaluates a batch of candidate sequences.
///
/// Implementations may work in parallel but must return costs in row order.
pub trait BatchCost {
    fn costs(&self, candidates: &DMatrix<f64>) -> Vec<f64>;
}

impl<F: Fn(&[f64]) -> f64> BatchCost for F {
    fn costs(&self, candidates: &DMatrix<f64>) -> Vec<f64> {
        let mut row = vec![0.0; candidates.ncols()];
        (0..candidates.nrows())
            .map(|i| {
                row.iter_mut().zip(candidates.row(i).iter()).for_each(|(r, c)| *r = *c);
                self(&row)
            })
            .collect()
    }
}

/// Optional additions to a plain CEM run.
#[derive(Debug, Clone, Copy, Default)]
pub struct PoolExtras<'a> {
    /// Box limits; column `c` uses `bounds[c % bounds.len()]`. Empty means
    /// unbounded.
    pub bounds: &'a [[f64; 2]],
    /// Rows placed in front of the fresh samples of iteration 0.
    pub injected: Option<&'a DMatrix<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    /// Candidates evaluated, including injected ones.
    pub count: usize,
    pub injected: usize,
    pub best_cost: f64,
    /// Mean over the finite costs of the pool.
    pub mean_cost: f64,
    /// Proposal after this iteration's update.
    pub mean: DVector<f64>,
    pub sigmas: DVector<f64>,
    pub status: UpdateStatus,
}

#[derive(Debug, Clone)]
pub struct CemOutcome {
    /// Best member of the final elite set.
    pub best: DVector<f64>,
    pub best_cost: f64,
    pub elite: EliteSet,
    /// Proposal after the final update.
    pub params: ProposalParams,
    pub trace: Vec<IterationTrace>,
    pub rollouts: u64,
}

/// Candidates in iteration `j`: `⌊max(N/η^j, 2K)⌋`; `η = 1` keeps `N`.
pub fn decayed_count(n: usize, eta: f64, j: usize, k: usize) -> usize {
    if eta == 1.0 {
        return n;
    }
    let decayed = n as f64 / libm::pow(eta, j as f64);
    libm::floor(decayed.max((2 * k) as f64)) as usize
}

/// Clamps every entry into its box; see [`PoolExtras::bounds`].
pub fn clip_rows(m: &mut DMatrix<f64>, bounds: &[[f64; 2]]) {
    if bounds.is_empty() {
        return;
    }
    for (c, mut col) in m.column_iter_mut().enumerate() {
        let [lo, hi] = bounds[c % bounds.len()];
        col.iter_mut().for_each(|v| *v = v.clamp(lo, hi));
    }
}

/// Plain CEM: sample, evaluate, keep the `K` best, refit, `n_iter` times.
pub fn cem_optimize<C, R>(
    cost: &C,
    config: &CemConfig,
    initial: &ProposalParams,
    source: &mut CandidateSource,
    rng: &mut R,
) -> Result<CemOutcome>
where
    C: BatchCost + ?Sized,
    R: Rng + ?Sized,
{
    cem_optimize_with(cost, config, initial, source, &PoolExtras::default(), rng)
}

/// CEM with clipping and injected rows. With
/// [`CemConfig::keep_elites_within_step`] the best elites of iteration `j`
/// are also injected into iteration `j + 1`. Injected rows count toward the
/// iteration's sample budget.
pub fn cem_optimize_with<C, R>(
    cost: &C,
    config: &CemConfig,
    initial: &ProposalParams,
    source: &mut CandidateSource,
    extras: &PoolExtras<'_>,
    rng: &mut R,
) -> Result<CemOutcome>
where
    C: BatchCost + ?Sized,
    R: Rng + ?Sized,
{
    let d = initial.dim();
    config.validate(d)?;
    check_source(config, source)?;
    if extras.bounds.iter().any(|[lo, hi]| !(lo <= hi)) {
        return Err(Error::InvalidArgument("bounds need lower <= upper".into()));
    }
    let opts = UpdateOptions {
        variance_momentum: config.variance_momentum,
        ..UpdateOptions::with_floor_from(&initial.sigmas())
    };
    let keep = config.carried_count();
    let mut params = initial.clone();
    let mut injected = match extras.injected {
        Some(m) if m.ncols() != d => return Err(Error::DimensionMismatch { expected: d, actual: m.ncols() }),
        Some(m) if m.nrows() > 0 => Some(m.clone()),
        _ => None,
    };
    let mut trace = Vec::with_capacity(config.n_iter);
    let mut rollouts = 0u64;
    let mut last = None;
    for j in 0..config.n_iter {
        let count = decayed_count(config.n_samples, config.decay, j, config.n_elite).min(config.n_samples);
        let inj = injected.take().map(|m| m.rows(0, m.nrows().min(count)).into_owned());
        let n_inj = inj.as_ref().map_or(0, |m| m.nrows());
        let fresh = if count > n_inj { Some(source.candidates(j, &params, count - n_inj, rng)?) } else { None };
        let mut pool = DMatrix::from_fn(count, d, |i, c| match (&inj, &fresh) {
            (Some(m), _) if i < n_inj => m[(i, c)],
            (_, Some(f)) => f[(i - n_inj, c)],
            _ => unreachable!("pool rows are either injected or fresh"),
        });
        clip_rows(&mut pool, extras.bounds);

        let costs = cost.costs(&pool);
        if costs.len() != count {
            return Err(Error::DimensionMismatch { expected: count, actual: costs.len() });
        }
        rollouts += count as u64;
        let finite: Vec<f64> = costs.iter().copied().filter(|c| c.is_finite()).collect();
        if finite.is_empty() {
            return Err(Error::AllCostsNonFinite);
        }
        let elite = select_elite(&pool, &costs, config.n_elite)?;
        let (next, status) = match config.adaptation {
            Adaptation::M1 => update_m1(&params, &elite.sequences, config.momentum, &opts)?,
            Adaptation::M2 => update_m2(&params, &elite.sequences, config.momentum, &opts)?,
        };
        params = next;
        trace.push(IterationTrace {
            count,
            injected: n_inj,
            best_cost: elite.costs[0],
            mean_cost: finite.iter().sum::<f64>() / finite.len() as f64,
            mean: params.mean().clone(),
            sigmas: params.sigmas(),
            status,
        });
        if config.keep_elites_within_step && keep > 0 {
            injected = Some(elite.sequences.rows(0, keep.min(elite.len())).into_owned());
        }
        last = Some(elite);
    }
    let elite = last.expect("n_iter >= 1");
    let (best, best_cost) = elite.best();
    Ok(CemOutcome { best, best_cost, elite, params, trace, rollouts })
}

fn check_source(config: &CemConfig, source: &CandidateSource) -> Result<()> {
    match (config.sampler, source) {
        (SamplerKind::Random, CandidateSource::Random) => Ok(()),
        (SamplerKind::Deterministic(s), CandidateSource::Deterministic(d)) if d.scheme() == s => {
            if d.count() < config.n_samples {
                Err(Error::InvalidArgument(alloc::format!(
                    "sample set has {} points but N = {}",
                    d.count(),
                    config.n_samples
                )))
            } else {
                Ok(())
            }
        }
        _ => Err(Error::InvalidArgument("candidate source does not match the configured sampler".into())),
    }
}
