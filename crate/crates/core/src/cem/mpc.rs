use alloc::sync::Arc;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::config::{Adaptation, CemConfig};
use super::engine::{cem_optimize_with, BatchCost, IterationTrace, PoolExtras};
use crate::plants::{rollout_cost, sample_initial_state, simulate_step, stage_cost, RunRecord, StepRecord, TaskSpec};
use crate::proposal::{colored_correlation, CandidateSource, Correlation, NoiseColorSpec, ProposalParams};
use crate::{Error, Result};

/// Shoots a batch of sequences through the noise-free plant model.
///
/// Implementations may parallelize but must return costs in row order.
pub trait BatchRollout {
    fn rollout_costs(&self, task: &TaskSpec, x0: &[f64], candidates: &DMatrix<f64>) -> Vec<f64>;
}

/// Single-threaded [`BatchRollout`].
#[derive(Debug, Clone, Copy, Default)]
pub struct SerialRollout;

impl BatchRollout for SerialRollout {
    fn rollout_costs(&self, task: &TaskSpec, x0: &[f64], candidates: &DMatrix<f64>) -> Vec<f64> {
        (|seq: &[f64]| rollout_cost(task, x0, seq)).costs(candidates)
    }
}

struct PlantCost<'a, B: ?Sized> {
    task: &'a TaskSpec,
    x0: &'a [f64],
    backend: &'a B,
}

impl<B: BatchRollout + ?Sized> BatchCost for PlantCost<'_, B> {
    fn costs(&self, candidates: &DMatrix<f64>) -> Vec<f64> {
        self.backend.rollout_costs(self.task, self.x0, candidates)
    }
}

/// Drops the first control of a time-major sequence and appends `u_init`
/// (repeated over the control dimensions).
pub fn shift_sequence(seq: &DVector<f64>, control_dim: usize, u_init: f64) -> DVector<f64> {
    let n = seq.len();
    DVector::from_fn(n, |i, _| if i + control_dim < n { seq[i + control_dim] } else { u_init })
}

/// Zero-mean proposal with the task's colored correlation and `σ₀`.
pub fn initial_proposal(task: &TaskSpec, adaptation: Adaptation) -> Result<ProposalParams> {
    let spec = NoiseColorSpec { beta: task.noise_beta, horizon: task.horizon, control_dim: task.control_dim };
    let corr = colored_correlation(&spec)?;
    let d = spec.dim();
    let sigma0 = task.initial_sigma;
    match adaptation {
        Adaptation::M1 => ProposalParams::fixed_correlation(
            DVector::zeros(d),
            Arc::new(Correlation::new(corr)?),
            DVector::from_element(d, sigma0),
        ),
        Adaptation::M2 => ProposalParams::full(DVector::zeros(d), corr * (sigma0 * sigma0)),
    }
}

/// What persists between MPC steps.
#[derive(Debug, Clone, PartialEq)]
pub struct MpcState {
    /// Warm-started mean with the initial covariance.
    pub proposal: ProposalParams,
    /// Shifted elites injected into the next step's first iteration.
    pub carried_elites: DMatrix<f64>,
    pub step: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepTrace {
    pub step: usize,
    pub control: Vec<f64>,
    /// Predicted cost of the returned sequence.
    pub best_cost: f64,
    pub rollouts: u64,
    pub iterations: Vec<IterationTrace>,
}

/// Receding-horizon CEM controller for one task.
#[derive(Debug, Clone)]
pub struct MpcController {
    task: TaskSpec,
    config: CemConfig,
    source: CandidateSource,
    initial: ProposalParams,
    state: MpcState,
}

impl MpcController {
    pub fn new(task: TaskSpec, config: CemConfig, source: CandidateSource) -> Result<Self> {
        task.validate()?;
        config.validate(task.sequence_dim())?;
        let initial = initial_proposal(&task, config.adaptation)?;
        let state = fresh_state(&initial, task.sequence_dim());
        Ok(Self { task, config, source, initial, state })
    }

    pub fn task(&self) -> &TaskSpec {
        &self.task
    }

    pub fn config(&self) -> &CemConfig {
        &self.config
    }

    pub fn state(&self) -> &MpcState {
        &self.state
    }

    /// Back to the zero-mean proposal with nothing carried.
    pub fn reset(&mut self) {
        self.state = fresh_state(&self.initial, self.task.sequence_dim());
    }

    /// Plans from `x` and returns the first control of the best sequence.
    pub fn mpc_step<B, R>(&mut self, x: &[f64], backend: &B, rng: &mut R) -> Result<StepTrace>
    where
        B: BatchRollout + ?Sized,
        R: Rng + ?Sized,
    {
        if x.len() != self.task.state_dim() {
            return Err(Error::DimensionMismatch { expected: self.task.state_dim(), actual: x.len() });
        }
        let du = self.task.control_dim;
        self.source.begin_step(rng);
        let cost = PlantCost { task: &self.task, x0: x, backend };
        let extras = PoolExtras { bounds: &self.task.control_limits, injected: Some(&self.state.carried_elites) };
        let out = cem_optimize_with(&cost, &self.config, &self.state.proposal, &mut self.source, &extras, rng)?;

        let u_init = self.config.u_init;
        let mean = shift_sequence(out.params.mean(), du, u_init);
        let keep = self.config.carried_count().min(out.elite.len());
        let mut carried = DMatrix::zeros(keep, out.elite.sequences.ncols());
        for i in 0..keep {
            let shifted = shift_sequence(&out.elite.sequences.row(i).transpose(), du, u_init);
            carried.row_mut(i).copy_from(&shifted.transpose());
        }
        let step = self.state.step;
        self.state = MpcState { proposal: self.initial.with_mean(mean)?, carried_elites: carried, step: step + 1 };
        Ok(StepTrace {
            step,
            control: out.best.rows(0, du).iter().copied().collect(),
            best_cost: out.best_cost,
            rollouts: out.rollouts,
            iterations: out.trace,
        })
    }
}

fn fresh_state(initial: &ProposalParams, dim: usize) -> MpcState {
    MpcState { proposal: initial.clone(), carried_elites: DMatrix::zeros(0, dim), step: 0 }
}

/// One closed-loop run of `task.steps` steps. The environment rng draws the
/// initial state and process noise; the controller rng drives sampling.
/// The logged stage cost pairs each applied control with the noisy state it
/// produced.
pub fn run_episode<B, E, R>(controller: &mut MpcController, backend: &B, env_rng: &mut E, ctrl_rng: &mut R) -> Result<RunRecord>
where
    B: BatchRollout + ?Sized,
    E: Rng + ?Sized,
    R: Rng + ?Sized,
{
    controller.reset();
    let task = controller.task.clone();
    let x0 = sample_initial_state(&task, env_rng);
    let mut x = x0.clone();
    let mut steps = Vec::with_capacity(task.steps);
    let mut rollouts = 0;
    for _ in 0..task.steps {
        let trace = controller.mpc_step(&x, backend, ctrl_rng)?;
        rollouts += trace.rollouts;
        let next = simulate_step(&task, &x, &trace.control, env_rng);
        let g = stage_cost(&task, &next, &trace.control);
        steps.push(StepRecord { control: trace.control, state: next.clone(), stage_cost: g });
        x = next;
    }
    Ok(RunRecord::new(&task, x0, steps, rollouts))
}
