use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use super::dynamics::{cartpole_deriv, mountain_car_deriv, rk4_step};
use super::task::{Dynamics, TaskSpec};

/// One noisy plant transition `x_{k+1} = a(x_k, u_k) + w_k`, `w_k ~ N(0, C_w)`.
/// A normal deviate is drawn for every state entry, so the noise stream
/// does not depend on which variances are zero.
pub fn simulate_step<R: Rng + ?Sized>(task: &TaskSpec, x: &[f64], u: &[f64], rng: &mut R) -> Vec<f64> {
    let mut next: Vec<f64> = match task.dynamics {
        Dynamics::MountainCar => rk4_step(mountain_car_deriv, &to_array(x), u[0], task.dt).to_vec(),
        Dynamics::CartPole => rk4_step(cartpole_deriv, &to_array(x), u[0], task.dt).to_vec(),
    };
    for (xi, var) in next.iter_mut().zip(&task.process_noise) {
        let z: f64 = rng.sample(StandardNormal);
        *xi += libm::sqrt(*var) * z;
    }
    next
}

fn to_array<const N: usize>(x: &[f64]) -> [f64; N] {
    x.try_into().expect("state dimension")
}

/// Draws `x_0` uniformly from the task's initial-state box.
pub fn sample_initial_state<R: Rng + ?Sized>(task: &TaskSpec, rng: &mut R) -> Vec<f64> {
    let b = &task.initial_state;
    b.lower
        .iter()
        .zip(&b.upper)
        .map(|(&lo, &hi)| {
            let t: f64 = rng.random();
            if lo == hi { lo } else { lo + (hi - lo) * t }
        })
        .collect()
}

/// `S = Σ_k ‖u_k − u_{k−1}‖²` over a flattened, time-major control log.
/// Fewer than two controls give 0.
pub fn smoothness(controls: &[f64], control_dim: usize) -> f64 {
    if controls.len() < 2 * control_dim {
        return 0.0;
    }
    controls
        .windows(2 * control_dim)
        .step_by(control_dim)
        .map(|w| {
            (0..control_dim)
                .map(|c| {
                    let d = w[control_dim + c] - w[c];
                    d * d
                })
                .sum::<f64>()
        })
        .sum()
}

/// One closed-loop step: control applied at `x_k`, the realized (noisy)
/// successor state, and the stage cost of that pair.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StepRecord {
    pub control: Vec<f64>,
    pub state: Vec<f64>,
    pub stage_cost: f64,
}

/// Log of one closed-loop run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunRecord {
    pub initial_state: Vec<f64>,
    pub steps: Vec<StepRecord>,
    pub cumulative_cost: f64,
    pub smoothness: f64,
    pub success: bool,
    /// Trajectories shot by the controller over the whole run.
    pub rollouts: u64,
}

impl RunRecord {
    /// Computes the totals from the logged steps.
    pub fn new(task: &TaskSpec, initial_state: Vec<f64>, steps: Vec<StepRecord>, rollouts: u64) -> Self {
        let cumulative_cost = steps.iter().map(|s| s.stage_cost).sum();
        let controls: Vec<f64> = steps.iter().flat_map(|s| s.control.iter().copied()).collect();
        let smoothness = smoothness(&controls, task.control_dim);
        let success = is_success(task, &steps);
        Self { initial_state, steps, cumulative_cost, smoothness, success, rollouts }
    }

    pub fn controls(&self) -> impl Iterator<Item = &[f64]> {
        self.steps.iter().map(|s| s.control.as_slice())
    }
}

/// Mountain car: final `|x − π/2| < 0.05` and `|v| < 0.02`. Cart-pole:
/// mean of `1 − cos φ` over the last 50 steps below 0.1.
fn is_success(task: &TaskSpec, steps: &[StepRecord]) -> bool {
    let Some(last) = steps.last() else { return false };
    match task.dynamics {
        Dynamics::MountainCar => (last.state[0] - PI / 2.0).abs() < 0.05 && last.state[1].abs() < 0.02,
        Dynamics::CartPole => {
            let tail = &steps[steps.len().saturating_sub(50)..];
            let mean = tail.iter().map(|s| 1.0 - libm::cos(s.state[2])).sum::<f64>() / tail.len() as f64;
            mean < 0.1
        }
    }
}
