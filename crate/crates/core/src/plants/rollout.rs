use alloc::vec::Vec;

use super::cost::{stage_cost, terminal_cost};
use super::dynamics::{cartpole_deriv, mountain_car_deriv, rk4_step};
use super::task::{Dynamics, TaskSpec};

/// Noise-free trajectory of one control sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Rollout {
    /// `H + 1` states starting at `x_k`.
    pub states: Vec<Vec<f64>>,
    pub stage_costs: Vec<f64>,
    pub terminal_cost: f64,
    /// `+∞` if any state went non-finite.
    pub total: f64,
}

/// Integrates a sequence and hands every visited state to `visit`. Returns
/// `J`, or `+∞` once a state is non-finite.
fn shoot<const N: usize>(
    task: &TaskSpec,
    x0: &[f64],
    seq: &[f64],
    deriv: fn(&[f64; N], f64) -> [f64; N],
    mut visit: impl FnMut(&[f64], Option<f64>),
) -> f64 {
    assert_eq!(seq.len(), task.sequence_dim(), "sequence length must be d_u·H");
    let du = task.control_dim;
    let mut x: [f64; N] = x0.try_into().expect("state dimension");
    let mut total = 0.0;
    for n in 0..task.horizon {
        let u = &seq[n * du..(n + 1) * du];
        let g = stage_cost(task, &x, u);
        visit(&x, Some(g));
        total += g;
        x = rk4_step(deriv, &x, u[0], task.dt);
        if !x.iter().all(|v| v.is_finite()) {
            return f64::INFINITY;
        }
    }
    visit(&x, None);
    let total = total + terminal_cost(task, &x);
    if total.is_finite() { total } else { f64::INFINITY }
}

fn dispatch(task: &TaskSpec, x0: &[f64], seq: &[f64], visit: impl FnMut(&[f64], Option<f64>)) -> f64 {
    match task.dynamics {
        Dynamics::MountainCar => shoot::<2>(task, x0, seq, mountain_car_deriv, visit),
        Dynamics::CartPole => shoot::<4>(task, x0, seq, cartpole_deriv, visit),
    }
}

/// Total cost `J` of a flattened, time-major control sequence from `x0`.
/// Allocation-free; this is the inner loop of every CEM iteration.
pub fn rollout_cost(task: &TaskSpec, x0: &[f64], seq: &[f64]) -> f64 {
    dispatch(task, x0, seq, |_, _| {})
}

/// Like [`rollout_cost`] but keeps the trajectory and per-step costs.
pub fn rollout(task: &TaskSpec, x0: &[f64], seq: &[f64]) -> Rollout {
    let mut states = Vec::with_capacity(task.horizon + 1);
    let mut stage_costs = Vec::with_capacity(task.horizon);
    let total = dispatch(task, x0, seq, |x, g| {
        states.push(x.to_vec());
        if let Some(g) = g {
            stage_costs.push(g);
        }
    });
    let terminal_cost = match states.last() {
        Some(x) if states.len() == task.horizon + 1 => terminal_cost(task, x),
        _ => f64::INFINITY,
    };
    Rollout { states, stage_costs, terminal_cost, total }
}
