use super::task::{Dynamics, TaskSpec};

/// Vector the quadratic costs act on: the raw mountain-car state, or the
/// cart-pole state augmented to `[x, ẋ, cos φ, sin φ, φ̇]`. Returns the
/// number of entries written.
pub fn cost_features(dynamics: Dynamics, state: &[f64], out: &mut [f64; 5]) -> usize {
    match dynamics {
        Dynamics::MountainCar => {
            out[..2].copy_from_slice(&state[..2]);
            2
        }
        Dynamics::CartPole => {
            *out = [state[0], state[1], libm::cos(state[2]), libm::sin(state[2]), state[3]];
            5
        }
    }
}

fn weighted_error(task: &TaskSpec, state: &[f64], weights: &[f64]) -> f64 {
    let mut f = [0.0; 5];
    let n = cost_features(task.dynamics, state, &mut f);
    (0..n).map(|i| weights[i] * (f[i] - task.goal[i]) * (f[i] - task.goal[i])).sum()
}

/// `(x − x_g)ᵀ Q (x − x_g) + r‖u‖²`.
pub fn stage_cost(task: &TaskSpec, state: &[f64], u: &[f64]) -> f64 {
    weighted_error(task, state, &task.state_weights) + task.control_weight * u.iter().map(|v| v * v).sum::<f64>()
}

/// `(x − x_g)ᵀ Q_H (x − x_g)`.
pub fn terminal_cost(task: &TaskSpec, state: &[f64]) -> f64 {
    weighted_error(task, state, &task.terminal_weights)
}
