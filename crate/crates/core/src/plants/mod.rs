//! Benchmark plants: mountain car and frictionless cart-pole swing-up.

mod cost;
mod dynamics;
mod rollout;
mod sim;
mod task;

pub use cost::{cost_features, stage_cost, terminal_cost};
pub use dynamics::{
    cartpole_deriv, cartpole_energy, mountain_car_deriv, rk4_step, CART_MASS, GRAVITY, POLE_HALF_LENGTH, POLE_MASS,
};
pub use rollout::{rollout, rollout_cost, Rollout};
pub use sim::{sample_initial_state, simulate_step, smoothness, RunRecord, StepRecord};
pub use task::{Dynamics, InitialStateBox, TaskSpec};
