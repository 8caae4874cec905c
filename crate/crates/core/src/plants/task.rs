use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Dynamics {
    MountainCar,
    CartPole,
}

impl Dynamics {
    pub fn state_dim(self) -> usize {
        match self {
            Dynamics::MountainCar => 2,
            Dynamics::CartPole => 4,
        }
    }

    /// Length of the vector the quadratic costs act on.
    pub fn cost_dim(self) -> usize {
        match self {
            Dynamics::MountainCar => 2,
            Dynamics::CartPole => 5,
        }
    }
}

/// Uniform distribution over an axis-aligned box of initial states.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InitialStateBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Everything that defines one benchmark task.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TaskSpec {
    pub dynamics: Dynamics,
    /// Integration and control period in seconds.
    pub dt: f64,
    pub horizon: usize,
    /// Closed-loop steps per run.
    pub steps: usize,
    pub control_dim: usize,
    /// `[lower, upper]` per control input.
    pub control_limits: Vec<[f64; 2]>,
    /// Diagonal of `Q`, over the cost vector.
    pub state_weights: Vec<f64>,
    pub control_weight: f64,
    /// Diagonal of `Q_H`, over the cost vector.
    pub terminal_weights: Vec<f64>,
    /// Goal in cost coordinates (augmented for the cart-pole).
    pub goal: Vec<f64>,
    /// Diagonal of the process-noise covariance, over the raw state.
    pub process_noise: Vec<f64>,
    pub initial_state: InitialStateBox,
    /// Power-law exponent of the proposal's colored noise.
    pub noise_beta: f64,
    /// Initial proposal standard deviation (all coordinates).
    pub initial_sigma: f64,
}

impl TaskSpec {
    pub fn mountain_car() -> Self {
        Self {
            dynamics: Dynamics::MountainCar,
            dt: 3.0,
            horizon: 30,
            steps: 150,
            control_dim: 1,
            control_limits: vec![[-1.0, 1.0]],
            state_weights: vec![1.0, 1.0],
            control_weight: 0.1,
            terminal_weights: vec![1.0, 1.0],
            goal: vec![PI / 2.0, 0.0],
            process_noise: vec![0.0, 1e-7],
            initial_state: InitialStateBox { lower: vec![-0.7, 0.0], upper: vec![-0.3, 0.0] },
            noise_beta: 0.25,
            initial_sigma: 1.5,
        }
    }

    pub fn cart_pole() -> Self {
        Self {
            dynamics: Dynamics::CartPole,
            dt: 0.02,
            horizon: 30,
            steps: 300,
            control_dim: 1,
            control_limits: vec![[-10.0, 10.0]],
            state_weights: vec![0.1, 0.1, 1.0, 0.1, 0.1],
            control_weight: 1e-4,
            terminal_weights: vec![10.0, 0.1, 10.0, 0.1, 0.1],
            goal: vec![0.0, 0.0, 1.0, 0.0, 0.0],
            process_noise: vec![0.0, 1e-8, 0.0, 1e-8],
            initial_state: InitialStateBox {
                lower: vec![0.0, 0.0, 145f64.to_radians(), 0.0],
                upper: vec![0.0, 0.0, 215f64.to_radians(), 0.0],
            },
            noise_beta: 1.0,
            initial_sigma: 10.0,
        }
    }

    /// Length of the flattened control sequence, `d_u · H`.
    pub fn sequence_dim(&self) -> usize {
        self.control_dim * self.horizon
    }

    pub fn state_dim(&self) -> usize {
        self.dynamics.state_dim()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(msg.into()));
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return bad("dt must be > 0");
        }
        if self.horizon == 0 || self.steps == 0 {
            return bad("horizon and steps must be >= 1");
        }
        if self.control_dim != 1 {
            return bad("both plants take exactly one control input");
        }
        if self.control_limits.len() != self.control_dim
            || self.control_limits.iter().any(|[lo, hi]| !(lo.is_finite() && hi.is_finite() && lo <= hi))
        {
            return bad("control limits must be finite with lower <= upper, one pair per input");
        }
        let cd = self.dynamics.cost_dim();
        let sd = self.dynamics.state_dim();
        if self.state_weights.len() != cd || self.terminal_weights.len() != cd || self.goal.len() != cd {
            return bad("weights and goal must match the cost vector length");
        }
        if self.state_weights.iter().chain(&self.terminal_weights).any(|w| !(*w >= 0.0))
            || !(self.control_weight >= 0.0)
        {
            return bad("cost weights must be >= 0");
        }
        if self.process_noise.len() != sd || self.process_noise.iter().any(|v| !(*v >= 0.0)) {
            return bad("process noise must be a nonnegative diagonal over the state");
        }
        let b = &self.initial_state;
        if b.lower.len() != sd || b.upper.len() != sd || b.lower.iter().zip(&b.upper).any(|(l, u)| !(l <= u)) {
            return bad("initial-state box must match the state and have lower <= upper");
        }
        if !(self.noise_beta >= 0.0) || !(self.initial_sigma > 0.0) {
            return bad("noise_beta must be >= 0 and initial_sigma > 0");
        }
        Ok(())
    }
}
