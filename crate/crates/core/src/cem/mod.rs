//! Cross-entropy method optimizer and receding-horizon controller.

mod config;
mod elite;
mod engine;
mod mpc;

pub use config::{Adaptation, CemConfig, SamplerKind};
pub use elite::{select_elite, EliteSet};
pub use engine::{
    cem_optimize, cem_optimize_with, clip_rows, decayed_count, BatchCost, CemOutcome, IterationTrace, PoolExtras,
};
pub use mpc::{
    initial_proposal, run_episode, shift_sequence, BatchRollout, MpcController, MpcState, SerialRollout, StepTrace,
};
