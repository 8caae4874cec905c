//! Gaussian proposal over flattened control sequences and the candidate
//! generators that feed the cross-entropy optimizer.
//!
//! A control sequence of horizon `H` with `d_u` inputs is flattened time
//! major, `[u₀ᵀ, …, u_{H−1}ᵀ]`, so entry `t·d_u + c` is input `c` at step `t`.

mod colored;
mod params;
mod rotation;
mod transform;
mod variety;

pub use colored::{colored_correlation, NoiseColorSpec};
pub use params::{
    update_m1, update_m2, Correlation, CovarianceModel, ProposalParams, UpdateOptions, UpdateStatus,
    VarianceMomentum,
};
pub use rotation::{is_rotation, random_rotation};
pub use transform::{transform_points, transform_samples};
pub use variety::{CandidateSource, DeterministicSampler, VarietyScheme};
