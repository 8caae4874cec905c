//! Deterministic Dirac-mixture approximations of the standard Gaussian.
//!
//! A sample set is optimal when its localized cumulative distribution (LCD)
//! is as close as possible, in the modified Cramér–von Mises sense, to the
//! LCD of `N(0, I)`. Sets are expensive to compute and are meant to be
//! produced offline and cached (see `dscem-bench`).

mod cvm;
mod kernel;
mod optimize;
mod set;

pub use cvm::{cvm_distance, cvm_distance_with, cvm_inner, CvmBounds, CvmObjective};
pub use kernel::{dirac_lcd, gaussian_lcd, KernelParams};
pub use optimize::{optimize_samples, OptimizeConfig, OptimizeReport, OptimizeStatus};
pub use set::{SampleCacheKey, SampleScheme, SampleSet};
