//! Sampling-based nonlinear MPC with deterministic Dirac-mixture sample sets.
//!
//! The crate is `no_std` and only needs `alloc`. It contains the numerical
//! pieces: optimal sample sets for the standard Gaussian (`lcd`), the
//! Gaussian proposal over flattened control sequences (`proposal`), the
//! cross-entropy optimizer and receding-horizon step (`cem`), and the two
//! benchmark plants (`plants`). File formats, parallel rollouts and the
//! experiment harness live in the `dscem-bench` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod cem;
pub mod error;
pub mod lcd;
pub mod linalg;
pub mod plants;
pub mod proposal;
pub mod quadrature;
pub mod special;

pub use error::{Error, Result};
