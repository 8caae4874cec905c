use alloc::format;
use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::{Error, Result};

/// The `K` best candidates of one iteration, best first.
#[derive(Debug, Clone, PartialEq)]
pub struct EliteSet {
    /// `K × D`, rows aligned with `costs`.
    pub sequences: DMatrix<f64>,
    /// Ascending; non-finite costs are stored as `+∞`.
    pub costs: Vec<f64>,
    /// Row of each elite in the candidate matrix.
    pub indices: Vec<usize>,
}

impl EliteSet {
    pub fn len(&self) -> usize {
        self.costs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.costs.is_empty()
    }

    pub fn best(&self) -> (nalgebra::DVector<f64>, f64) {
        (self.sequences.row(0).transpose(), self.costs[0])
    }
}

/// Picks the `k` lowest-cost rows. Non-finite costs rank last; ties keep
/// candidate order.
pub fn select_elite(candidates: &DMatrix<f64>, costs: &[f64], k: usize) -> Result<EliteSet> {
    if costs.len() != candidates.nrows() {
        return Err(Error::DimensionMismatch { expected: candidates.nrows(), actual: costs.len() });
    }
    if k == 0 || k > costs.len() {
        return Err(Error::InvalidArgument(format!("cannot select {k} elites from {} candidates", costs.len())));
    }
    let key = |c: f64| if c.is_finite() { c } else { f64::INFINITY };
    let mut order: Vec<usize> = (0..costs.len()).collect();
    // `sort_by` is stable, so equal keys stay in index order.
    order.sort_by(|&a, &b| key(costs[a]).partial_cmp(&key(costs[b])).expect("keys are never NaN"));
    order.truncate(k);
    Ok(EliteSet {
        sequences: candidates.select_rows(order.iter()),
        costs: order.iter().map(|&i| key(costs[i])).collect(),
        indices: order,
    })
}
