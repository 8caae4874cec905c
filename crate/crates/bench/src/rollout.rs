use dscem_core::cem::BatchRollout;
use dscem_core::plants::{rollout_cost, TaskSpec};
use nalgebra::DMatrix;
use rayon::prelude::*;

/// Shoots candidates on the rayon pool. `collect` keeps row order, so the
/// result does not depend on scheduling.
#[derive(Debug, Clone, Copy, Default)]
pub struct RayonRollout;

impl BatchRollout for RayonRollout {
    fn rollout_costs(&self, task: &TaskSpec, x0: &[f64], candidates: &DMatrix<f64>) -> Vec<f64> {
        (0..candidates.nrows())
            .into_par_iter()
            .map_init(
                || vec![0.0; candidates.ncols()],
                |row, i| {
                    row.iter_mut().zip(candidates.row(i).iter()).for_each(|(r, c)| *r = *c);
                    rollout_cost(task, x0, row)
                },
            )
            .collect()
    }
}
