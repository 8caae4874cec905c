use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use dscem_core::cem::{run_episode, BatchRollout, MpcController, SerialRollout};
use dscem_core::lcd::{SampleCacheKey, SampleSet};
use dscem_core::plants::RunRecord;
use dscem_core::proposal::{CandidateSource, DeterministicSampler};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::aggregate::{aggregate, write_aggregate};
use crate::cache::{MissPolicy, SampleCache};
use crate::error::{BenchError, Result};
use crate::plan::{Cell, ExperimentPlan};
use crate::records::{write_runs, write_steps, write_timing, RunRow, StepRow};
use crate::rollout::RayonRollout;
use crate::seeds::{controller_seed, env_seed};

/// Batches at least this large are shot in parallel inside a run.
const PARALLEL_BATCH: usize = 1000;

pub type SampleSets = BTreeMap<(usize, usize), Arc<SampleSet>>;

#[derive(Debug, Clone)]
pub struct RunResult {
    pub row: RunRow,
    pub record: RunRecord,
    pub wall_time_s: f64,
}

/// Loads (or generates, per `policy`) every set the plan needs.
pub fn load_sample_sets(plan: &ExperimentPlan, cache: &SampleCache, policy: MissPolicy) -> Result<SampleSets> {
    let mut sets = SampleSets::new();
    for (dim, count) in plan.sample_keys() {
        let (set, generated) = cache.get_or_generate(SampleCacheKey { dim, count }, policy)?;
        if generated {
            log::info!("stored {}", cache.path_for(set.key()).display());
        }
        sets.insert((dim, count), set);
    }
    Ok(sets)
}

fn source_for(plan: &ExperimentPlan, sets: &SampleSets, cell: Cell) -> Result<CandidateSource> {
    let dim = plan.task.sequence_dim();
    let (Some(scheme), Some(key)) = (cell.method.scheme(), cell.method.sample_key(dim, plan.n_iter, cell.n)) else {
        return Ok(CandidateSource::Random);
    };
    let set = sets.get(&(key.dim, key.count)).ok_or_else(|| {
        BenchError::Config(format!("sample set d={} N={} was not loaded", key.dim, key.count))
    })?;
    Ok(CandidateSource::Deterministic(DeterministicSampler::new(scheme, set.clone(), dim, plan.n_iter)?))
}

/// Runs one closed-loop episode of `cell`.
pub fn run_one(plan: &ExperimentPlan, sets: &SampleSets, cell: Cell, run: usize) -> Result<RunResult> {
    let start = Instant::now();
    let cfg = cell.method.config(cell.n, plan.n_iter);
    let mut controller = MpcController::new(plan.task.clone(), cfg, source_for(plan, sets, cell)?)?;
    let es = env_seed(plan.base_seed, run);
    let cs = controller_seed(plan.base_seed, cell.method.id(), cell.n, run);
    let mut env = ChaCha8Rng::seed_from_u64(es);
    let mut rng = ChaCha8Rng::seed_from_u64(cs);
    let backend: &dyn BatchRollout = if cell.n >= PARALLEL_BATCH { &RayonRollout } else { &SerialRollout };
    let record = run_episode(&mut controller, backend, &mut env, &mut rng)?;
    let row = RunRow {
        method: cell.method,
        n: cell.n,
        run,
        env_seed: es,
        controller_seed: cs,
        cumulative_cost: record.cumulative_cost,
        smoothness: record.smoothness,
        success: record.success,
        rollouts: record.rollouts,
    };
    Ok(RunResult { row, record, wall_time_s: start.elapsed().as_secs_f64() })
}

/// Every `(cell, run)` of the plan on the rayon pool, returned in
/// `(method, N, run)` order.
pub fn run_experiment(plan: &ExperimentPlan, sets: &SampleSets) -> Result<Vec<RunResult>> {
    plan.validate()?;
    let jobs: Vec<(Cell, usize)> =
        plan.cells().into_iter().flat_map(|c| (0..plan.runs).map(move |r| (c, r))).collect();
    jobs.into_par_iter()
        .map(|(cell, run)| {
            let res = run_one(plan, sets, cell, run);
            if let Ok(r) = &res {
                log::debug!("{} N={} run {run}: J={:.4} S={:.4}", cell.method.id(), cell.n, r.row.cumulative_cost, r.row.smoothness);
            }
            res
        })
        .collect()
}

/// Writes `runs.csv`, `timing.csv`, `steps.csv`, `aggregate.csv` and
/// `plan.toml` into `dir`.
pub fn write_outputs(dir: &Path, plan: &ExperimentPlan, results: &[RunResult]) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(BenchError::io(dir))?;
    let rows: Vec<RunRow> = results.iter().map(|r| r.row.clone()).collect();
    write_runs(&dir.join("runs.csv"), &rows)?;
    let timing: Vec<_> = results.iter().map(|r| (r.row.method, r.row.n, r.row.run, r.wall_time_s)).collect();
    write_timing(&dir.join("timing.csv"), &timing)?;
    let steps: Vec<StepRow> = results
        .iter()
        .flat_map(|r| {
            r.record.steps.iter().enumerate().map(|(k, s)| StepRow {
                method: r.row.method,
                n: r.row.n,
                run: r.row.run,
                k,
                stage_cost: s.stage_cost,
                control: s.control.clone(),
                state: s.state.clone(),
            })
        })
        .collect();
    write_steps(&dir.join("steps.csv"), &steps)?;
    write_aggregate(&dir.join("aggregate.csv"), &aggregate(&rows))?;
    let plan_path = dir.join("plan.toml");
    let text = toml::to_string(plan).map_err(|e| BenchError::Config(e.to_string()))?;
    std::fs::write(&plan_path, text).map_err(BenchError::io(&plan_path))
}
