use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dscem_bench::aggregate::{aggregate, write_aggregate};
use dscem_bench::cache::{MissPolicy, SampleCache};
use dscem_bench::plan::{ExperimentPlan, PlanFile, Scale, TaskId};
use dscem_bench::plot::plot_summary;
use dscem_bench::records::{fmt_f64, read_runs};
use dscem_bench::runner::{load_sample_sets, run_experiment, write_outputs};
use dscem_bench::{BenchError, CacheError};
use dscem_core::proposal::{colored_correlation, NoiseColorSpec};

/// Seeded CEM-MPC benchmark sweeps.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a sweep and write CSV outputs.
    Run(RunArgs),
    /// Recompute aggregate.csv from runs.csv.
    Aggregate { dir: PathBuf },
    /// Render SVG panels from an output directory.
    Plot {
        dir: PathBuf,
        /// Sample size shown in the convergence and control panels.
        #[arg(long, default_value_t = 50)]
        convergence_n: usize,
    },
    /// Print a task's built-in parameters as TOML.
    TaskSpec {
        #[arg(long, value_enum)]
        task: TaskId,
    },
    /// Write a colored-noise correlation matrix as CSV.
    Correlation {
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 30)]
        horizon: usize,
        #[arg(long, default_value_t = 1)]
        control_dim: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum)]
    task: TaskId,
    /// TOML plan overriding the scale defaults.
    #[arg(long)]
    plan: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// 20 runs, N in {20, 50, 100, 300}, baseline N = 2000 (default).
    #[arg(long, conflicts_with = "full")]
    desk: bool,
    /// 100 runs, N from 20 to 300, baseline N = 10000.
    #[arg(long)]
    full: bool,
    /// Fail instead of generating missing sample sets.
    #[arg(long)]
    strict_cache: bool,
}

fn run(args: RunArgs) -> Result<(), BenchError> {
    let scale = if args.full { Scale::Full } else { Scale::Desk };
    let mut plan = ExperimentPlan::new(args.task, scale);
    if let Some(path) = &args.plan {
        plan = plan.apply(PlanFile::read(path)?)?;
    }
    plan.validate()?;
    let cache = SampleCache::from_env();
    let policy = if args.strict_cache { MissPolicy::Fail } else { MissPolicy::Generate };
    log::info!("sample cache at {}", cache.dir().display());
    let sets = load_sample_sets(&plan, &cache, policy)?;
    let results = run_experiment(&plan, &sets)?;
    write_outputs(&args.out, &plan, &results)?;
    log::info!("{} runs written to {}", results.len(), args.out.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Run(args) => run(args),
        Cmd::Aggregate { dir } => {
            read_runs(&dir.join("runs.csv")).and_then(|rows| write_aggregate(&dir.join("aggregate.csv"), &aggregate(&rows)))
        }
        Cmd::Plot { dir, convergence_n } => plot_summary(&dir, convergence_n).map(|files| {
            for f in files {
                println!("{}", f.display());
            }
        }),
        Cmd::TaskSpec { task } => toml::to_string(&task.default_spec())
            .map(|t| print!("{t}"))
            .map_err(|e| BenchError::Config(e.to_string())),
        Cmd::Correlation { beta, horizon, control_dim, out } => {
            colored_correlation(&NoiseColorSpec { beta, horizon, control_dim })
                .map_err(|e| BenchError::Config(e.to_string()))
                .and_then(|m| {
                    let text: String = m
                        .row_iter()
                        .map(|r| r.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(",") + "\n")
                        .collect();
                    std::fs::write(&out, text).map_err(|source| BenchError::Io { path: out.clone(), source })
                })
        }
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            let mut src = std::error::Error::source(&e);
            while let Some(s) = src {
                log::error!("  caused by: {s}");
                src = s.source();
            }
            if let BenchError::Cache(CacheError::Miss { .. }) = e {
                log::error!("run `samples generate` or drop --strict-cache");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
