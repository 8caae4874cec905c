use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dscem_bench::cache::{decode, generation_config, write_set, SampleCache};
use dscem_bench::{BenchError, CacheError};
use dscem_core::lcd::{optimize_samples, SampleCacheKey, SampleSet};
use nalgebra::DMatrix;

/// Generate and inspect cached LCD sample sets.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Optimize a set and store it in the cache directory.
    Generate {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write here instead of the cache directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overwrite an existing entry.
        #[arg(long)]
        force: bool,
    },
    /// Print header fields and moment errors of a set file, or of the
    /// cached set named by `--dim` and `--count`.
    Inspect {
        #[arg(conflicts_with_all = ["dim", "count"])]
        path: Option<PathBuf>,
        #[arg(long, requires = "count")]
        dim: Option<usize>,
        #[arg(long, requires = "dim")]
        count: Option<usize>,
    },
}

fn report(set: &SampleSet, source: &str) {
    let d = set.dim();
    let mean_err = set.column_means().amax();
    let cov_err = (set.covariance() - DMatrix::identity(d, d)).amax();
    println!("source      {source}");
    println!("dim         {d}");
    println!("count       {}", set.count());
    println!("scheme      {:?}", set.scheme());
    match set.cvm_score() {
        Some(s) => println!("cvm_score   {s:.6e}"),
        None => println!("cvm_score   -"),
    }
    println!("checksum    ok");
    println!("max |mean|  {mean_err:.3e}");
    println!("max |C - I| {cov_err:.3e}");
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cache = SampleCache::from_env();
    let res: Result<(), BenchError> = match Cli::parse().cmd {
        Cmd::Generate { dim, count, max_iter, restarts, seed, out, force } => (|| {
            let key = SampleCacheKey { dim, count };
            if dim == 0 || count == 0 {
                return Err(BenchError::Config("dim and count must be >= 1".into()));
            }
            let path = out.unwrap_or_else(|| cache.path_for(key));
            if !force && path.exists() {
                println!("{} already exists (use --force to regenerate)", path.display());
                return Ok(());
            }
            let mut cfg = generation_config(key);
            cfg.max_iter = max_iter.unwrap_or(cfg.max_iter);
            cfg.restarts = restarts.unwrap_or(cfg.restarts);
            cfg.seed = seed.unwrap_or(cfg.seed);
            let (set, rep) = optimize_samples(dim, count, &cfg)?;
            write_set(&path, &set)?;
            println!(
                "stored {} ({:?} after {} iterations, gradient norm {:.2e})",
                path.display(),
                rep.status,
                rep.iterations,
                rep.grad_norm
            );
            Ok(())
        })(),
        Cmd::Inspect { path, dim, count } => (|| {
            let (set, source) = match (dim, count, path) {
                (Some(dim), Some(count), None) => {
                    let key = SampleCacheKey { dim, count };
                    (cache.load(key)?, cache.path_for(key))
                }
                (None, None, Some(path)) => {
                    let bytes = std::fs::read(&path)
                        .map_err(|source| CacheError::Io { path: path.clone(), source })?;
                    (decode(&bytes, &path, None)?, path)
                }
                _ => return Err(BenchError::Config("give a file path, or --dim and --count".into())),
            };
            report(&set, &source.display().to_string());
            Ok(())
        })(),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            if let Some(s) = std::error::Error::source(&e) {
                log::error!("  caused by: {s}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
