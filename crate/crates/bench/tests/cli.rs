use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use dscem_bench::aggregate::{aggregate, read_aggregate};
use dscem_bench::records::{read_runs, read_steps};

fn bench(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bench"))
        .args(args)
        .env("DSCEM_CACHE_DIR", cache)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn samples(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_samples"))
        .args(args)
        .env("DSCEM_CACHE_DIR", cache)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// A plan small enough for a smoke test: horizon 6, 5 steps, N = 20.
fn tiny_plan(dir: &Path, cache: &Path) -> std::path::PathBuf {
    let spec = stdout(&bench(cache, &["task-spec", "--task", "mountain-car"]));
    let spec = spec.replace("horizon = 30", "horizon = 6").replace("steps = 150", "steps = 5");
    let nested = spec.replace("\n[", "\n[task_spec.");
    let text = format!(
        "methods = [\"icem\", \"dscem-var-v2\"]\nsizes = [20]\nruns = 2\nconvergence_samples = 20\n\n[task_spec]\n{nested}"
    );
    let path = dir.join("plan.toml");
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn task_spec_prints_the_built_in_parameters() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bench(tmp.path(), &["task-spec", "--task", "cart-pole"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("horizon = 30"));
    assert!(text.contains("steps = 300"));
}

#[test]
fn run_aggregate_and_plot_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let cache = tmp.path().join("cache");
    let out_dir = tmp.path().join("out");
    let plan = tiny_plan(tmp.path(), &cache);

    let out = bench(
        &cache,
        &["run", "--task", "mountain-car", "--plan", plan.to_str().unwrap(), "--out", out_dir.to_str().unwrap()],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["runs.csv", "timing.csv", "steps.csv", "aggregate.csv", "plan.toml"] {
        assert!(out_dir.join(f).is_file(), "{f} missing");
    }
    assert!(cache.join("lcd-d18-n20.bin").is_file());

    let runs = read_runs(&out_dir.join("runs.csv")).unwrap();
    assert_eq!(runs.len(), 4);
    assert!(runs.iter().all(|r| r.rollouts == 20 * 3 * 5));
    assert_eq!(read_steps(&out_dir.join("steps.csv")).unwrap().len(), 4 * 5);
    let written = read_aggregate(&out_dir.join("aggregate.csv")).unwrap();
    assert_eq!(written, aggregate(&runs));

    let before = fs::read(out_dir.join("aggregate.csv")).unwrap();
    fs::remove_file(out_dir.join("aggregate.csv")).unwrap();
    let out = bench(&cache, &["aggregate", out_dir.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(fs::read(out_dir.join("aggregate.csv")).unwrap(), before);

    let out = bench(&cache, &["plot", out_dir.to_str().unwrap(), "--convergence-n", "20"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["cost_vs_n.svg", "smoothness_vs_n.svg", "convergence.svg"] {
        let svg = fs::read_to_string(out_dir.join(f)).unwrap();
        assert!(svg.starts_with("<svg"), "{f}");
    }
}

#[test]
fn strict_cache_miss_exits_with_cache_code() {
    let tmp = tempfile::tempdir().unwrap();
    let cache = tmp.path().join("empty");
    let plan = tiny_plan(tmp.path(), &cache);
    let out = bench(
        &cache,
        &[
            "run",
            "--task",
            "mountain-car",
            "--plan",
            plan.to_str().unwrap(),
            "--out",
            tmp.path().join("out").to_str().unwrap(),
            "--strict-cache",
        ],
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bad_plan_exits_with_config_code() {
    let tmp = tempfile::tempdir().unwrap();
    let plan = tmp.path().join("plan.toml");
    fs::write(&plan, "runs = 2\nhorizon_typo = 4\n").unwrap();
    let out = bench(
        tmp.path(),
        &["run", "--task", "cart-pole", "--plan", plan.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(2));

    fs::write(&plan, "task = \"mountain-car\"\n").unwrap();
    let out = bench(
        tmp.path(),
        &["run", "--task", "cart-pole", "--plan", plan.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn correlation_dump_for_white_noise_is_identity() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("c.csv");
    let out = bench(tmp.path(), &["correlation", "--beta", "0", "--horizon", "4", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let rows: Vec<Vec<f64>> = fs::read_to_string(&path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 4);
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            assert_eq!(*v, if i == j { 1.0 } else { 0.0 });
        }
    }
}

#[test]
fn samples_generate_inspect_and_reject_corruption() {
    let tmp = tempfile::tempdir().unwrap();
    let out = samples(tmp.path(), &["generate", "--dim", "2", "--count", "6"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = samples(tmp.path(), &["inspect", "--dim", "2", "--count", "6"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("count       6"));

    let out = samples(tmp.path(), &["inspect", "--dim", "3", "--count", "6"]);
    assert_eq!(out.status.code(), Some(3));

    let elsewhere = tmp.path().join("sets").join("pair.bin");
    let out = samples(tmp.path(), &["generate", "--dim", "1", "--count", "2", "--out", elsewhere.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&samples(tmp.path(), &["inspect", elsewhere.to_str().unwrap()])).contains("count       2"));

    let file = tmp.path().join("lcd-d2-n6.bin");
    let mut bytes = fs::read(&file).unwrap();
    bytes.truncate(bytes.len() - 5);
    fs::write(&file, bytes).unwrap();
    let out = samples(tmp.path(), &["inspect", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}
