use std::collections::BTreeSet;
use std::path::Path;

use dscem_core::cem::CemConfig;
use dscem_core::lcd::SampleCacheKey;
use dscem_core::plants::TaskSpec;
use dscem_core::proposal::VarietyScheme;
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TaskId {
    MountainCar,
    CartPole,
}

impl TaskId {
    pub fn id(self) -> &'static str {
        match self {
            TaskId::MountainCar => "mountain-car",
            TaskId::CartPole => "cart-pole",
        }
    }

    pub fn default_spec(self) -> TaskSpec {
        match self {
            TaskId::MountainCar => TaskSpec::mountain_car(),
            TaskId::CartPole => TaskSpec::cart_pole(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Icem,
    DscemVarV1,
    DscemVarV2,
    DscemVarV3,
    DscemCovV3,
    /// iCEM with a large fixed sample count, as a reference level.
    #[serde(alias = "icem-baseline-10k")]
    IcemBaseline,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Icem,
        Method::DscemVarV1,
        Method::DscemVarV2,
        Method::DscemVarV3,
        Method::DscemCovV3,
        Method::IcemBaseline,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Method::Icem => "icem",
            Method::DscemVarV1 => "dscem-var-v1",
            Method::DscemVarV2 => "dscem-var-v2",
            Method::DscemVarV3 => "dscem-var-v3",
            Method::DscemCovV3 => "dscem-cov-v3",
            Method::IcemBaseline => "icem-baseline",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.id() == id).or((id == "icem-baseline-10k").then_some(Method::IcemBaseline))
    }

    pub fn config(self, n: usize, n_iter: usize) -> CemConfig {
        let mut cfg = match self {
            Method::Icem | Method::IcemBaseline => CemConfig::icem(n),
            Method::DscemVarV1 => CemConfig::dscem_var(n, VarietyScheme::RandomRotation),
            Method::DscemVarV2 => CemConfig::dscem_var(n, VarietyScheme::JointDeterministic),
            Method::DscemVarV3 => CemConfig::dscem_var(n, VarietyScheme::Combined),
            Method::DscemCovV3 => CemConfig::dscem_cov(n),
        };
        cfg.n_iter = n_iter;
        cfg
    }

    pub fn scheme(self) -> Option<VarietyScheme> {
        match self {
            Method::Icem | Method::IcemBaseline => None,
            Method::DscemVarV1 => Some(VarietyScheme::RandomRotation),
            Method::DscemVarV2 => Some(VarietyScheme::JointDeterministic),
            Method::DscemVarV3 | Method::DscemCovV3 => Some(VarietyScheme::Combined),
        }
    }

    /// Sizes below this are left out of a sweep. Full covariance needs
    /// `K = 40` elites.
    pub fn min_samples(self) -> usize {
        match self {
            Method::DscemCovV3 => 40,
            _ => 0,
        }
    }

    /// Cached set this method needs for `n` samples on a `dim`-dimensional
    /// problem.
    pub fn sample_key(self, dim: usize, n_iter: usize, n: usize) -> Option<SampleCacheKey> {
        self.scheme().map(|s| SampleCacheKey { dim: s.base_dim(dim, n_iter), count: n })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    /// 20 runs, sizes {20, 50, 100, 300}, baseline N = 2000.
    Desk,
    /// 100 runs, sizes 20..300, baseline N = 10⁴.
    Full,
}

/// Optional overrides read from a TOML plan file.
#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PlanFile {
    pub task: Option<TaskId>,
    pub methods: Option<Vec<Method>>,
    pub sizes: Option<Vec<usize>>,
    pub runs: Option<usize>,
    pub base_seed: Option<u64>,
    pub baseline_samples: Option<usize>,
    pub n_iter: Option<usize>,
    /// Sample size shown in the convergence and control panels.
    pub convergence_samples: Option<usize>,
    /// Replaces the built-in task parameters entirely.
    pub task_spec: Option<TaskSpec>,
}

impl PlanFile {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| BenchError::Config(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub method: Method,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentPlan {
    pub task_id: TaskId,
    pub task: TaskSpec,
    pub methods: Vec<Method>,
    pub sizes: Vec<usize>,
    pub runs: usize,
    pub base_seed: u64,
    pub baseline_samples: usize,
    pub n_iter: usize,
    pub convergence_samples: usize,
}

impl ExperimentPlan {
    pub fn new(task_id: TaskId, scale: Scale) -> Self {
        let (runs, sizes, baseline_samples) = match scale {
            Scale::Desk => (20, vec![20, 50, 100, 300], 2000),
            Scale::Full => (100, vec![20, 30, 40, 50, 75, 100, 150, 200, 250, 300], 10_000),
        };
        Self {
            task_id,
            task: task_id.default_spec(),
            methods: Method::ALL.to_vec(),
            sizes,
            runs,
            base_seed: 1,
            baseline_samples,
            n_iter: 3,
            convergence_samples: 50,
        }
    }

    /// Applies the overrides of a plan file. A task named in the file must
    /// agree with `self.task_id`.
    pub fn apply(mut self, file: PlanFile) -> Result<Self> {
        if let Some(t) = file.task {
            if t != self.task_id {
                return Err(BenchError::Config(format!(
                    "plan file is for {} but {} was requested",
                    t.id(),
                    self.task_id.id()
                )));
            }
        }
        if let Some(m) = file.methods {
            self.methods = m;
        }
        if let Some(s) = file.sizes {
            self.sizes = s;
        }
        if let Some(r) = file.runs {
            self.runs = r;
        }
        if let Some(b) = file.base_seed {
            self.base_seed = b;
        }
        if let Some(b) = file.baseline_samples {
            self.baseline_samples = b;
        }
        if let Some(n) = file.n_iter {
            self.n_iter = n;
        }
        if let Some(n) = file.convergence_samples {
            self.convergence_samples = n;
        }
        if let Some(spec) = file.task_spec {
            if spec.dynamics != self.task_id.default_spec().dynamics {
                return Err(BenchError::Config("task_spec dynamics do not match the task".into()));
            }
            self.task = spec;
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(BenchError::Config(m));
        self.task.validate().map_err(|e| BenchError::Config(e.to_string()))?;
        if self.methods.is_empty() {
            return bad("no methods selected".into());
        }
        if self.runs == 0 {
            return bad("runs must be >= 1".into());
        }
        if self.n_iter == 0 {
            return bad("n_iter must be >= 1".into());
        }
        let dim = self.task.sequence_dim();
        for cell in self.cells() {
            cell.method
                .config(cell.n, self.n_iter)
                .validate(dim)
                .map_err(|e| BenchError::Config(format!("{} with N={}: {e}", cell.method.id(), cell.n)))?;
        }
        if self.cells().is_empty() {
            return bad("plan has no runnable (method, N) cells".into());
        }
        Ok(())
    }

    /// Sweep cells in output order. Methods with a minimum sample size skip
    /// smaller sizes; the baseline runs once at its fixed size.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &method in &self.methods {
            if method == Method::IcemBaseline {
                out.push(Cell { method, n: self.baseline_samples });
                continue;
            }
            for &n in &self.sizes {
                // Smaller sizes are skipped rather than rejected so one
                // sweep can cover every method.
                if n >= method.min_samples() {
                    out.push(Cell { method, n });
                }
            }
        }
        out
    }

    /// Every cached sample set the sweep needs.
    pub fn sample_keys(&self) -> BTreeSet<(usize, usize)> {
        let dim = self.task.sequence_dim();
        self.cells()
            .iter()
            .filter_map(|c| c.method.sample_key(dim, self.n_iter, c.n))
            .map(|k| (k.dim, k.count))
            .collect()
    }
}
