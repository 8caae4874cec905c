use std::io;
use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("no cached sample set for d={dim}, N={count} (looked for {path})")]
    Miss { dim: usize, count: usize, path: PathBuf },
    #[error("{path} holds d={found_dim}, N={found_count}; expected d={dim}, N={count}")]
    KeyMismatch { path: PathBuf, dim: usize, count: usize, found_dim: usize, found_count: usize },
    #[error("checksum mismatch in {path}: stored {stored:#010x}, computed {computed:#010x}")]
    Checksum { path: PathBuf, stored: u32, computed: u32 },
    #[error("malformed sample file {path}: {reason}")]
    Format { path: PathBuf, reason: String },
    #[error("cache I/O failed on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("sample set generation failed")]
    Generate(#[source] dscem_core::Error),
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Cache(#[from] CacheError),
    #[error("I/O failed on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("malformed data in {path}: {reason}")]
    Data { path: PathBuf, reason: String },
    #[error(transparent)]
    Core(#[from] dscem_core::Error),
}

impl BenchError {
    /// Process exit status: 2 for configuration problems, 3 for cache
    /// problems, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            BenchError::Config(_) => 2,
            BenchError::Cache(_) => 3,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> Self {
        let path = path.into();
        move |source| BenchError::Io { path, source }
    }
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;
