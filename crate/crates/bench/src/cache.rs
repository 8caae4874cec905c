//! On-disk cache of optimized sample sets.
//!
//! File layout, all integers and floats little-endian:
//!
//! | offset | size | field                                   |
//! |--------|------|-----------------------------------------|
//! | 0      | 8    | magic `DSCEMSET`                        |
//! | 8      | 4    | format version (u32)                    |
//! | 12     | 4    | dimension `d` (u32)                     |
//! | 16     | 4    | count `N` (u32)                         |
//! | 20     | 4    | scheme code (u32)                       |
//! | 24     | 8    | CvM score (f64, NaN when absent)        |
//! | 32     | 4    | CRC-32 of bytes 8..32 and the payload   |
//! | 36     | 8·N·d| points, row-major                       |

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use dscem_core::lcd::{optimize_samples, OptimizeConfig, SampleCacheKey, SampleScheme, SampleSet};
use nalgebra::DMatrix;

use crate::error::CacheError;

pub const MAGIC: [u8; 8] = *b"DSCEMSET";
pub const FORMAT_VERSION: u32 = 1;
pub const HEADER_LEN: usize = 36;
/// Environment variable naming the cache directory.
pub const CACHE_DIR_ENV: &str = "DSCEM_CACHE_DIR";
const DEFAULT_DIR: &str = ".dscem-cache";

/// Above this many coordinates (`N·d`) generation uses two starts instead
/// of the default three.
const LARGE_SET: usize = 4000;

pub fn encode(set: &SampleSet) -> Vec<u8> {
    let (n, d) = set.points().shape();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * n * d);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(d as u32).to_le_bytes());
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.extend_from_slice(&(set.scheme().code() as u32).to_le_bytes());
    out.extend_from_slice(&set.cvm_score().unwrap_or(f64::NAN).to_le_bytes());
    out.extend_from_slice(&[0; 4]);
    for i in 0..n {
        for v in set.points().row(i).iter() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    let crc = checksum(&out);
    out[32..36].copy_from_slice(&crc.to_le_bytes());
    out
}

fn checksum(bytes: &[u8]) -> u32 {
    let mut h = crc32fast::Hasher::new();
    h.update(&bytes[8..32]);
    h.update(&bytes[HEADER_LEN..]);
    h.finalize()
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(b[at..at + 4].try_into().expect("4 bytes"))
}

/// Parses a cache file; `expect` additionally checks its key.
pub fn decode(bytes: &[u8], path: &Path, expect: Option<SampleCacheKey>) -> Result<SampleSet, CacheError> {
    let bad = |reason: String| CacheError::Format { path: path.to_path_buf(), reason };
    if bytes.len() < HEADER_LEN {
        return Err(bad(format!("{} bytes is shorter than the header", bytes.len())));
    }
    if bytes[..8] != MAGIC {
        return Err(bad("bad magic".into()));
    }
    let version = u32_at(bytes, 8);
    if version != FORMAT_VERSION {
        return Err(bad(format!("format version {version}, expected {FORMAT_VERSION}")));
    }
    let d = u32_at(bytes, 12) as usize;
    let n = u32_at(bytes, 16) as usize;
    if let Some(key) = expect {
        if key.dim != d || key.count != n {
            return Err(CacheError::KeyMismatch {
                path: path.to_path_buf(),
                dim: key.dim,
                count: key.count,
                found_dim: d,
                found_count: n,
            });
        }
    }
    let want_len = n.checked_mul(d).and_then(|c| c.checked_mul(8)).map(|p| p + HEADER_LEN);
    if want_len != Some(bytes.len()) {
        return Err(bad(format!("length {} does not match d={d}, N={n}", bytes.len())));
    }
    let stored = u32_at(bytes, 32);
    let computed = checksum(bytes);
    if stored != computed {
        return Err(CacheError::Checksum { path: path.to_path_buf(), stored, computed });
    }
    let scheme = u8::try_from(u32_at(bytes, 20))
        .ok()
        .and_then(SampleScheme::from_code)
        .ok_or_else(|| bad("unknown scheme code".into()))?;
    let score = f64::from_le_bytes(bytes[24..32].try_into().expect("8 bytes"));
    let payload = &bytes[HEADER_LEN..];
    let points = DMatrix::from_fn(n, d, |i, j| {
        let at = 8 * (i * d + j);
        f64::from_le_bytes(payload[at..at + 8].try_into().expect("8 bytes"))
    });
    SampleSet::new(points, scheme, (!score.is_nan()).then_some(score)).map_err(|e| bad(e.to_string()))
}

/// Optimizer settings used when a set has to be generated.
pub fn generation_config(key: SampleCacheKey) -> OptimizeConfig {
    let mut cfg = OptimizeConfig::default();
    if key.dim * key.count > LARGE_SET {
        // The lattice start plus the Gaussian one. The objective is nearly flat
        // here and more starts buy little.
        cfg.restarts = 2;
    }
    cfg
}

/// Writes to a temporary file next to `path`, then renames it into place,
/// so readers never observe a partial file.
pub fn write_set(path: &Path, set: &SampleSet) -> Result<(), CacheError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CacheError::Io { path, source }
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let mut f = fs::File::create(&tmp).map_err(io(&tmp))?;
    f.write_all(&encode(set)).map_err(io(&tmp))?;
    f.sync_all().map_err(io(&tmp))?;
    drop(f);
    fs::rename(&tmp, path).map_err(io(path))
}

/// What to do when a set is missing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MissPolicy {
    Generate,
    Fail,
}

#[derive(Debug, Clone)]
pub struct SampleCache {
    dir: PathBuf,
}

impl SampleCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// Directory from [`CACHE_DIR_ENV`], else `.dscem-cache`.
    pub fn from_env() -> Self {
        Self::new(std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| DEFAULT_DIR.into()))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, key: SampleCacheKey) -> PathBuf {
        self.dir.join(format!("lcd-d{}-n{}.bin", key.dim, key.count))
    }

    pub fn load(&self, key: SampleCacheKey) -> Result<SampleSet, CacheError> {
        let path = self.path_for(key);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(CacheError::Miss { dim: key.dim, count: key.count, path });
            }
            Err(source) => return Err(CacheError::Io { path, source }),
        };
        decode(&bytes, &path, Some(key))
    }

    /// Writes the set under its cache name; see [`write_set`].
    pub fn store(&self, set: &SampleSet) -> Result<PathBuf, CacheError> {
        let path = self.path_for(set.key());
        write_set(&path, set)?;
        Ok(path)
    }

    /// Loads a set, generating and storing it on a miss unless `policy` is
    /// [`MissPolicy::Fail`]. The flag reports whether it was generated.
    pub fn get_or_generate(
        &self,
        key: SampleCacheKey,
        policy: MissPolicy,
    ) -> Result<(Arc<SampleSet>, bool), CacheError> {
        match self.load(key) {
            Ok(set) => Ok((Arc::new(set), false)),
            Err(CacheError::Miss { .. }) if policy == MissPolicy::Generate => {
                log::warn!("sample set d={} N={} not cached; generating", key.dim, key.count);
                let (set, report) =
                    optimize_samples(key.dim, key.count, &generation_config(key)).map_err(CacheError::Generate)?;
                if !report.converged() {
                    log::warn!(
                        "sample set d={} N={} stopped with gradient norm {:.2e} ({:?})",
                        key.dim,
                        key.count,
                        report.grad_norm,
                        report.status
                    );
                }
                self.store(&set)?;
                Ok((Arc::new(set), true))
            }
            Err(e) => Err(e),
        }
    }
}
