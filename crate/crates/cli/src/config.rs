//! Experiment configuration: a TOML file of `key = value` sections.
//!
//! ```toml
//! [run]
//! seed = 7
//! output_dir = "out"
//!
//! [generator]
//! kind = "gaussian"
//! a = 3.141592653589793
//!
//! [set]
//! kind = "lattice"
//! alpha = 0.8
//! mult = 1
//! ```
//!
//! Relative paths are resolved against the config file's directory.

use crate::error::{CliError, CliResult};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use siss::GeneratorSpec;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub run: Run,
    pub generator: Option<GeneratorCfg>,
    pub set: Option<SetCfg>,
    pub sweep: Option<SweepCfg>,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub coefficients: Option<CoeffCfg>,
    pub framebounds: Option<FrameboundsCfg>,
    pub reconstruct: Option<ReconstructCfg>,
    pub zeros: Option<ZerosCfg>,
    pub jensen: Option<JensenCfg>,
    pub rolle: Option<RolleCfg>,
    pub gabor: Option<GaborCfg>,
    #[serde(default)]
    pub check: Check,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Run {
    #[serde(default)]
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorCfg {
    pub kind: String,
    pub a: Option<f64>,
    pub c: Option<f64>,
    pub deltas: Option<Vec<f64>>,
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetCfg {
    /// `alpha Z` with `count` points per period, or the smallest count
    /// giving an integer period `>= min_period`.
    Lattice {
        alpha: f64,
        count: Option<usize>,
        min_period: Option<usize>,
        #[serde(default = "one")]
        mult: usize,
    },
    Points {
        points: Vec<f64>,
        mults: Option<Vec<usize>>,
        period: Option<f64>,
    },
    Csv {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepCfg {
    AlphaDilate {
        range: Option<[f64; 2]>,
        steps: Option<usize>,
        values: Option<Vec<f64>>,
        #[serde(default = "one")]
        mult: usize,
        #[serde(default = "default_min_period")]
        min_period: usize,
    },
    PointDelete {
        alpha: f64,
        range: Option<[f64; 2]>,
        steps: Option<usize>,
        values: Option<Vec<f64>>,
        #[serde(default = "one")]
        mult: usize,
        #[serde(default = "default_min_period")]
        min_period: usize,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_riesz_grid")]
    pub riesz_grid: usize,
    /// Window radius for the density of non-periodic sets.
    pub r_max: Option<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { tol: default_tol(), riesz_grid: default_riesz_grid(), r_max: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoeffCfg {
    /// Uniform draws from `[-1, 1]` seeded by `run.seed`.
    Random {
        terms: Option<usize>,
        #[serde(default)]
        offset: i64,
        #[serde(default)]
        periodic: bool,
    },
    Finite {
        #[serde(default)]
        offset: i64,
        values: Vec<f64>,
    },
    Periodic {
        values: Vec<f64>,
    },
    Csv {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameboundsCfg {
    #[serde(default)]
    pub export_operator: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodCfg {
    LeastSquares,
    Frame,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconstructCfg {
    #[serde(default = "default_method")]
    pub method: MethodCfg,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_iter_tol")]
    pub iter_tol: f64,
    pub relax: Option<f64>,
    /// `lambda,j,value` CSV; synthesised from the coefficients when absent.
    pub samples: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZerosCfg {
    pub interval: [f64; 2],
    #[serde(default)]
    pub j: usize,
    #[serde(default = "default_max_mult")]
    pub max_mult: usize,
    #[serde(default = "default_l_range")]
    pub l_range: usize,
    /// Level below which `f^{(j)}(lambda)` counts as zero in the replication check.
    #[serde(default = "default_zero_tol")]
    pub zero_tol: f64,
    /// `[x0, x1, y0, y1]` for locating complex zeros.
    pub rect: Option<[f64; 4]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JensenCfg {
    pub radii: Vec<f64>,
    #[serde(default = "default_theta_grid")]
    pub theta_grid: usize,
    #[serde(default = "default_r_grid")]
    pub r_grid: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RolleCfg {
    pub shift: f64,
    pub interval: [f64; 2],
    #[serde(default = "default_rolle_mult")]
    pub max_mult: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowsCfg {
    Hermite,
    Ladder,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaborCfg {
    pub windows: WindowsCfg,
    /// Number of Hermite windows.
    pub n: Option<usize>,
    /// Ladder shifts; the base window is the `[generator]`.
    pub shifts: Option<Vec<f64>>,
    #[serde(default = "default_b")]
    pub b: f64,
    pub alphas: Vec<f64>,
    pub counts: Option<Vec<usize>>,
    #[serde(default = "default_min_period")]
    pub min_period: usize,
    #[serde(default = "default_x_grid")]
    pub x_grid: usize,
}

/// Optional assertions; a violated one exits with status 3.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub density: Option<f64>,
    pub monotone: Option<bool>,
    /// First-row lower bound over last-row lower bound, first row positive.
    pub min_separation: Option<f64>,
    pub min_lower: Option<f64>,
    pub max_error: Option<f64>,
    pub max_residual: Option<f64>,
    pub max_relative_gap: Option<f64>,
    pub zeros_f: Option<usize>,
    pub zeros_g: Option<usize>,
    pub rolle_holds: Option<bool>,
}

fn one() -> usize {
    1
}
fn default_min_period() -> usize {
    40
}
fn default_tol() -> f64 {
    1e-14
}
fn default_riesz_grid() -> usize {
    1024
}
fn default_method() -> MethodCfg {
    MethodCfg::LeastSquares
}
fn default_max_iter() -> usize {
    10_000
}
fn default_iter_tol() -> f64 {
    1e-13
}
fn default_max_mult() -> usize {
    4
}
fn default_l_range() -> usize {
    3
}
fn default_zero_tol() -> f64 {
    1e-8
}
fn default_theta_grid() -> usize {
    4096
}
fn default_r_grid() -> usize {
    64
}
fn default_rolle_mult() -> usize {
    3
}
fn default_b() -> f64 {
    1.0
}
fn default_x_grid() -> usize {
    16
}

/// A parsed config plus where it came from.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub config: Config,
    pub base_dir: PathBuf,
    /// SHA-256 over the canonical config and any referenced input files.
    pub hash: String,
}

impl Loaded {
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }
}

pub fn parse(text: &str) -> CliResult<Config> {
    // toml reports "line N, column M" in its messages
    toml::from_str(text).map_err(|e| CliError::Config(e.to_string().trim_end().to_string()))
}

pub fn load(path: &Path) -> CliResult<Loaded> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let config = parse(&text)?;
    let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut loaded = Loaded { config, base_dir, hash: String::new() };
    loaded.hash = hash(&loaded)?;
    Ok(loaded)
}

fn hash(l: &Loaded) -> CliResult<String> {
    let canonical = toml::to_string(&l.config).map_err(|e| CliError::Config(e.to_string()))?;
    let mut h = Sha256::new();
    h.update(canonical.as_bytes());
    for p in referenced_files(&l.config) {
        let path = l.resolve(&p);
        let bytes =
            std::fs::read(&path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        h.update(&bytes);
    }
    Ok(hex::encode(h.finalize()))
}

fn referenced_files(c: &Config) -> Vec<PathBuf> {
    let mut v = Vec::new();
    if let Some(SetCfg::Csv { path }) = &c.set {
        v.push(path.clone());
    }
    if let Some(CoeffCfg::Csv { path }) = &c.coefficients {
        v.push(path.clone());
    }
    if let Some(ReconstructCfg { samples: Some(p), .. }) = &c.reconstruct {
        v.push(p.clone());
    }
    v
}

impl GeneratorCfg {
    pub fn spec(&self) -> CliResult<GeneratorSpec> {
        let need = |v: Option<f64>, key: &str| {
            v.ok_or_else(|| CliError::Config(format!("[generator] kind `{}` needs `{key}`", self.kind)))
        };
        Ok(match self.kind.as_str() {
            "gaussian" => GeneratorSpec::Gaussian { a: need(self.a, "a")? },
            "sech" => GeneratorSpec::Sech { a: need(self.a, "a")? },
            "gaussian_type" => GeneratorSpec::GaussianType {
                c: need(self.c, "c")?,
                deltas: self.deltas.clone().unwrap_or_default(),
            },
            "hermite" => GeneratorSpec::Hermite {
                k: self.k.ok_or_else(|| CliError::Config("[generator] kind `hermite` needs `k`".into()))?,
            },
            "sinc" => GeneratorSpec::Sinc,
            other => return Err(CliError::Config(format!("[generator] unknown kind `{other}`"))),
        })
    }
}

impl SweepCfg {
    /// Explicit `values`, or `steps` evenly spaced points across `range`.
    pub fn params(&self) -> CliResult<Vec<f64>> {
        let (range, steps, values) = match self {
            SweepCfg::AlphaDilate { range, steps, values, .. } | SweepCfg::PointDelete { range, steps, values, .. } => {
                (range, steps, values)
            }
        };
        match (values, range, steps) {
            (Some(v), None, None) if !v.is_empty() => Ok(v.clone()),
            (None, Some([lo, hi]), Some(n)) if *n >= 2 && lo < hi => {
                Ok((0..*n).map(|i| lo + (hi - lo) * i as f64 / (*n - 1) as f64).collect())
            }
            (None, Some([lo, _]), Some(1)) => Ok(vec![*lo]),
            _ => Err(CliError::Config(
                "[sweep] needs either `values` or `range = [lo, hi]` with `steps`".into(),
            )),
        }
    }
}
