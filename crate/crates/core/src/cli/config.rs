//! Experiment configuration files.
//!
//! A config is a TOML document with a top-level `experiment` name, an
//! optional `seed` and `output_dir`, an optional `[space]` table, and one
//! table named after the experiment holding its parameters.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    EntropyTable,
    MartinReport,
    ApproximationTable,
    LimitDiagnostic,
    MartingaleCheck,
    UniformConvergence,
    WaldConsistency,
    DiracDemo,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::EntropyTable => "entropy_table",
            ExperimentKind::MartinReport => "martin_report",
            ExperimentKind::ApproximationTable => "approximation_table",
            ExperimentKind::LimitDiagnostic => "limit_diagnostic",
            ExperimentKind::MartingaleCheck => "martingale_check",
            ExperimentKind::UniformConvergence => "uniform_convergence",
            ExperimentKind::WaldConsistency => "wald_consistency",
            ExperimentKind::DiracDemo => "dirac_demo",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub space: Option<SpaceSpec>,
    pub entropy_table: Option<EntropyTableParams>,
    pub martin_report: Option<FiltrationParams>,
    pub approximation_table: Option<ApproximationParams>,
    pub limit_diagnostic: Option<LimitParams>,
    pub martingale_check: Option<MartingaleCheckParams>,
    pub uniform_convergence: Option<UniformConvergenceParams>,
    pub wald_consistency: Option<WaldParams>,
    pub dirac_demo: Option<DiracParams>,
}

/// Exactly one of `weights`, `uniform` or `file`.
///
/// A space file has one outcome per line, either `weight` or `label weight`;
/// blank lines and lines starting with `#` are skipped.
#[derive(Debug, Clone, PartialEq, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub weights: Option<Vec<f64>>,
    pub labels: Option<Vec<String>>,
    pub uniform: Option<usize>,
    pub file: Option<PathBuf>,
}

/// `"points"`, `"trivial"`, a list of blocks, or a path to a partition file
/// (one comma-separated block per line).
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum PartitionSpec {
    Blocks(Vec<Vec<usize>>),
    Named(String),
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    Many(Vec<T>),
    One(T),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::Many(v) => v.clone(),
            OneOrMany::One(t) => vec![t.clone()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct EntropyTableParams {
    pub xi: PartitionSpec,
    pub eta: OneOrMany<PartitionSpec>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FiltrationParams {
    pub a: PartitionSpec,
    pub levels: Vec<PartitionSpec>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ApproximationParams {
    pub a: PartitionSpec,
    pub levels: Vec<PartitionSpec>,
    pub eps: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct LimitParams {
    /// `geometric`, `heavy_tail` or `point_mass`.
    pub model: String,
    pub p: Option<f64>,
    /// `trivial`, `points` or `blocks`.
    pub eta: Option<String>,
    pub block_size: Option<u64>,
    pub depths: Vec<u64>,
    pub ceiling: Option<f64>,
}

/// Parametric model description shared by the martingale experiments.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    /// `bernoulli`, `binomial` or `gaussian`.
    pub kind: String,
    pub theta0: f64,
    pub trials: Option<u64>,
    pub sites: Option<usize>,
    /// `exponential`, `squared_exponential` or `white_noise`.
    pub kernel: Option<String>,
    pub lengthscale: Option<f64>,
    /// Parameter interval for the Gaussian variance.
    pub domain: Option<[f64; 2]>,
}

/// A list of values or an evenly spaced range.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum GridSpec {
    Values(Vec<f64>),
    Range { lo: f64, hi: f64, count: usize },
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            GridSpec::Values(v) => v.clone(),
            GridSpec::Range { lo, hi, count } => crate::martingale::linspace(*lo, *hi, *count),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MartingaleCheckParams {
    /// `likelihood_ratio` or `posterior_grid`.
    pub family: String,
    pub model: ModelSpec,
    pub thetas: GridSpec,
    pub n_max: usize,
    pub tol: Option<f64>,
    /// Number of prior support points for `posterior_grid`.
    pub support: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct UniformConvergenceParams {
    /// `posterior_grid` or `dirac`.
    pub family: String,
    pub model: Option<ModelSpec>,
    pub support: Option<usize>,
    pub depth: Option<usize>,
    pub theta_grid: GridSpec,
    pub n_list: Vec<usize>,
    pub replicates: usize,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct WaldParams {
    pub model: ModelSpec,
    pub grid: GridSpec,
    pub eps_ball: f64,
    pub n_max: usize,
    pub record: Option<Vec<usize>>,
    pub replicates: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DiracParams {
    pub depth: Option<usize>,
}

/// A parsed config with the directory its relative paths resolve against.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub text: String,
    pub base_dir: PathBuf,
}

impl LoadedConfig {
    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }
}

pub fn load(path: &Path) -> Result<LoadedConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let config: ExperimentConfig =
        toml::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let base_dir = path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    Ok(LoadedConfig {
        config,
        text,
        base_dir,
    })
}
