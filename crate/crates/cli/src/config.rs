//! JSON experiment configuration.

use std::collections::BTreeMap;
use std::path::Path;

use lowrank::schedule::{Regime, SchedulerParams};
use lowrank::{FunctionSpec, GridSpec, QuadratureRule};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Decompose,
    Spectrum,
    Schedule,
    DecayRate,
    RankVsEps,
    DimRobustness,
    CompareFormats,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Decompose => "decompose",
            ExperimentKind::Spectrum => "spectrum",
            ExperimentKind::Schedule => "schedule",
            ExperimentKind::DecayRate => "decay-rate",
            ExperimentKind::RankVsEps => "rank-vs-eps",
            ExperimentKind::DimRobustness => "dim-robustness",
            ExperimentKind::CompareFormats => "compare-formats",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Tucker,
    Tt,
    TtBidir,
}

impl Format {
    pub const ALL: [Format; 3] = [Format::Tucker, Format::Tt, Format::TtBidir];

    pub fn as_str(self) -> &'static str {
        match self {
            Format::Tucker => "tucker",
            Format::Tt => "tt",
            Format::TtBidir => "tt-bidir",
        }
    }
}

/// Pseudo-id for a seeded Gaussian field on the grid.
pub const RANDOM_FUNCTION: &str = "random";

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionConfig {
    pub id: String,
    pub dims: Vec<usize>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub gamma: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub points_per_axis: usize,
    #[serde(default = "default_rule")]
    pub rule: QuadratureRule,
}

fn default_rule() -> QuadratureRule {
    QuadratureRule::UniformTrapezoid
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchedulerConfig {
    pub regime: Regime,
    pub epsilon: f64,
    pub k: f64,
    pub dims: Vec<usize>,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub delta_prime: Option<f64>,
    #[serde(default)]
    pub gamma: Option<Vec<f64>>,
}

impl SchedulerConfig {
    pub fn params(&self) -> SchedulerParams {
        SchedulerParams {
            epsilon: self.epsilon,
            k: self.k,
            dims: self.dims.clone(),
            delta: self.delta,
            delta_prime: self.delta_prime,
            gamma: self.gamma.clone(),
        }
    }
}

/// Decomposition-backed check of a weighted schedule at small scale.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpotCheck {
    pub m: usize,
    pub points_per_axis: usize,
    /// Functions to decompose; each must be weighted.
    pub functions: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub experiment: Option<ExperimentKind>,
    #[serde(default)]
    pub function: Option<FunctionConfig>,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub format: Option<Format>,
    /// Relative Frobenius tolerance for rank selection.
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub ranks: Option<Vec<usize>>,
    /// Sort subdomains so that `n_1 ≤ … ≤ n_m` before a TT decomposition.
    #[serde(default)]
    pub order_modes: bool,
    #[serde(default)]
    pub scheduler: Option<SchedulerConfig>,
    #[serde(default)]
    pub epsilons: Option<Vec<f64>>,
    /// Grid sizes for decay-rate runs; defaults to `grid.points_per_axis`.
    #[serde(default)]
    pub grid_sizes: Option<Vec<usize>>,
    #[serde(default)]
    pub m_values: Option<Vec<usize>>,
    #[serde(default)]
    pub spot_check: Option<SpotCheck>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub cap: Option<usize>,
}

pub fn parse(text: &str) -> Result<ExperimentConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        CliError::config(if field == "." { "<root>".into() } else { field }, e.into_inner().to_string())
    })
}

pub fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    parse(&text)
}

impl ExperimentConfig {
    pub fn require_function(&self) -> Result<&FunctionConfig, CliError> {
        self.function.as_ref().ok_or_else(|| CliError::config("function", "missing"))
    }

    pub fn require_grid(&self) -> Result<GridSpec, CliError> {
        let g = self.grid.as_ref().ok_or_else(|| CliError::config("grid", "missing"))?;
        GridSpec::new(g.points_per_axis, g.rule).map_err(|e| CliError::config("grid.points_per_axis", e.to_string()))
    }

    pub fn require_scheduler(&self) -> Result<&SchedulerConfig, CliError> {
        self.scheduler.as_ref().ok_or_else(|| CliError::config("scheduler", "missing"))
    }

    pub fn require_format(&self) -> Result<Format, CliError> {
        self.format.ok_or_else(|| CliError::config("format", "missing"))
    }
}

/// Registry spec for `f` with its own dims, or `None` for the random pseudo-function.
pub fn function_spec(f: &FunctionConfig) -> Result<Option<FunctionSpec>, CliError> {
    if f.id == RANDOM_FUNCTION {
        if !f.params.is_empty() {
            return Err(CliError::config("function.params", "the random function takes no parameters"));
        }
        if f.dims.is_empty() || f.dims.contains(&0) {
            return Err(CliError::config("function.dims", "must be non-empty and ≥ 1"));
        }
        return Ok(None);
    }
    let mut spec = FunctionSpec::new(&f.id, f.dims.clone()).map_err(|e| match e {
        lowrank::Error::UnknownFunction(_) => CliError::config("function.id", e.to_string()),
        _ => CliError::config("function.dims", e.to_string()),
    })?;
    if let Some(g) = &f.gamma {
        spec = spec
            .with_gamma(g.clone())
            .map_err(|e| CliError::config("function.gamma", e.to_string()))?;
    }
    for (name, &value) in &f.params {
        spec = spec
            .with_param(name, value)
            .map_err(|e| CliError::config(format!("function.params.{name}"), e.to_string()))?;
    }
    Ok(Some(spec))
}
