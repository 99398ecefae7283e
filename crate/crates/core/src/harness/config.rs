use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::baselines::ExactSolverConfig;
use crate::metrics::{Constraints, LifetimeModel};
use crate::radio::RadioParams;
use crate::rforce::{AttractionScope, RForceParams};
use crate::scenario::GenerateParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    #[default]
    Rforce,
    Kmeans,
    Exact,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Rforce, Algorithm::Kmeans, Algorithm::Exact];

    /// Stable index used in seed derivation.
    pub fn index(self) -> u64 {
        match self {
            Algorithm::Rforce => 0,
            Algorithm::Kmeans => 1,
            Algorithm::Exact => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Rforce => "rforce",
            Algorithm::Kmeans => "kmeans",
            Algorithm::Exact => "exact",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rforce" => Ok(Algorithm::Rforce),
            "kmeans" => Ok(Algorithm::Kmeans),
            "exact" => Ok(Algorithm::Exact),
            other => Err(HarnessError::Config(format!(
                "unknown algorithm `{other}` (expected rforce, kmeans or exact)"
            ))),
        }
    }
}

/// Where a run's scenario comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ScenarioSource {
    Generate(GenerateParams),
    File(PathBuf),
}

impl Default for ScenarioSource {
    fn default() -> Self {
        ScenarioSource::Generate(GenerateParams::new(200, 1))
    }
}

/// RForce tuning knobs; degree bounds live at the top level of [`RunConfig`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RForceTuning {
    pub k_centroids: Option<usize>,
    pub lambda: f64,
    pub eta: f64,
    pub kappa: f64,
    pub stability_eps: f64,
    pub stability_window: usize,
    pub max_iters: usize,
    pub attraction: AttractionScope,
}

impl Default for RForceTuning {
    fn default() -> Self {
        let p = RForceParams::default();
        Self {
            k_centroids: p.k_centroids,
            lambda: p.lambda,
            eta: p.eta,
            kappa: p.kappa,
            stability_eps: p.stability_eps,
            stability_window: p.stability_window,
            max_iters: p.max_iters,
            attraction: p.attraction,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExactLimits {
    pub node_limit: usize,
    pub time_limit_secs: f64,
}

impl Default for ExactLimits {
    fn default() -> Self {
        let c = ExactSolverConfig::default();
        Self {
            node_limit: c.node_limit,
            time_limit_secs: c.time_limit_secs,
        }
    }
}

/// Everything a run or sweep needs. Every field has a default, so an empty
/// document is a valid configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub scenario: ScenarioSource,
    pub algorithm: Algorithm,
    pub rho: f64,
    pub theta: f64,
    pub delta_lr: usize,
    pub delta_sr: usize,
    pub radio: RadioParams,
    pub rforce: RForceTuning,
    pub exact: ExactLimits,
    pub lifetime: LifetimeModel,
    /// Explicit per-trial base seeds; overrides `base_seed`/`trials`.
    pub seeds: Option<Vec<u64>>,
    pub base_seed: u64,
    pub trials: usize,
    /// Try K in default-2..=default+2 and keep the best objective.
    pub k_sweep: bool,
    /// When false, runtimes are written as 0 so outputs are byte-stable.
    pub record_timing: bool,
    pub output_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let c = Constraints::default();
        Self {
            scenario: ScenarioSource::default(),
            algorithm: Algorithm::default(),
            rho: 20.0,
            theta: c.theta,
            delta_lr: c.delta_lr,
            delta_sr: c.delta_sr,
            radio: RadioParams::default(),
            rforce: RForceTuning::default(),
            exact: ExactLimits::default(),
            lifetime: LifetimeModel::default(),
            seeds: None,
            base_seed: 1,
            trials: 1,
            k_sweep: false,
            record_timing: true,
            output_dir: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, HarnessError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    /// Fails only for seeds above `i64::MAX`, which TOML integers cannot hold.
    pub fn to_toml(&self) -> Result<String, HarnessError> {
        toml::to_string_pretty(self).map_err(|e| HarnessError::Config(format!("cannot encode config as TOML: {e}")))
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let cfg_err = |m: String| Err(HarnessError::Config(m));
        self.radio.validate().map_err(HarnessError::Config)?;
        self.rforce_params().validate().map_err(HarnessError::Config)?;
        if !(self.rho >= 0.0 && self.rho.is_finite()) {
            return cfg_err(format!("rho must be non-negative, got {}", self.rho));
        }
        if !(0.0..=1.0).contains(&self.theta) {
            return cfg_err(format!("theta must lie in [0, 1], got {}", self.theta));
        }
        match &self.seeds {
            Some(s) if s.is_empty() => return cfg_err("seeds list is empty".into()),
            None if self.trials == 0 => return cfg_err("trials must be at least 1".into()),
            _ => {}
        }
        Ok(())
    }

    pub fn constraints(&self) -> Constraints {
        Constraints {
            delta_lr: self.delta_lr,
            delta_sr: self.delta_sr,
            theta: self.theta,
        }
    }

    pub fn rforce_params(&self) -> RForceParams {
        let t = &self.rforce;
        RForceParams {
            k_centroids: t.k_centroids,
            lambda: t.lambda,
            eta: t.eta,
            kappa: t.kappa,
            stability_eps: t.stability_eps,
            stability_window: t.stability_window,
            max_iters: t.max_iters,
            delta_sr: self.delta_sr,
            delta_lr: self.delta_lr,
            attraction: t.attraction,
        }
    }

    pub fn exact_config(&self) -> ExactSolverConfig {
        ExactSolverConfig {
            rho: self.rho,
            theta: self.theta,
            delta_lr: self.delta_lr,
            delta_sr: self.delta_sr,
            node_limit: self.exact.node_limit,
            time_limit_secs: self.exact.time_limit_secs,
        }
    }

    /// Per-trial base seeds.
    pub fn trial_seeds(&self) -> Vec<u64> {
        match &self.seeds {
            Some(s) => s.clone(),
            None => (0..self.trials as u64)
                .map(|t| super::seeds::mix(&[self.base_seed, t]))
                .collect(),
        }
    }

    /// Template used when generating sweep scenarios.
    pub fn generate_template(&self) -> Result<GenerateParams, HarnessError> {
        match &self.scenario {
            ScenarioSource::Generate(g) => Ok(g.clone()),
            ScenarioSource::File(p) => Err(HarnessError::Config(format!(
                "sweeps generate their own scenarios; scenario file {} cannot be used",
                p.display()
            ))),
        }
    }
}
