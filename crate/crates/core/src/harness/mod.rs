//! Experiment driver: single runs, Monte-Carlo sweeps and their outputs.
//!
//! # Seeds
//!
//! All randomness flows from the configuration:
//!
//! * trial base seed `t_i`: `seeds[i]` when a list is given, else
//!   `mix(base_seed, i)`;
//! * scenario seed for a sweep cell: `mix(t_i, N, M)`, shared by every
//!   algorithm so comparisons are paired;
//! * algorithm seed: `mix(scenario_seed, algorithm_index)` with rforce = 0,
//!   kmeans = 1, exact = 2.
//!
//! `mix` is a SplitMix64 fold (see [`seeds::mix`]). A single run is trial 0 of
//! the equivalent sweep cell.

mod config;
pub mod seeds;
mod sweep;

pub use config::{Algorithm, ExactLimits, RForceTuning, RunConfig, ScenarioSource};
pub use sweep::{
    mean_std, parse_csv, run_sweep, CellResult, SweepResult, SweepRow, TrialRecord, CSV_COLUMNS, CSV_SCHEMA_VERSION,
};

use std::fs;
use std::path::Path;
use std::time::Instant;

use thiserror::Error;

use crate::baselines::{exact_solve, kmeans_cluster, ExactError};
use crate::metrics::{evaluate, SolutionMetrics};
use crate::rforce::{default_k, run_rforce};
use crate::scenario::{generate_scenario, load_scenario, Scenario, ScenarioError};
use crate::solution::ClusterSolution;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// Outcome of one algorithm on one scenario.
#[derive(Debug, Clone)]
pub struct Solved {
    pub solution: ClusterSolution,
    pub metrics: SolutionMetrics,
    /// Algorithm wall-clock time (excluding scenario generation and I/O).
    pub runtime_ms: f64,
    /// Centroid count used by the heuristics; `None` for the exact solver.
    pub k: Option<usize>,
}

fn run_heuristic(algorithm: Algorithm, scenario: &Scenario, cfg: &RunConfig, k: usize, seed: u64) -> ClusterSolution {
    match algorithm {
        Algorithm::Rforce => {
            let mut params = cfg.rforce_params();
            params.k_centroids = Some(k);
            run_rforce(scenario, &cfg.radio, &params, seed)
        }
        Algorithm::Kmeans => kmeans_cluster(scenario, &cfg.radio, k, cfg.delta_sr, cfg.delta_lr, seed),
        Algorithm::Exact => unreachable!("exact solver is not a heuristic"),
    }
}

/// Runs `algorithm` on `scenario` and evaluates the result.
///
/// With `cfg.k_sweep` the heuristics try every K within two of the default
/// and keep the candidate that meets the outage bound with the lowest
/// objective (falling back to the lowest objective overall); ties keep the
/// smaller K. The reported runtime covers all candidates.
pub fn solve(algorithm: Algorithm, scenario: &Scenario, cfg: &RunConfig, seed: u64) -> Result<Solved, HarnessError> {
    let constraints = cfg.constraints();
    let score = |sol: &ClusterSolution| evaluate(sol, scenario, &cfg.radio, &constraints, cfg.rho, &cfg.lifetime);

    if algorithm == Algorithm::Exact {
        let started = Instant::now();
        let out = exact_solve(scenario, &cfg.radio, &cfg.exact_config())?;
        let runtime_ms = started.elapsed().as_secs_f64() * 1e3;
        let metrics = score(&out.solution);
        return Ok(Solved {
            solution: out.solution,
            metrics,
            runtime_ms,
            k: None,
        });
    }

    let base_k = cfg
        .rforce
        .k_centroids
        .unwrap_or_else(|| default_k(scenario.n_devices(), cfg.delta_sr));
    let candidates: Vec<usize> = if cfg.k_sweep {
        (base_k.saturating_sub(2).max(1)..=base_k + 2).collect()
    } else {
        vec![base_k]
    };

    let mut runtime_ms = 0.0;
    let mut best: Option<(bool, f64, usize, ClusterSolution, SolutionMetrics)> = None;
    for k in candidates {
        let started = Instant::now();
        let sol = run_heuristic(algorithm, scenario, cfg, k, seed);
        runtime_ms += started.elapsed().as_secs_f64() * 1e3;
        let m = score(&sol);
        let infeasible = !m.feasibility.min_served;
        let better = match &best {
            None => true,
            Some((b_inf, b_obj, ..)) => (infeasible, m.objective) < (*b_inf, *b_obj),
        };
        if better {
            best = Some((infeasible, m.objective, k, sol, m));
        }
    }
    let (_, _, k, solution, metrics) = best.expect("at least one candidate K");
    Ok(Solved {
        solution,
        metrics,
        runtime_ms,
        k: Some(k),
    })
}

/// Result of [`run_single`].
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub scenario: Scenario,
    pub solved: Solved,
    pub scenario_seed: u64,
    pub algorithm_seed: u64,
}

pub fn resolve_scenario(cfg: &RunConfig) -> Result<(Scenario, u64), HarnessError> {
    let trial = cfg.trial_seeds()[0];
    match &cfg.scenario {
        ScenarioSource::Generate(g) => {
            let seed = seeds::scenario_seed(trial, g.n_devices, g.n_aps);
            Ok((generate_scenario(g, seed)?, seed))
        }
        ScenarioSource::File(path) => {
            let s = load_scenario(path)?;
            let seed = seeds::scenario_seed(trial, s.n_devices(), s.n_aps());
            Ok((s, seed))
        }
    }
}

/// Executes the configured algorithm once (trial 0).
pub fn run_single(cfg: &RunConfig) -> Result<RunOutput, HarnessError> {
    cfg.validate()?;
    let (scenario, scenario_seed) = resolve_scenario(cfg)?;
    let algorithm_seed = seeds::algorithm_seed(scenario_seed, cfg.algorithm);
    let solved = solve(cfg.algorithm, &scenario, cfg, algorithm_seed)?;
    Ok(RunOutput {
        scenario,
        solved,
        scenario_seed,
        algorithm_seed,
    })
}

fn write(path: &Path, contents: &str) -> Result<(), HarnessError> {
    fs::write(path, contents).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn ensure_dir(dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
        path: dir.display().to_string(),
        source,
    })
}

/// Writes `scenario.json`, `solution.json` and `metrics.json` into `dir`.
/// None of them contain timings, so identical configs give identical bytes.
pub fn write_run_outputs(out: &RunOutput, dir: &Path) -> Result<(), HarnessError> {
    ensure_dir(dir)?;
    write(&dir.join("scenario.json"), &out.scenario.to_json())?;
    write(&dir.join("solution.json"), &out.solved.solution.to_json())?;
    let metrics = serde_json::to_string_pretty(&out.solved.metrics).expect("metrics serialize");
    write(&dir.join("metrics.json"), &metrics)?;
    Ok(())
}
