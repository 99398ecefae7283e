use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ensure_dir, seeds, solve, Algorithm, HarnessError, RunConfig};
use crate::baselines::ExactError;
use crate::metrics::SolutionMetrics;
use crate::scenario::{generate_scenario, GenerateParams};

/// Bumped whenever [`CSV_COLUMNS`] changes.
pub const CSV_SCHEMA_VERSION: u32 = 1;

pub const CSV_COLUMNS: [&str; 12] = [
    "n_devices",
    "n_aps",
    "algorithm",
    "trials",
    "mean_failure_cost",
    "std_failure_cost",
    "mean_sr_bitrate_bps",
    "mean_lr_bitrate_bps",
    "mean_outage_frac",
    "mean_head_lifetime_min",
    "mean_objective",
    "mean_runtime_ms",
];

/// One aggregate CSV row. Skipped cells have `trials == 0` and NaN means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n_devices: usize,
    pub n_aps: usize,
    pub algorithm: Algorithm,
    pub trials: usize,
    pub mean_failure_cost: f64,
    pub std_failure_cost: f64,
    pub mean_sr_bitrate_bps: f64,
    pub mean_lr_bitrate_bps: f64,
    pub mean_outage_frac: f64,
    pub mean_head_lifetime_min: f64,
    pub mean_objective: f64,
    pub mean_runtime_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub scenario_seed: u64,
    pub algorithm_seed: u64,
    pub k: Option<usize>,
    pub metrics: SolutionMetrics,
    pub runtime_ms: f64,
}

/// Every trial of one (N, M, algorithm) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub n_devices: usize,
    pub n_aps: usize,
    pub algorithm: Algorithm,
    pub skipped: Option<String>,
    pub trials: Vec<TrialRecord>,
}

impl CellResult {
    pub fn mean_of(&self, f: impl Fn(&TrialRecord) -> f64) -> f64 {
        mean_std(&self.trials.iter().map(f).collect::<Vec<_>>()).0
    }

    pub fn row(&self) -> SweepRow {
        let col = |f: fn(&TrialRecord) -> f64| self.trials.iter().map(f).collect::<Vec<_>>();
        let (mean_failure_cost, std_failure_cost) = mean_std(&col(|t| t.metrics.total_failure_cost));
        SweepRow {
            n_devices: self.n_devices,
            n_aps: self.n_aps,
            algorithm: self.algorithm,
            trials: self.trials.len(),
            mean_failure_cost,
            std_failure_cost,
            mean_sr_bitrate_bps: mean_std(&col(|t| t.metrics.avg_sr_bitrate)).0,
            mean_lr_bitrate_bps: mean_std(&col(|t| t.metrics.avg_lr_bitrate)).0,
            mean_outage_frac: mean_std(&col(|t| t.metrics.outage_fraction)).0,
            mean_head_lifetime_min: mean_std(&col(|t| t.metrics.avg_head_lifetime)).0,
            mean_objective: mean_std(&col(|t| t.metrics.objective)).0,
            mean_runtime_ms: mean_std(&col(|t| t.runtime_ms)).0,
        }
    }
}

/// Mean and sample standard deviation; NaN mean for no data, zero spread for
/// a single observation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub schema_version: u32,
    pub cells: Vec<CellResult>,
}

impl SweepResult {
    pub fn rows(&self) -> Vec<SweepRow> {
        self.cells.iter().map(CellResult::row).collect()
    }

    pub fn cell(&self, n_devices: usize, n_aps: usize, algorithm: Algorithm) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| c.n_devices == n_devices && c.n_aps == n_aps && c.algorithm == algorithm)
    }

    pub fn write_csv<W: io::Write>(&self, w: W) -> Result<(), HarnessError> {
        let mut wtr = csv::Writer::from_writer(w);
        for row in self.rows() {
            wtr.serialize(row)?;
        }
        wtr.flush().map_err(|source| HarnessError::Io {
            path: "<csv>".into(),
            source,
        })?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing CSV to memory");
        String::from_utf8(buf).expect("CSV is UTF-8")
    }

    /// Writes `sweep.csv` (aggregates) and `sweep.json` (every trial).
    pub fn write_to_dir(&self, dir: &Path) -> Result<(), HarnessError> {
        ensure_dir(dir)?;
        let csv_path = dir.join("sweep.csv");
        std::fs::write(&csv_path, self.to_csv_string()).map_err(|source| HarnessError::Io {
            path: csv_path.display().to_string(),
            source,
        })?;
        let json_path = dir.join("sweep.json");
        let json = serde_json::to_string_pretty(self).expect("sweep serialize");
        std::fs::write(&json_path, json).map_err(|source| HarnessError::Io {
            path: json_path.display().to_string(),
            source,
        })
    }
}

/// Parses aggregate rows back from CSV text.
pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>, HarnessError> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(CSV_COLUMNS.iter().copied()) {
        return Err(HarnessError::Config(format!(
            "unexpected CSV header {:?}",
            headers.iter().collect::<Vec<_>>()
        )));
    }
    rdr.deserialize().map(|r| r.map_err(HarnessError::from)).collect()
}

/// Runs every (N, M, algorithm, trial) cell.
///
/// Each trial's scenario is generated once and shared by all algorithms.
/// The exact solver is skipped for cells above its node limit; other exact
/// failures (infeasible, time limit) drop that trial from the aggregate.
pub fn run_sweep(
    cfg: &RunConfig,
    device_counts: &[usize],
    ap_counts: &[usize],
    algorithms: &[Algorithm],
) -> Result<SweepResult, HarnessError> {
    cfg.validate()?;
    if device_counts.contains(&0) || ap_counts.contains(&0) {
        return Err(HarnessError::Config("device and AP counts must be at least 1".into()));
    }
    let template = cfg.generate_template()?;
    let trial_seeds = cfg.trial_seeds();
    let mut cells = Vec::new();

    for &n in device_counts {
        for &m in ap_counts {
            let mut group: Vec<CellResult> = algorithms
                .iter()
                .map(|&algorithm| CellResult {
                    n_devices: n,
                    n_aps: m,
                    algorithm,
                    skipped: (algorithm == Algorithm::Exact && n > cfg.exact.node_limit)
                        .then(|| format!("{n} devices exceeds node limit {}", cfg.exact.node_limit)),
                    trials: Vec::new(),
                })
                .collect();

            for (trial, &ts) in trial_seeds.iter().enumerate() {
                let params = GenerateParams {
                    n_devices: n,
                    n_aps: m,
                    ..template.clone()
                };
                let scenario_seed = seeds::scenario_seed(ts, n, m);
                let scenario = generate_scenario(&params, scenario_seed)?;
                for cell in group.iter_mut().filter(|c| c.skipped.is_none()) {
                    let algorithm_seed = seeds::algorithm_seed(scenario_seed, cell.algorithm);
                    let solved = match solve(cell.algorithm, &scenario, cfg, algorithm_seed) {
                        Ok(s) => s,
                        Err(HarnessError::Exact(
                            e @ (ExactError::Infeasible { .. } | ExactError::TimeLimit { .. }),
                        )) => {
                            log::warn!("n={n} m={m} trial {trial}: exact solver gave no result: {e}");
                            continue;
                        }
                        Err(e) => return Err(e),
                    };
                    cell.trials.push(TrialRecord {
                        trial,
                        scenario_seed,
                        algorithm_seed,
                        k: solved.k,
                        metrics: solved.metrics,
                        runtime_ms: if cfg.record_timing { solved.runtime_ms } else { 0.0 },
                    });
                }
            }
            cells.extend(group);
        }
    }
    Ok(SweepResult {
        schema_version: CSV_SCHEMA_VERSION,
        cells,
    })
}
