use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use rforce::harness::{self, run_single, run_sweep, write_run_outputs, Algorithm, RunConfig, ScenarioSource};
use rforce::scenario::GenerateParams;
use rforce::{check_feasibility, load_scenario, ClusterSolution};

#[derive(Parser)]
#[command(
    name = "rforce",
    version,
    about = "Reliability-aware D2D cluster formation simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random scenario.
    Generate(CommonArgs),
    /// Run one algorithm on one scenario and write solution and metrics.
    Run(RunArgs),
    /// Monte-Carlo sweep over device counts, AP counts and algorithms.
    Sweep(SweepArgs),
    /// Check a solution file against its scenario.
    Check(CheckArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    devices: Option<usize>,
    #[arg(long)]
    aps: Option<usize>,
    /// Output directory (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Scenario JSON file instead of a generated scenario.
    #[arg(long, conflicts_with_all = ["devices", "aps"])]
    scenario: Option<PathBuf>,
    #[arg(long)]
    algo: Option<String>,
    /// Centroid count for the heuristics.
    #[arg(long)]
    k: Option<usize>,
    /// Try K within two of the default and keep the best objective.
    #[arg(long)]
    k_sweep: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated device counts.
    #[arg(long, value_delimiter = ',', required = true)]
    devices: Vec<usize>,
    /// Comma-separated AP counts.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    aps: Vec<usize>,
    /// Comma-separated algorithms.
    #[arg(long, value_delimiter = ',', default_value = "rforce,kmeans")]
    algo: Vec<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    k_sweep: bool,
    /// Write 0 instead of measured runtimes so reruns are byte-identical.
    #[arg(long)]
    no_timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    solution: PathBuf,
    /// Also fail when fewer devices are served than the outage bound allows.
    #[arg(long)]
    strict: bool,
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p).with_context(|| format!("loading config {}", p.display())),
        None => Ok(RunConfig::default()),
    }
}

fn apply_common(cfg: &mut RunConfig, args: &CommonArgs) -> Result<()> {
    if let Some(seed) = args.seed {
        cfg.base_seed = seed;
        cfg.seeds = None;
    }
    if args.devices.is_some() || args.aps.is_some() {
        let mut g = match &cfg.scenario {
            ScenarioSource::Generate(g) => g.clone(),
            ScenarioSource::File(_) => GenerateParams::new(200, 1),
        };
        g.n_devices = args.devices.unwrap_or(g.n_devices);
        g.n_aps = args.aps.unwrap_or(g.n_aps);
        cfg.scenario = ScenarioSource::Generate(g);
    }
    Ok(())
}

fn write_or_print(out: Option<&Path>, name: &str, text: &str) -> Result<()> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let path = dir.join(name);
            fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn generate(args: CommonArgs) -> Result<ExitCode> {
    let mut cfg = load_config(args.config.as_deref())?;
    apply_common(&mut cfg, &args)?;
    if let ScenarioSource::File(p) = &cfg.scenario {
        bail!("config names scenario file {}; nothing to generate", p.display());
    }
    let (scenario, _) = harness::resolve_scenario(&cfg)?;
    write_or_print(args.out.as_deref(), "scenario.json", &scenario.to_json())?;
    Ok(ExitCode::SUCCESS)
}

fn run(args: RunArgs) -> Result<ExitCode> {
    let mut cfg = load_config(args.common.config.as_deref())?;
    apply_common(&mut cfg, &args.common)?;
    if let Some(p) = args.scenario {
        cfg.scenario = ScenarioSource::File(p);
    }
    if let Some(a) = &args.algo {
        cfg.algorithm = a.parse()?;
    }
    if args.k.is_some() {
        cfg.rforce.k_centroids = args.k;
    }
    cfg.k_sweep |= args.k_sweep;

    let out = run_single(&cfg)?;
    let dir = args.common.out.or_else(|| cfg.output_dir.clone());
    match dir {
        Some(dir) => {
            write_run_outputs(&out, &dir)?;
            eprintln!("wrote scenario, solution and metrics to {}", dir.display());
        }
        None => println!("{}", out.solved.solution.to_json()),
    }
    let m = &out.solved.metrics;
    eprintln!(
        "{}: {} heads, {}/{} served, failure cost {:.4}, objective {:.4}, {:.1} ms",
        cfg.algorithm,
        m.n_heads,
        m.n_served,
        out.scenario.n_devices(),
        m.total_failure_cost,
        m.objective,
        out.solved.runtime_ms
    );
    Ok(ExitCode::SUCCESS)
}

fn sweep(args: SweepArgs) -> Result<ExitCode> {
    let mut cfg = load_config(args.config.as_deref())?;
    if let Some(seed) = args.seed {
        cfg.base_seed = seed;
        cfg.seeds = None;
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
        cfg.seeds = None;
    }
    if args.k.is_some() {
        cfg.rforce.k_centroids = args.k;
    }
    cfg.k_sweep |= args.k_sweep;
    if args.no_timing {
        cfg.record_timing = false;
    }
    let algorithms = args
        .algo
        .iter()
        .map(|a| a.parse::<Algorithm>())
        .collect::<Result<Vec<_>, _>>()?;

    let result = run_sweep(&cfg, &args.devices, &args.aps, &algorithms)?;
    for cell in result.cells.iter().filter(|c| c.skipped.is_some()) {
        eprintln!(
            "skipped {} at N={} M={}: {}",
            cell.algorithm,
            cell.n_devices,
            cell.n_aps,
            cell.skipped.as_deref().unwrap_or_default()
        );
    }
    match args.out.or_else(|| cfg.output_dir.clone()) {
        Some(dir) => {
            result.write_to_dir(&dir)?;
            eprintln!("wrote sweep.csv and sweep.json to {}", dir.display());
        }
        None => print!("{}", result.to_csv_string()),
    }
    Ok(ExitCode::SUCCESS)
}

fn check(args: CheckArgs) -> Result<ExitCode> {
    let cfg = load_config(args.config.as_deref())?;
    let scenario = load_scenario(&args.scenario)?;
    let text = fs::read_to_string(&args.solution).with_context(|| format!("reading {}", args.solution.display()))?;
    let sol = ClusterSolution::from_json(&text).with_context(|| format!("parsing {}", args.solution.display()))?;
    if sol.n_devices() != scenario.n_devices() {
        bail!(
            "solution covers {} devices but the scenario has {}",
            sol.n_devices(),
            scenario.n_devices()
        );
    }
    let report = check_feasibility(&sol, &scenario, &cfg.radio, &cfg.constraints());
    print!("{}", report.summary());
    let flags = report.flags();
    let ok = flags.structural_ok() && (!args.strict || flags.min_served);
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Run(a) => run(a),
        Command::Sweep(a) => sweep(a),
        Command::Check(a) => check(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
