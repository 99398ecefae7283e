//! Acceptance suite. Each test prints one `criterion N: PASS|FAIL` line to
//! stdout (bypassing the test harness capture) and then asserts.

mod common;

use std::io::Write;
use std::sync::OnceLock;
use std::time::Instant;

use common::*;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rforce::baselines::{
    exact_solve, kmeans::initial_centroids, kmeans::lloyd, kmeans::MAX_LLOYD_ITERS, objective_value,
};
use rforce::geom::Point;
use rforce::harness::{seeds, solve, Algorithm, RunConfig, Solved};
use rforce::metrics::check_feasibility;
use rforce::radio::{device_reliability, RadioParams};
use rforce::rforce::{centroid_charge, device_charge, pairwise_force, run_rforce, ForceSimulation, RForceParams};
use rforce::scenario::{generate_scenario, GenerateParams, Scenario};

fn report(id: u32, pass: bool, what: &str, detail: String) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "criterion {id}: {verdict} | {what} | {detail}");
    let _ = out.flush();
    assert!(pass, "criterion {id} failed: {what} | {detail}");
}

struct Run {
    n: usize,
    m: usize,
    algorithm: Algorithm,
    scenario: std::sync::Arc<Scenario>,
    solved: Solved,
}

/// Paired trials through the public harness API, keeping every solution.
fn paired(cfg: &RunConfig, n: usize, m: usize, algorithms: &[Algorithm]) -> Vec<Run> {
    let mut runs = Vec::new();
    for ts in cfg.trial_seeds() {
        let sseed = seeds::scenario_seed(ts, n, m);
        let scenario = std::sync::Arc::new(generate_scenario(&GenerateParams::new(n, m), sseed).unwrap());
        for &algorithm in algorithms {
            let solved = solve(algorithm, &scenario, cfg, seeds::algorithm_seed(sseed, algorithm)).unwrap();
            runs.push(Run {
                n,
                m,
                algorithm,
                scenario: scenario.clone(),
                solved,
            });
        }
    }
    runs
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.collect();
    v.iter().sum::<f64>() / v.len() as f64
}

fn mean_of(runs: &[Run], n: usize, m: usize, a: Algorithm, f: impl Fn(&Solved) -> f64) -> f64 {
    mean(
        runs.iter()
            .filter(|r| r.n == n && r.m == m && r.algorithm == a)
            .map(|r| f(&r.solved)),
    )
}

fn table2(trials: usize) -> RunConfig {
    RunConfig {
        trials,
        ..RunConfig::default()
    }
}

const GRID: [usize; 5] = [50, 100, 150, 200, 250];

fn grid() -> &'static (Vec<Run>, f64) {
    static CELL: OnceLock<(Vec<Run>, f64)> = OnceLock::new();
    CELL.get_or_init(|| {
        let cfg = table2(25);
        let mut runs = Vec::new();
        let mut n200_secs = 0.0;
        for n in GRID {
            let t = Instant::now();
            runs.extend(paired(&cfg, n, 1, &[Algorithm::Rforce, Algorithm::Kmeans]));
            if n == 200 {
                n200_secs = t.elapsed().as_secs_f64();
            }
        }
        (runs, n200_secs)
    })
}

struct SmallInstances {
    runs: Vec<Run>,
    dominance_violations: Vec<String>,
    oracle_checked: usize,
    oracle_mismatches: Vec<String>,
    secs: f64,
}

fn small() -> &'static SmallInstances {
    static CELL: OnceLock<SmallInstances> = OnceLock::new();
    CELL.get_or_init(|| {
        let started = Instant::now();
        let cfg = table2(1);
        let lim = Limits::default();
        let mut out = SmallInstances {
            runs: Vec::new(),
            dominance_violations: Vec::new(),
            oracle_checked: 0,
            oracle_mismatches: Vec::new(),
            secs: 0.0,
        };
        for i in 0..64u64 {
            let n = 1 + (i % 8) as usize;
            let sseed = seeds::mix(&[0xACCE, i]);
            let s = std::sync::Arc::new(generate_scenario(&GenerateParams::new(n, 1), sseed).unwrap());
            let mut solved = Vec::new();
            for a in Algorithm::ALL {
                let r = solve(a, &s, &cfg, seeds::algorithm_seed(sseed, a)).unwrap();
                solved.push(r.clone());
                out.runs.push(Run {
                    n,
                    m: 1,
                    algorithm: a,
                    scenario: s.clone(),
                    solved: r,
                });
            }
            let exact = solved[2].metrics.objective;
            for (a, r) in Algorithm::ALL[..2].iter().zip(&solved) {
                let h = r.metrics.objective;
                if exact > h + 1e-12 * h.abs().max(1.0) {
                    out.dominance_violations
                        .push(format!("instance {i} (N={n}): exact {exact} > {a} {h}"));
                }
            }
            if n <= 5 {
                out.oracle_checked += 1;
                let (best, _) = brute_force(&s, &lim).expect("reference instances are feasible");
                let direct = exact_solve(&s, &RadioParams::default(), &cfg.exact_config())
                    .unwrap()
                    .objective;
                if !rel_close(direct, best, 1e-12) || !rel_close(exact, best, 1e-12) {
                    out.oracle_mismatches
                        .push(format!("instance {i}: exact {direct} oracle {best}"));
                }
            }
        }
        out.secs = started.elapsed().as_secs_f64();
        out
    })
}

struct Scale {
    runs: Vec<Run>,
    rforce_secs: Vec<f64>,
}

fn scale() -> &'static Scale {
    static CELL: OnceLock<Scale> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut runs = Vec::new();
        let mut rforce_secs = Vec::new();
        for seed in 1..=3u64 {
            let cfg = RunConfig {
                base_seed: seed,
                ..table2(1)
            };
            let before = runs.len();
            runs.extend(paired(&cfg, 4000, 4, &[Algorithm::Rforce, Algorithm::Kmeans]));
            rforce_secs.push(runs[before].solved.runtime_ms / 1e3);
        }
        Scale { runs, rforce_secs }
    })
}

fn four_ap() -> &'static Vec<Run> {
    static CELL: OnceLock<Vec<Run>> = OnceLock::new();
    CELL.get_or_init(|| {
        let cfg = RunConfig {
            k_sweep: true,
            ..table2(25)
        };
        let mut runs = paired(&cfg, 200, 1, &[Algorithm::Rforce]);
        runs.extend(paired(&cfg, 200, 4, &[Algorithm::Rforce]));
        runs
    })
}

#[test]
fn criterion_1_exact_is_a_lower_bound_and_matches_enumeration() {
    let s = small();
    let instances = s.runs.len() / 3;
    let pass = instances >= 50
        && s.dominance_violations.is_empty()
        && s.oracle_checked > 0
        && s.oracle_mismatches.is_empty()
        && s.secs < 120.0;
    report(
        1,
        pass,
        "exact <= heuristics on every N<=8 instance, exact == enumeration for N<=5, < 2 min",
        format!(
            "{instances} instances, {} dominance violations {:?}, {} enumerated with {} mismatches, {:.2} s",
            s.dominance_violations.len(),
            s.dominance_violations.iter().take(3).collect::<Vec<_>>(),
            s.oracle_checked,
            s.oracle_mismatches.len(),
            s.secs
        ),
    );
}

#[test]
fn criterion_2_kmeans_failure_cost_at_least_one_and_a_half_times_rforce() {
    let (runs, secs) = grid();
    let rf = mean_of(runs, 200, 1, Algorithm::Rforce, |s| s.metrics.total_failure_cost);
    let km = mean_of(runs, 200, 1, Algorithm::Kmeans, |s| s.metrics.total_failure_cost);
    let ratio = km / rf;
    report(
        2,
        ratio >= 1.5 && *secs < 60.0,
        "N=200 M=1, 25 paired trials: mean kMeans cost >= 1.5x RForce, < 1 min",
        format!("RForce {rf:.3}, kMeans {km:.3}, ratio {ratio:.3}, {secs:.2} s"),
    );
}

#[test]
fn criterion_3_rforce_sr_bitrate_within_twenty_percent_of_kmeans() {
    let (runs, _) = grid();
    let rf = mean_of(runs, 200, 1, Algorithm::Rforce, |s| s.metrics.avg_sr_bitrate);
    let km = mean_of(runs, 200, 1, Algorithm::Kmeans, |s| s.metrics.avg_sr_bitrate);
    let ratio = rf / km;
    report(
        3,
        ratio >= 0.8,
        "N=200 M=1, 25 paired trials: RForce mean SR bitrate >= 0.8x kMeans",
        format!(
            "RForce {:.3} Mbps, kMeans {:.3} Mbps, ratio {ratio:.3}",
            rf / 1e6,
            km / 1e6
        ),
    );
}

#[test]
fn criterion_4_head_lifetime_ordering_and_trend() {
    let (runs, _) = grid();
    let rf: Vec<f64> = GRID
        .iter()
        .map(|&n| mean_of(runs, n, 1, Algorithm::Rforce, |s| s.metrics.avg_head_lifetime))
        .collect();
    let km: Vec<f64> = GRID
        .iter()
        .map(|&n| mean_of(runs, n, 1, Algorithm::Kmeans, |s| s.metrics.avg_head_lifetime))
        .collect();
    let ordered = rf.iter().zip(&km).all(|(r, k)| r >= k);
    let drops: Vec<f64> = rf
        .windows(2)
        .filter(|w| w[1] < w[0])
        .map(|w| (w[0] - w[1]) / w[0])
        .collect();
    let trend = drops.is_empty() || (drops.len() == 1 && drops[0] <= 0.05);
    report(
        4,
        ordered && trend,
        "N in 50..250, M=1, 25 trials: RForce lifetime >= kMeans at every N; RForce non-decreasing in N with at most one inversion <= 5%",
        format!(
            "RForce {:?} min, kMeans {:?} min, ordering {}, inversions {:?}",
            rf.iter().map(|x| (x * 10.0).round() / 10.0).collect::<Vec<_>>(),
            km.iter().map(|x| (x * 10.0).round() / 10.0).collect::<Vec<_>>(),
            if ordered { "holds" } else { "violated" },
            drops.iter().map(|d| format!("{:.2}%", d * 100.0)).collect::<Vec<_>>()
        ),
    );
}

#[test]
fn criterion_5_scales_to_four_thousand_devices() {
    let s = scale();
    let fast = s.rforce_secs.iter().all(|&t| t < 60.0);
    let pairs: Vec<(f64, f64)> = s
        .runs
        .chunks(2)
        .map(|p| {
            (
                p[0].solved.metrics.total_failure_cost,
                p[1].solved.metrics.total_failure_cost,
            )
        })
        .collect();
    let cheaper = pairs.iter().all(|(r, k)| r < k);
    report(
        5,
        fast && cheaper,
        "N=4000 M=4, 3 seeds: RForce < 60 s and failure cost below kMeans",
        format!(
            "RForce times {:?} s, (RForce, kMeans) costs {:?}",
            s.rforce_secs
                .iter()
                .map(|t| (t * 100.0).round() / 100.0)
                .collect::<Vec<_>>(),
            pairs.iter().map(|(a, b)| (a.round(), b.round())).collect::<Vec<_>>()
        ),
    );
}

#[test]
fn criterion_6_every_emitted_solution_is_structurally_feasible() {
    let sources: [&[Run]; 4] = [&small().runs, &grid().0, &scale().runs, four_ap()];
    let mut total = 0;
    let mut failures = Vec::new();
    let mut outage = std::collections::BTreeMap::<&str, (usize, usize)>::new();
    let radio = RadioParams::default();
    let cfg = RunConfig::default();
    for run in sources.into_iter().flatten() {
        total += 1;
        let rep = check_feasibility(&run.solved.solution, &run.scenario, &radio, &cfg.constraints());
        let f = rep.flags();
        if !f.structural_ok() {
            failures.push(format!("{} N={} M={}: {:?}", run.algorithm, run.n, run.m, f));
        }
        if let Some(v) = structural_violation(&run.solved.solution, &run.scenario, cfg.delta_lr, cfg.delta_sr) {
            failures.push(format!("{} N={} M={}: {v}", run.algorithm, run.n, run.m));
        }
        let e = outage.entry(run.algorithm.name()).or_default();
        e.0 += f.min_served as usize;
        e.1 += 1;
    }
    let exact_ok = outage.get("exact").is_some_and(|&(p, t)| p == t);
    let rates: Vec<String> = outage
        .iter()
        .map(|(a, (p, t))| format!("{a} {p}/{t} ({:.1}%)", 100.0 * *p as f64 / *t as f64))
        .collect();
    report(
        6,
        failures.is_empty() && exact_ok,
        "all solutions pass two-hop, single-link, degree and SNR checks; outage-bound pass rate reported",
        format!(
            "{total} solutions, {} violations {:?}; outage bound met: {}",
            failures.len(),
            failures.iter().take(3).collect::<Vec<_>>(),
            rates.join(", ")
        ),
    );
}

fn run_property<S: Strategy>(
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    let mut runner = TestRunner::new(Config {
        cases: 200,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, test).map_err(|e| format!("{name}: {e}"))
}

#[test]
fn criterion_7_invariant_suites() {
    let mut results = Vec::new();
    results.push(run_property(
        "charge signs",
        (0.0..=1.0f64, 0usize..5000, 1e-6..10.0f64),
        |(g, n, l)| {
            prop_assert!(device_charge(g) <= 0.0 && centroid_charge(n, l) > 0.0);
            Ok(())
        },
    ));
    results.push(run_property(
        "third law",
        (
            -2.0..2.0f64,
            -2.0..2.0f64,
            -100.0..100.0f64,
            -100.0..100.0f64,
            -100.0..100.0f64,
            -100.0..100.0f64,
        ),
        |(qa, qb, ax, ay, bx, by)| {
            let (a, b) = (Point::new(ax, ay), Point::new(bx, by));
            let f = pairwise_force(qa, qb, a, b, 1.0);
            let g = pairwise_force(qb, qa, b, a, 1.0);
            prop_assert!(f.fx == -g.fx && f.fy == -g.fy);
            Ok(())
        },
    ));
    results.push(run_property(
        "fixed step length",
        (
            points(),
            prop::collection::vec(0.0..=1.0f64, 40),
            prop::collection::vec((0.0..100.0f64, 0.0..100.0f64), 1..6),
        ),
        |(devs, rel, init)| {
            let init: Vec<Point> = init.into_iter().map(|(x, y)| Point::new(x, y)).collect();
            let params = RForceParams::default();
            let mut sim = ForceSimulation::new(&init, &devs, &rel[..devs.len()], &params);
            for _ in 0..30 {
                for s in sim.step() {
                    prop_assert!(s == 0.0 || s == params.eta);
                }
            }
            Ok(())
        },
    ));
    results.push(run_property(
        "Lloyd monotonicity",
        (points(), 1usize..8, any::<u64>()),
        |(pts, k, seed)| {
            let init = initial_centroids(&pts, k, (100.0, 100.0), seed);
            let out = lloyd(&pts, &init, pts.len(), MAX_LLOYD_ITERS);
            for w in out.sse.windows(2) {
                prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-9);
            }
            Ok(())
        },
    ));
    results.push(run_property(
        "reliability boundaries",
        (0.0..0.99f64, 0.0..=1.0f64),
        |(beta, r)| {
            prop_assert_eq!(device_reliability(beta, r, beta), 0.0);
            prop_assert!((device_reliability(1.0, r, beta) - r).abs() <= 1e-15);
            Ok(())
        },
    ));
    results.push(run_property(
        "determinism byte-equality",
        (1usize..100, 1usize..5, any::<u64>()),
        |(n, m, seed)| {
            let s = generate_scenario(&GenerateParams::new(n, m), seed).unwrap();
            let again = generate_scenario(&GenerateParams::new(n, m), seed).unwrap();
            prop_assert_eq!(s.to_json(), again.to_json());
            let p = RForceParams::default();
            let radio = RadioParams::default();
            prop_assert_eq!(
                run_rforce(&s, &radio, &p, seed).to_json(),
                run_rforce(&s, &radio, &p, seed).to_json()
            );
            let sol = run_rforce(&s, &radio, &p, seed);
            prop_assert_eq!(
                objective_value(&sol, &s, &radio, 20.0).to_bits(),
                objective_value(&sol, &s, &radio, 20.0).to_bits()
            );
            Ok(())
        },
    ));
    let failed: Vec<String> = results.into_iter().filter_map(Result::err).collect();
    report(
        7,
        failed.is_empty(),
        "charge signs, third law, fixed step, Lloyd monotonicity, reliability boundaries, determinism (200 cases each)",
        if failed.is_empty() {
            "6 suites x 200 cases".into()
        } else {
            failed.join("; ")
        },
    );
}

#[test]
fn criterion_8_four_aps_raise_head_count_and_failure_cost() {
    let runs = four_ap();
    let heads = |m| mean_of(runs, 200, m, Algorithm::Rforce, |s| s.metrics.n_heads as f64);
    let cost = |m| mean_of(runs, 200, m, Algorithm::Rforce, |s| s.metrics.total_failure_cost);
    let ks = |m| mean_of(runs, 200, m, Algorithm::Rforce, |s| s.k.unwrap_or(0) as f64);
    let (h1, h4, c1, c4) = (heads(1), heads(4), cost(1), cost(4));
    report(
        8,
        h4 > h1 && c4 > c1,
        "N=200, 25 trials, K-sweep: RForce mean head count and failure cost with M=4 exceed M=1",
        format!(
            "heads M=1 {h1:.2} M=4 {h4:.2}; cost M=1 {c1:.3} M=4 {c4:.3}; mean chosen K M=1 {:.2} M=4 {:.2}",
            ks(1),
            ks(4)
        ),
    );
}
