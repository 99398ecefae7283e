mod common;

use common::*;
use rforce::baselines::kmeans_cluster;
use rforce::metrics::{evaluate, Constraints, LifetimeModel};
use rforce::radio::{reliabilities, RadioParams};
use rforce::rforce::{run_rforce, RForceParams};
use rforce::scenario::{generate_scenario, GenerateParams};

#[test]
fn kmeans_takes_the_drained_center_device_and_rforce_does_not() {
    // A drained device in the middle of four healthy ones.
    let s = scenario_from(
        &[
            (50.0, 50.0, 0.1),
            (45.0, 50.0, 0.9),
            (55.0, 50.0, 0.85),
            (50.0, 45.0, 0.8),
            (50.0, 55.0, 0.88),
        ],
        &[(30.0, 30.0)],
        100.0,
    );
    let radio = RadioParams::default();
    let params = RForceParams {
        k_centroids: Some(1),
        ..RForceParams::default()
    };
    for seed in 0..10 {
        let km = kmeans_cluster(&s, &radio, 1, 10, 30, seed);
        assert_eq!(km.heads, vec![0], "seed {seed}");
        let rf = run_rforce(&s, &radio, &params, seed);
        assert_eq!(rf.heads.len(), 1);
        assert_ne!(rf.heads[0], 0, "seed {seed}");
        assert_eq!(rf.served_count(), 5);
    }
}

#[test]
fn rforce_heads_are_more_reliable_than_average() {
    let radio = RadioParams::default();
    let params = RForceParams {
        k_centroids: Some(3),
        ..RForceParams::default()
    };
    let (mut head_sum, mut head_n, mut all_sum, mut all_n) = (0.0, 0usize, 0.0, 0usize);
    for seed in 0..20 {
        let s = generate_scenario(&GenerateParams::new(12, 1), seed).unwrap();
        let rel = reliabilities(&s.devices, &radio);
        let sol = run_rforce(&s, &radio, &params, seed);
        assert!(sol.heads.len() <= 3);
        head_sum += sol.heads.iter().map(|&h| rel[h]).sum::<f64>();
        head_n += sol.heads.len();
        all_sum += rel.iter().sum::<f64>();
        all_n += rel.len();
    }
    let heads = head_sum / head_n as f64;
    let all = all_sum / all_n as f64;
    assert!(heads >= all, "mean head reliability {heads} below network mean {all}");
}

#[test]
fn zero_reliability_cost_is_member_count() {
    let s = generate_scenario(&GenerateParams::new(80, 1).with_battery_range(0.0, 0.3), 17).unwrap();
    let radio = RadioParams::default();
    for sol in [
        run_rforce(&s, &radio, &RForceParams::default(), 17),
        kmeans_cluster(&s, &radio, 8, 10, 30, 17),
    ] {
        let members = sol
            .head_of
            .iter()
            .enumerate()
            .filter(|&(i, h)| matches!(h, Some(h) if *h != i))
            .count();
        let m = evaluate(
            &sol,
            &s,
            &radio,
            &Constraints::default(),
            20.0,
            &LifetimeModel::default(),
        );
        assert_eq!(m.total_failure_cost, members as f64);
        assert_eq!(structural_violation(&sol, &s, 30, 10), None);
    }
}
