//! Capacity-constrained Lloyd clustering with reliability-blind heads.
//!
//! The assignment step is the same greedy nearest-with-capacity rule RForce
//! uses, so the two heuristics differ only in how centroids move and in
//! whether reliability plays any role (here it does not).

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geom::Point;
use crate::radio::RadioParams;
use crate::rforce::{associate_centroids, attach_and_prune, phase2_map_centroids, Centroid};
use crate::scenario::Scenario;
use crate::solution::ClusterSolution;

pub const MAX_LLOYD_ITERS: usize = 300;

#[derive(Debug, Clone, PartialEq)]
pub struct LloydOutcome {
    pub centroids: Vec<Point>,
    pub members: Vec<Vec<usize>>,
    pub iterations: usize,
    pub converged: bool,
    /// Within-cluster sum of squared distances after each update step.
    pub sse: Vec<f64>,
}

fn assign(centroids: &[Point], points: &[Point], delta_sr: usize) -> Vec<Vec<usize>> {
    let mut cs: Vec<Centroid> = centroids.iter().copied().map(Centroid::at).collect();
    associate_centroids(&mut cs, points, delta_sr)
}

fn sse(centroids: &[Point], points: &[Point], members: &[Vec<usize>]) -> f64 {
    members
        .iter()
        .zip(centroids)
        .map(|(m, &c)| m.iter().map(|&i| points[i].distance_sq(c)).sum::<f64>())
        .sum()
}

/// Lloyd iterations from `init` until the assignment stops changing or
/// `max_iters` is reached. Empty clusters keep their centroid.
pub fn lloyd(points: &[Point], init: &[Point], delta_sr: usize, max_iters: usize) -> LloydOutcome {
    let mut centroids = init.to_vec();
    let mut members = assign(&centroids, points, delta_sr);
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iters {
        for (c, m) in centroids.iter_mut().zip(&members) {
            if m.is_empty() {
                continue;
            }
            let (sx, sy) = m
                .iter()
                .fold((0.0, 0.0), |(sx, sy), &i| (sx + points[i].x, sy + points[i].y));
            *c = Point::new(sx / m.len() as f64, sy / m.len() as f64);
        }
        history.push(sse(&centroids, points, &members));
        iterations += 1;
        let next = assign(&centroids, points, delta_sr);
        if next == members {
            converged = true;
            break;
        }
        members = next;
    }
    LloydOutcome {
        centroids,
        members,
        iterations,
        converged,
        sse: history,
    }
}

/// Forgy initialization: `k` distinct devices drawn from the seed; any
/// centroids beyond the device count are placed uniformly in the area.
pub fn initial_centroids(points: &[Point], k: usize, area: (f64, f64), seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picked = k.min(points.len());
    let mut out: Vec<Point> = sample(&mut rng, points.len(), picked)
        .into_iter()
        .map(|i| points[i])
        .collect();
    while out.len() < k {
        out.push(Point::new(rng.gen::<f64>() * area.0, rng.gen::<f64>() * area.1));
    }
    out
}

pub fn kmeans_cluster(
    scenario: &Scenario,
    radio_params: &RadioParams,
    k: usize,
    delta_sr: usize,
    delta_lr: usize,
    seed: u64,
) -> ClusterSolution {
    let points = scenario.device_positions();
    let init = initial_centroids(&points, k.max(1), (scenario.area_width, scenario.area_height), seed);
    let out = lloyd(&points, &init, delta_sr, MAX_LLOYD_ITERS);
    let (head_of, heads) = phase2_map_centroids(&out.centroids, &points, &out.members);
    attach_and_prune(scenario, radio_params, head_of, heads, delta_lr)
}
