//! Comparison solvers and the integer-program objective they are scored by.

pub mod exact;
pub mod kmeans;

pub use exact::{exact_solve, ExactError, ExactOutcome, ExactSolverConfig};
pub use kmeans::kmeans_cluster;

use crate::metrics::failure_cost;
use crate::radio::{self, RadioParams};
use crate::scenario::Scenario;
use crate::solution::ClusterSolution;

/// `rho * total failure cost - sum of LR received powers - sum of SR received
/// powers`, over active links only. Lower is better.
pub fn objective_value(sol: &ClusterSolution, scenario: &Scenario, radio_params: &RadioParams, rho: f64) -> f64 {
    let rel = radio::reliabilities(&scenario.devices, radio_params);
    let (_, cost) = failure_cost(sol, &rel);
    let mut served_head = vec![false; sol.n_devices()];
    let mut lr = 0.0;
    for (h, m) in sol.lr_links() {
        served_head[h] = true;
        lr += radio_params.lr_power(&scenario.aps[m], &scenario.devices[h]);
    }
    let sr: f64 = sol
        .sr_links()
        .filter(|&(h, _)| served_head[h])
        .map(|(h, i)| radio_params.sr_power(scenario.devices[h].pos(), scenario.devices[i].pos()))
        .sum();
    rho * cost - lr - sr
}
