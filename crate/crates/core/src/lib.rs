//! Reliability-aware cluster formation for device-to-device (D2D) cooperative
//! wireless networks.
//!
//! Devices are grouped into clusters whose heads relay access-point traffic to
//! the other members over short-range (SR) links. Three solvers produce the
//! same [`ClusterSolution`] shape:
//!
//! * [`rforce`]: the electrostatic-force heuristic (virtual centroids attracted
//!   by reliable devices, repelled by each other), followed by centroid-to-device
//!   mapping and degree-bounded head-to-AP association.
//! * [`baselines::kmeans`]: capacity-constrained Lloyd clustering with
//!   reliability-blind head selection.
//! * [`baselines::exact`]: branch-and-bound over the full integer program, for
//!   small instances.
//!
//! [`metrics`] scores solutions and checks every constraint; [`harness`] runs
//! single experiments and seeded Monte-Carlo sweeps.

pub mod baselines;
pub mod geom;
pub mod harness;
pub mod metrics;
pub mod radio;
pub mod rforce;
pub mod scenario;
pub mod solution;

pub use baselines::{exact_solve, kmeans_cluster, objective_value, ExactSolverConfig};
pub use geom::Point;
pub use metrics::{check_feasibility, evaluate, Constraints, FeasibilityReport, SolutionMetrics};
pub use radio::RadioParams;
pub use rforce::{run_rforce, RForceParams};
pub use scenario::{generate_scenario, load_scenario, save_scenario, GenerateParams, Scenario};
pub use solution::ClusterSolution;
