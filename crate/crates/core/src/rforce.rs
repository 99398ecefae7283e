//! RForce: reliability-aware clustering by electrostatic forces.
//!
//! Phase 1 scatters `K` virtual centroids carrying positive charges
//! `lambda / (N_k + 1)` over the area. Devices carry the fixed negative charge
//! `-reliability`, so centroids repel each other and are pulled toward
//! reliable devices. Each iteration re-associates devices to their nearest
//! centroid with spare capacity, sums Coulomb forces, and moves every centroid
//! a fixed step `eta` along its net force.
//!
//! Phase 2 turns each centroid into a real cluster head (the nearest unclaimed
//! device). Phase 3 attaches heads to access points greedily by distance under
//! the per-AP degree bound. Finally links below the SNR thresholds are pruned.

use std::collections::VecDeque;

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geom::{nearest_where, Point};
use crate::radio::{self, RadioParams};
use crate::scenario::Scenario;
use crate::solution::ClusterSolution;

/// Distances below this are floored when computing force magnitudes.
pub const MIN_FORCE_DISTANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Centroid {
    pub x: f64,
    pub y: f64,
    /// Devices associated in the current iteration.
    pub degree: usize,
    pub prev_x: f64,
    pub prev_y: f64,
}

impl Centroid {
    pub fn at(p: Point) -> Self {
        Self {
            x: p.x,
            y: p.y,
            degree: 0,
            prev_x: p.x,
            prev_y: p.y,
        }
    }

    pub fn pos(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ForceVector {
    pub fx: f64,
    pub fy: f64,
}

impl ForceVector {
    pub fn norm(self) -> f64 {
        self.fx.hypot(self.fy)
    }
}

impl std::ops::Add for ForceVector {
    type Output = ForceVector;
    fn add(self, o: ForceVector) -> ForceVector {
        ForceVector {
            fx: self.fx + o.fx,
            fy: self.fy + o.fy,
        }
    }
}

impl std::ops::AddAssign for ForceVector {
    fn add_assign(&mut self, o: ForceVector) {
        self.fx += o.fx;
        self.fy += o.fy;
    }
}

/// Which devices attract a centroid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttractionScope {
    /// Only the devices currently associated with the centroid.
    #[default]
    Members,
    /// Every device in the network.
    AllDevices,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RForceParams {
    /// Number of centroids; `None` means `ceil(N / delta_sr)`.
    pub k_centroids: Option<usize>,
    pub lambda: f64,
    /// Step length per iteration, meters.
    pub eta: f64,
    pub kappa: f64,
    /// Meters.
    pub stability_eps: f64,
    /// Iterations of position history used by the stability test.
    pub stability_window: usize,
    pub max_iters: usize,
    pub delta_sr: usize,
    pub delta_lr: usize,
    pub attraction: AttractionScope,
}

impl Default for RForceParams {
    fn default() -> Self {
        Self {
            k_centroids: None,
            lambda: 0.8,
            eta: 0.4,
            kappa: 1.0,
            stability_eps: 0.04,
            stability_window: 5,
            max_iters: 1000,
            delta_sr: 10,
            delta_lr: 30,
            attraction: AttractionScope::Members,
        }
    }
}

impl RForceParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.k_centroids == Some(0) {
            return Err("rforce.k_centroids must be at least 1".into());
        }
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return Err(format!("rforce.lambda must lie in (0, 1], got {}", self.lambda));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(format!("rforce.eta must be positive, got {}", self.eta));
        }
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(format!("rforce.kappa must be positive, got {}", self.kappa));
        }
        if self.stability_eps.is_nan() || self.stability_eps < 0.0 {
            return Err(format!(
                "rforce.stability_eps must be non-negative, got {}",
                self.stability_eps
            ));
        }
        if self.max_iters == 0 || self.stability_window == 0 {
            return Err("rforce.max_iters and rforce.stability_window must be at least 1".into());
        }
        if self.delta_sr == 0 || self.delta_lr == 0 {
            return Err("degree bounds delta_sr and delta_lr must be at least 1".into());
        }
        Ok(())
    }

    /// Centroid count for `n_devices`.
    pub fn k_for(&self, n_devices: usize) -> usize {
        self.k_centroids.unwrap_or_else(|| default_k(n_devices, self.delta_sr))
    }
}

/// Smallest head count whose SR capacity covers every device.
pub fn default_k(n_devices: usize, delta_sr: usize) -> usize {
    n_devices.div_ceil(delta_sr.max(1)).max(1)
}

pub fn device_charge(reliability: f64) -> f64 {
    -reliability
}

pub fn centroid_charge(n_k: usize, lambda: f64) -> f64 {
    lambda / (n_k as f64 + 1.0)
}

/// Coulomb force on a charge at `pos_k` exerted by one at `pos_j`.
///
/// Like charges push `k` away from `j`; unlike charges pull it toward `j`.
/// The distance in the magnitude is floored at [`MIN_FORCE_DISTANCE`];
/// exactly coincident points have no direction and exert no force.
pub fn pairwise_force(q_k: f64, q_j: f64, pos_k: Point, pos_j: Point, kappa: f64) -> ForceVector {
    let dx = pos_k.x - pos_j.x;
    let dy = pos_k.y - pos_j.y;
    let d = dx.hypot(dy);
    if d == 0.0 || q_j == 0.0 || q_k == 0.0 {
        return ForceVector::default();
    }
    let df = d.max(MIN_FORCE_DISTANCE);
    let scale = kappa * (q_k * q_j) / (df * df) / d;
    ForceVector {
        fx: scale * dx,
        fy: scale * dy,
    }
}

/// Net force on a centroid: repulsion from `others`, attraction from
/// `attractors`. Both slices hold `(position, charge)`.
pub fn total_force(
    pos: Point,
    charge: f64,
    others: &[(Point, f64)],
    attractors: &[(Point, f64)],
    kappa: f64,
) -> ForceVector {
    others
        .iter()
        .chain(attractors)
        .fold(ForceVector::default(), |acc, &(p, q)| {
            acc + pairwise_force(charge, q, pos, p, kappa)
        })
}

/// Moves `c` a distance `eta` along `f`, or leaves it in place for a zero
/// force. Returns the displacement length.
pub fn move_centroid(c: &mut Centroid, f: ForceVector, eta: f64) -> f64 {
    c.prev_x = c.x;
    c.prev_y = c.y;
    let norm = f.norm();
    if norm > 0.0 && norm.is_finite() {
        c.x += eta * f.fx / norm;
        c.y += eta * f.fy / norm;
        eta
    } else {
        0.0
    }
}

/// Greedy capacity-bounded association in device index order: each device
/// joins the nearest centroid whose degree is below `delta_sr`. Devices that
/// find no capacity are left out. Degrees are updated in place.
pub fn associate_centroids(centroids: &mut [Centroid], devices: &[Point], delta_sr: usize) -> Vec<Vec<usize>> {
    let mut members = vec![Vec::new(); centroids.len()];
    for (i, &d) in devices.iter().enumerate() {
        let mut best: Option<(usize, f64)> = None;
        for (k, c) in centroids.iter().enumerate() {
            if c.degree >= delta_sr {
                continue;
            }
            let dist = c.pos().distance_sq(d);
            if best.is_none_or(|(_, bd)| dist < bd) {
                best = Some((k, dist));
            }
        }
        if let Some((k, _)) = best {
            centroids[k].degree += 1;
            members[k].push(i);
        }
    }
    members
}

/// Result of the centroid optimization.
#[derive(Debug, Clone, PartialEq)]
pub struct Phase1Outcome {
    pub centroids: Vec<Centroid>,
    /// Devices associated with each centroid at the final positions.
    pub members: Vec<Vec<usize>>,
    pub iterations: usize,
    pub converged: bool,
}

/// Iterative Phase-1 state. Exposed so callers can step it and observe each
/// move; [`phase1`] drives it to completion.
#[derive(Debug, Clone)]
pub struct ForceSimulation<'a> {
    devices: &'a [Point],
    device_charges: Vec<f64>,
    params: &'a RForceParams,
    centroids: Vec<Centroid>,
    members: Vec<Vec<usize>>,
    history: VecDeque<Vec<Point>>,
    iterations: usize,
}

impl<'a> ForceSimulation<'a> {
    pub fn new(initial: &[Point], devices: &'a [Point], reliabilities: &[f64], params: &'a RForceParams) -> Self {
        assert_eq!(devices.len(), reliabilities.len());
        let centroids: Vec<Centroid> = initial.iter().copied().map(Centroid::at).collect();
        let mut history = VecDeque::with_capacity(params.stability_window + 1);
        history.push_back(initial.to_vec());
        Self {
            devices,
            device_charges: reliabilities.iter().map(|&g| device_charge(g)).collect(),
            params,
            members: vec![Vec::new(); centroids.len()],
            centroids,
            history,
            iterations: 0,
        }
    }

    pub fn centroids(&self) -> &[Centroid] {
        &self.centroids
    }

    pub fn members(&self) -> &[Vec<usize>] {
        &self.members
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    fn reassociate(&mut self) {
        for c in &mut self.centroids {
            c.degree = 0;
        }
        self.members = associate_centroids(&mut self.centroids, self.devices, self.params.delta_sr);
        debug_assert!(self.centroids.iter().all(|c| c.degree <= self.params.delta_sr));
    }

    /// One iteration: associate, compute forces, move. Returns the
    /// displacement of every centroid.
    pub fn step(&mut self) -> Vec<f64> {
        self.reassociate();
        let p = self.params;
        let charged: Vec<(Point, f64)> = self
            .centroids
            .iter()
            .zip(&self.members)
            .map(|(c, m)| (c.pos(), centroid_charge(m.len(), p.lambda)))
            .collect();
        let all_devices: Vec<(Point, f64)> = match p.attraction {
            AttractionScope::AllDevices => self
                .devices
                .iter()
                .copied()
                .zip(self.device_charges.iter().copied())
                .collect(),
            AttractionScope::Members => Vec::new(),
        };

        let forces: Vec<ForceVector> = (0..self.centroids.len())
            .map(|k| {
                let (pos, q) = charged[k];
                let mut f = ForceVector::default();
                for (j, &(pj, qj)) in charged.iter().enumerate() {
                    if j != k {
                        f += pairwise_force(q, qj, pos, pj, p.kappa);
                    }
                }
                match p.attraction {
                    AttractionScope::Members => {
                        for &i in &self.members[k] {
                            f += pairwise_force(q, self.device_charges[i], pos, self.devices[i], p.kappa);
                        }
                    }
                    AttractionScope::AllDevices => {
                        f += total_force(pos, q, &[], &all_devices, p.kappa);
                    }
                }
                f
            })
            .collect();

        let steps = self
            .centroids
            .iter_mut()
            .zip(forces)
            .map(|(c, f)| move_centroid(c, f, p.eta))
            .collect();

        self.iterations += 1;
        if self.history.len() > p.stability_window {
            self.history.pop_front();
        }
        self.history
            .push_back(self.centroids.iter().map(Centroid::pos).collect());
        steps
    }

    /// True once every centroid sits within `stability_eps` of one of its
    /// positions from the last `stability_window` iterations. This detects
    /// both fixpoints and short orbits around an equilibrium, which a fixed
    /// step length produces instead of exact convergence.
    pub fn is_stable(&self) -> bool {
        let w = self.params.stability_window;
        if self.iterations < w || self.history.len() < w + 1 {
            return false;
        }
        let now = self.history.back().expect("history is never empty");
        let past = self.history.len() - 1;
        now.iter()
            .enumerate()
            .all(|(k, &c)| (0..past).any(|lag| c.distance(self.history[lag][k]) <= self.params.stability_eps))
    }

    pub fn run(mut self) -> Phase1Outcome {
        let mut converged = false;
        while self.iterations < self.params.max_iters {
            self.step();
            if self.is_stable() {
                converged = true;
                break;
            }
        }
        // Final association at the settled positions feeds Phase 2.
        self.reassociate();
        Phase1Outcome {
            centroids: self.centroids,
            members: self.members,
            iterations: self.iterations,
            converged,
        }
    }
}

/// Uniform random centroid positions over `[0, width] x [0, height]`.
pub fn random_centroids(k: usize, width: f64, height: f64, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..k)
        .map(|_| Point::new(rng.gen::<f64>() * width, rng.gen::<f64>() * height))
        .collect()
}

/// Phase 1 from seeded random initial centroids.
pub fn phase1(
    devices: &[Point],
    reliabilities: &[f64],
    area: (f64, f64),
    params: &RForceParams,
    seed: u64,
) -> Phase1Outcome {
    let k = params.k_for(devices.len());
    let init = random_centroids(k, area.0, area.1, seed);
    phase1_from(&init, devices, reliabilities, params)
}

/// Phase 1 from explicit initial centroid positions.
pub fn phase1_from(
    initial: &[Point],
    devices: &[Point],
    reliabilities: &[f64],
    params: &RForceParams,
) -> Phase1Outcome {
    ForceSimulation::new(initial, devices, reliabilities, params).run()
}

/// Phase 2: maps each centroid (in index order) to the nearest device not yet
/// claimed, which becomes head of that centroid's members.
///
/// Returns `(head_of, heads)`. Devices that are already heads keep that role
/// even if they were associated with a later centroid.
pub fn phase2_map_centroids(
    centroids: &[Point],
    devices: &[Point],
    members: &[Vec<usize>],
) -> (Vec<Option<usize>>, Vec<usize>) {
    let mut head_of: Vec<Option<usize>> = vec![None; devices.len()];
    let mut heads = Vec::new();
    for (k, &c) in centroids.iter().enumerate() {
        let Some(h) = nearest_where(devices, c, |i| head_of[i].is_none()) else {
            warn!("centroid {k} skipped: every device is already claimed");
            continue;
        };
        head_of[h] = Some(h);
        heads.push(h);
        for &i in members.get(k).map(Vec::as_slice).unwrap_or(&[]) {
            if head_of[i] != Some(i) {
                head_of[i] = Some(h);
            }
        }
    }
    (head_of, heads)
}

/// Phase 3: degree-bounded head-to-AP association.
///
/// All (AP, head) pairs are taken in ascending distance, ties broken by AP
/// index then head device id. A head takes the first AP it meets that still
/// has fewer than `delta_lr` heads.
pub fn phase3_associate_aps(aps: &[Point], heads: &[(usize, Point)], delta_lr: usize) -> Vec<Option<usize>> {
    let mut pairs: Vec<(f64, usize, usize, usize)> = Vec::with_capacity(aps.len() * heads.len());
    for (m, &ap) in aps.iter().enumerate() {
        for (slot, &(id, pos)) in heads.iter().enumerate() {
            pairs.push((ap.distance(pos), m, id, slot));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut ap_degree = vec![0usize; aps.len()];
    let mut assigned = vec![None; heads.len()];
    for (_, m, _, slot) in pairs {
        if assigned[slot].is_none() && ap_degree[m] < delta_lr {
            assigned[slot] = Some(m);
            ap_degree[m] += 1;
        }
    }
    assigned
}

/// Removes links below the SNR thresholds. Heads that lose (or never had) an
/// AP go to outage with their members; members on a weak SR link go to outage.
pub fn prune_links(sol: &mut ClusterSolution, scenario: &Scenario, radio: &RadioParams) {
    for (&h, ap) in sol.heads.iter().zip(sol.ap_of_head.iter_mut()) {
        if let Some(m) = *ap {
            if radio.lr_snr(&scenario.aps[m], &scenario.devices[h]) < radio.snr_min_lr {
                *ap = None;
            }
        }
    }
    sol.drop_unserved_heads();
    for i in 0..sol.head_of.len() {
        if let Some(h) = sol.head_of[i] {
            if h != i {
                let s = radio.sr_snr(scenario.devices[h].pos(), scenario.devices[i].pos());
                if s < radio.snr_min_sr {
                    sol.head_of[i] = None;
                }
            }
        }
    }
}

/// Shared tail of the heuristics: heads to APs, then pruning.
pub(crate) fn attach_and_prune(
    scenario: &Scenario,
    radio: &RadioParams,
    head_of: Vec<Option<usize>>,
    heads: Vec<usize>,
    delta_lr: usize,
) -> ClusterSolution {
    let positions: Vec<(usize, Point)> = heads.iter().map(|&h| (h, scenario.devices[h].pos())).collect();
    let ap_of_head = phase3_associate_aps(&scenario.ap_positions(), &positions, delta_lr);
    let mut sol = ClusterSolution {
        heads,
        head_of,
        ap_of_head,
    };
    prune_links(&mut sol, scenario, radio);
    sol
}

/// Full pipeline with diagnostics.
pub fn run_rforce_detailed(
    scenario: &Scenario,
    radio: &RadioParams,
    params: &RForceParams,
    seed: u64,
) -> (ClusterSolution, Phase1Outcome) {
    let devices = scenario.device_positions();
    let rel = radio::reliabilities(&scenario.devices, radio);
    let p1 = phase1(
        &devices,
        &rel,
        (scenario.area_width, scenario.area_height),
        params,
        seed,
    );
    let positions: Vec<Point> = p1.centroids.iter().map(Centroid::pos).collect();
    let (head_of, heads) = phase2_map_centroids(&positions, &devices, &p1.members);
    let sol = attach_and_prune(scenario, radio, head_of, heads, params.delta_lr);
    (sol, p1)
}

pub fn run_rforce(scenario: &Scenario, radio: &RadioParams, params: &RForceParams, seed: u64) -> ClusterSolution {
    run_rforce_detailed(scenario, radio, params, seed).0
}
