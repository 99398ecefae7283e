//! Solution scoring and constraint checking.

use serde::{Deserialize, Serialize};

use crate::baselines::objective_value;
use crate::radio::{self, RadioParams};
use crate::scenario::Scenario;
use crate::solution::ClusterSolution;

/// Degree caps and outage tolerance shared by all solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constraints {
    pub delta_lr: usize,
    pub delta_sr: usize,
    pub theta: f64,
}

impl Default for Constraints {
    fn default() -> Self {
        Self {
            delta_lr: 30,
            delta_sr: 10,
            theta: 0.05,
        }
    }
}

/// Minimum number of served devices, `ceil((1 - theta) N)`.
pub fn min_served(n_devices: usize, theta: f64) -> usize {
    let need = (1.0 - theta) * n_devices as f64;
    // Absorb representation error such as 0.95 * 100 = 94.99999999999999.
    (need - 1e-9).ceil().max(0.0) as usize
}

/// Battery model used for head lifetimes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LifetimeModel {
    pub capacity_mah: f64,
    /// Continuous download current draw, mA.
    pub current_ma: f64,
}

impl Default for LifetimeModel {
    /// 2000 mAh battery drained at 340 mA (1.27 W at 3.7 V, rounded).
    fn default() -> Self {
        Self {
            capacity_mah: 2000.0,
            current_ma: 340.0,
        }
    }
}

impl LifetimeModel {
    pub fn from_power(capacity_mah: f64, power_w: f64, voltage_v: f64) -> Self {
        Self {
            capacity_mah,
            current_ma: power_w / voltage_v * 1000.0,
        }
    }

    /// Minutes of continuous operation left at `battery_frac`.
    pub fn head_lifetime(&self, battery_frac: f64) -> f64 {
        battery_frac * self.capacity_mah / self.current_ma * 60.0
    }
}

/// Lifetime in minutes under the default battery model.
pub fn head_lifetime(battery_frac: f64) -> f64 {
    LifetimeModel::default().head_lifetime(battery_frac)
}

/// `(1 - reliability) * member count` per entry of `sol.heads`, and the total.
pub fn failure_cost(sol: &ClusterSolution, reliabilities: &[f64]) -> (Vec<f64>, f64) {
    let per_head: Vec<f64> = sol
        .heads
        .iter()
        .zip(sol.member_counts())
        .map(|(&h, n)| (1.0 - reliabilities[h]) * n as f64)
        .collect();
    let total = per_head.iter().sum();
    (per_head, total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityFlags {
    pub two_hop: bool,
    pub single_link: bool,
    pub ap_degree: bool,
    pub head_degree: bool,
    pub min_served: bool,
    pub lr_snr: bool,
    pub sr_snr: bool,
}

impl FeasibilityFlags {
    /// Every constraint except the outage bound.
    pub fn structural_ok(&self) -> bool {
        self.two_hop && self.single_link && self.ap_degree && self.head_degree && self.lr_snr && self.sr_snr
    }

    pub fn all_ok(&self) -> bool {
        self.structural_ok() && self.min_served
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionMetrics {
    pub total_failure_cost: f64,
    /// Bits per second, averaged over active SR links (0 when none).
    pub avg_sr_bitrate: f64,
    /// Bits per second, averaged over active LR links (0 when none).
    pub avg_lr_bitrate: f64,
    pub outage_fraction: f64,
    /// Minutes, averaged over heads (0 when none).
    pub avg_head_lifetime: f64,
    pub objective: f64,
    pub n_heads: usize,
    pub n_served: usize,
    pub feasibility: FeasibilityFlags,
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

pub fn evaluate(
    sol: &ClusterSolution,
    scenario: &Scenario,
    radio_params: &RadioParams,
    constraints: &Constraints,
    rho: f64,
    lifetime: &LifetimeModel,
) -> SolutionMetrics {
    let rel = radio::reliabilities(&scenario.devices, radio_params);
    let lr_links: Vec<(usize, usize)> = sol
        .lr_links()
        .filter(|&(h, m)| h < scenario.n_devices() && m < scenario.n_aps())
        .collect();
    let mut served_head = vec![false; sol.n_devices()];
    for &(h, _) in &lr_links {
        served_head[h] = true;
    }
    let avg_lr_bitrate = mean(lr_links.iter().map(|&(h, m)| {
        radio::bitrate(
            radio_params.lr_snr(&scenario.aps[m], &scenario.devices[h]),
            radio_params,
        )
    }));
    let avg_sr_bitrate = mean(sol.sr_links().filter(|&(h, _)| served_head[h]).map(|(h, i)| {
        let s = radio_params.sr_snr(scenario.devices[h].pos(), scenario.devices[i].pos());
        radio::bitrate(s, radio_params)
    }));
    let (_, total_failure_cost) = failure_cost(sol, &rel);
    let avg_head_lifetime = mean(
        sol.heads
            .iter()
            .map(|&h| lifetime.head_lifetime(scenario.devices[h].battery_frac)),
    );
    let outage = sol.outage().len();
    let n = sol.n_devices().max(1);
    let report = check_feasibility(sol, scenario, radio_params, constraints);

    SolutionMetrics {
        total_failure_cost,
        avg_sr_bitrate,
        avg_lr_bitrate,
        outage_fraction: outage as f64 / n as f64,
        avg_head_lifetime,
        objective: objective_value(sol, scenario, radio_params, rho),
        n_heads: sol.heads.len(),
        n_served: sol.n_devices() - outage,
        feasibility: report.flags(),
    }
}

/// Outcome of one constraint: the offending device (or AP) indices.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub violators: Vec<usize>,
}

impl ConstraintCheck {
    pub fn passed(&self) -> bool {
        self.violators.is_empty()
    }

    fn from_violators(mut v: Vec<usize>) -> Self {
        v.sort_unstable();
        v.dedup();
        Self { violators: v }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    /// Heads that serve members without an AP link.
    pub two_hop: ConstraintCheck,
    /// Devices with more than one reception link.
    pub single_link: ConstraintCheck,
    /// APs above `delta_lr` heads.
    pub ap_degree: ConstraintCheck,
    /// Heads above `delta_sr` members.
    pub head_degree: ConstraintCheck,
    pub served: usize,
    pub required_served: usize,
    /// Heads whose LR SNR is below threshold.
    pub lr_snr: ConstraintCheck,
    /// Members whose SR SNR is below threshold.
    pub sr_snr: ConstraintCheck,
}

impl FeasibilityReport {
    pub fn min_served_ok(&self) -> bool {
        self.served >= self.required_served
    }

    pub fn flags(&self) -> FeasibilityFlags {
        FeasibilityFlags {
            two_hop: self.two_hop.passed(),
            single_link: self.single_link.passed(),
            ap_degree: self.ap_degree.passed(),
            head_degree: self.head_degree.passed(),
            min_served: self.min_served_ok(),
            lr_snr: self.lr_snr.passed(),
            sr_snr: self.sr_snr.passed(),
        }
    }

    /// One line per constraint.
    pub fn summary(&self) -> String {
        let line = |name: &str, c: &ConstraintCheck| {
            if c.passed() {
                format!("{name}: pass\n")
            } else {
                format!("{name}: FAIL {:?}\n", c.violators)
            }
        };
        let mut out = String::new();
        out += &line("two-hop (head has AP)", &self.two_hop);
        out += &line("single reception link", &self.single_link);
        out += &line("AP degree", &self.ap_degree);
        out += &line("head degree", &self.head_degree);
        out += &format!(
            "minimum served: {} ({} of {} required)\n",
            if self.min_served_ok() { "pass" } else { "FAIL" },
            self.served,
            self.required_served
        );
        out += &line("LR SNR", &self.lr_snr);
        out += &line("SR SNR", &self.sr_snr);
        out
    }
}

/// Checks each constraint independently on an arbitrary (possibly
/// hand-built) solution. Out-of-range indices are reported as violations of
/// the constraint they occur in rather than causing a panic.
pub fn check_feasibility(
    sol: &ClusterSolution,
    scenario: &Scenario,
    radio_params: &RadioParams,
    constraints: &Constraints,
) -> FeasibilityReport {
    let n = scenario.n_devices();
    let m_aps = scenario.n_aps();

    // Reception links per device as the solution actually encodes them.
    let mut links = vec![0usize; n.max(sol.n_devices())];
    let mut has_ap = vec![false; links.len()];
    let mut single_link = Vec::new();
    let mut ap_load = vec![0usize; m_aps];
    let mut ap_degree = Vec::new();
    let mut lr_snr = Vec::new();
    for (idx, &h) in sol.heads.iter().enumerate() {
        let Some(&ap) = sol.ap_of_head.get(idx) else {
            continue;
        };
        if h >= links.len() {
            single_link.push(h);
            continue;
        }
        if sol.head_of.get(h).copied().flatten() != Some(h) {
            single_link.push(h);
        }
        if let Some(m) = ap {
            links[h] += 1;
            has_ap[h] = true;
            if m >= m_aps {
                ap_degree.push(m);
                continue;
            }
            ap_load[m] += 1;
            if h < n && radio_params.lr_snr(&scenario.aps[m], &scenario.devices[h]) < radio_params.snr_min_lr {
                lr_snr.push(h);
            }
        }
    }
    ap_degree.extend((0..m_aps).filter(|&m| ap_load[m] > constraints.delta_lr));

    let mut members = vec![0usize; links.len()];
    let mut two_hop = Vec::new();
    let mut sr_snr = Vec::new();
    for (i, hd) in sol.head_of.iter().enumerate() {
        let Some(h) = *hd else { continue };
        if h == i {
            continue;
        }
        if h >= links.len() {
            single_link.push(i);
            continue;
        }
        links[i] += 1;
        members[h] += 1;
        if !has_ap[h] {
            two_hop.push(h);
        }
        if h < n && i < n {
            let s = radio_params.sr_snr(scenario.devices[h].pos(), scenario.devices[i].pos());
            if s < radio_params.snr_min_sr {
                sr_snr.push(i);
            }
        }
    }
    single_link.extend((0..links.len()).filter(|&i| links[i] > 1));
    let head_degree: Vec<usize> = (0..members.len())
        .filter(|&h| members[h] > constraints.delta_sr)
        .collect();

    let served = (0..n.min(sol.n_devices()))
        .filter(|&i| match sol.head_of[i] {
            Some(h) if h == i => has_ap[i],
            Some(h) => h < has_ap.len() && has_ap[h],
            None => false,
        })
        .count();

    FeasibilityReport {
        two_hop: ConstraintCheck::from_violators(two_hop),
        single_link: ConstraintCheck::from_violators(single_link),
        ap_degree: ConstraintCheck::from_violators(ap_degree),
        head_degree: ConstraintCheck::from_violators(head_degree),
        served,
        required_served: min_served(n, constraints.theta),
        lr_snr: ConstraintCheck::from_violators(lr_snr),
        sr_snr: ConstraintCheck::from_violators(sr_snr),
    }
}
