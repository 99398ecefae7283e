//! Helpers shared by the integration tests. The link budget and objective
//! here are written out independently of the library so they can serve as
//! oracles.
#![allow(dead_code)]

use proptest::prelude::*;
use rforce::geom::Point;
use rforce::scenario::{AccessPoint, Device, Scenario};
use rforce::solution::ClusterSolution;

pub const G0: f64 = 1e-4;
pub const ALPHA: f64 = 3.0;
pub const NOISE: f64 = 1e-9;
pub const DEV_TX: f64 = 0.22;
pub const BETA: f64 = 0.3;
pub const SNR_MIN: f64 = 1.0;

pub fn rx_power(tx: f64, a: (f64, f64), b: (f64, f64)) -> f64 {
    let d = ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt().max(1.0);
    tx * G0 * d.powf(-ALPHA)
}

pub fn gamma(battery: f64, rating: f64) -> f64 {
    rating * ((battery - BETA) / (1.0 - BETA)).clamp(0.0, 1.0)
}

fn dev_xy(d: &Device) -> (f64, f64) {
    (d.x, d.y)
}

fn ap_xy(a: &AccessPoint) -> (f64, f64) {
    (a.x, a.y)
}

/// P_lr from AP `m` to device `i`.
pub fn p_lr(s: &Scenario, m: usize, i: usize) -> f64 {
    rx_power(s.aps[m].tx_power, ap_xy(&s.aps[m]), dev_xy(&s.devices[i]))
}

/// P_sr from head `h` to member `i`.
pub fn p_sr(s: &Scenario, h: usize, i: usize) -> f64 {
    rx_power(DEV_TX, dev_xy(&s.devices[h]), dev_xy(&s.devices[i]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Role {
    Outage,
    Direct(usize),
    Member(usize),
}

#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub rho: f64,
    pub theta: f64,
    pub delta_lr: usize,
    pub delta_sr: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            rho: 20.0,
            theta: 0.05,
            delta_lr: 30,
            delta_sr: 10,
        }
    }
}

pub fn required_served(n: usize, theta: f64) -> usize {
    let need = (1.0 - theta) * n as f64;
    let r = need.round();
    if (need - r).abs() < 1e-9 {
        r as usize
    } else {
        need.ceil() as usize
    }
}

/// Objective of a role vector, or `None` when any constraint is violated.
pub fn role_objective(s: &Scenario, roles: &[Role], lim: &Limits) -> Option<f64> {
    let n = roles.len();
    let mut ap_load = vec![0usize; s.aps.len()];
    let mut members = vec![0usize; n];
    let mut served = 0;
    let mut obj = 0.0;
    for (i, r) in roles.iter().enumerate() {
        match *r {
            Role::Outage => {}
            Role::Direct(m) => {
                let p = p_lr(s, m, i);
                if p / NOISE < SNR_MIN {
                    return None;
                }
                ap_load[m] += 1;
                served += 1;
                obj -= p;
            }
            Role::Member(h) => {
                if !matches!(roles[h], Role::Direct(_)) {
                    return None;
                }
                let p = p_sr(s, h, i);
                if p / NOISE < SNR_MIN {
                    return None;
                }
                members[h] += 1;
                served += 1;
                let d = &s.devices[h];
                obj += lim.rho * (1.0 - gamma(d.battery_frac, d.rating)) - p;
            }
        }
    }
    if ap_load.iter().any(|&l| l > lim.delta_lr) || members.iter().any(|&c| c > lim.delta_sr) {
        return None;
    }
    if served < required_served(n, lim.theta) {
        return None;
    }
    Some(obj)
}

/// Minimum objective over every role assignment, no pruning at all.
pub fn brute_force(s: &Scenario, lim: &Limits) -> Option<(f64, Vec<Role>)> {
    let n = s.devices.len();
    let mut choices = vec![Role::Outage];
    choices.extend((0..s.aps.len()).map(Role::Direct));
    choices.extend((0..n).map(Role::Member));
    let base = choices.len();
    let total = base.pow(n as u32);
    let mut best: Option<(f64, Vec<Role>)> = None;
    let mut roles = vec![Role::Outage; n];
    for code in 0..total {
        let mut c = code;
        let mut self_member = false;
        for (i, r) in roles.iter_mut().enumerate() {
            *r = choices[c % base];
            c /= base;
            if *r == Role::Member(i) {
                self_member = true;
            }
        }
        if self_member {
            continue;
        }
        if let Some(v) = role_objective(s, &roles, lim) {
            if best.as_ref().is_none_or(|(b, _)| v < *b) {
                best = Some((v, roles.clone()));
            }
        }
    }
    best
}

/// Role vector encoded by a solution.
pub fn roles_of(sol: &ClusterSolution) -> Vec<Role> {
    let mut roles = vec![Role::Outage; sol.head_of.len()];
    for (slot, &h) in sol.heads.iter().enumerate() {
        if let Some(m) = sol.ap_of_head[slot] {
            roles[h] = Role::Direct(m);
        }
    }
    for (i, h) in sol.head_of.iter().enumerate() {
        if let Some(h) = *h {
            if h != i {
                roles[i] = Role::Member(h);
            }
        }
    }
    roles
}

/// Structural invariants every emitted solution must satisfy. Returns a
/// description of the first violation.
pub fn structural_violation(sol: &ClusterSolution, s: &Scenario, delta_lr: usize, delta_sr: usize) -> Option<String> {
    let n = s.devices.len();
    if sol.head_of.len() != n || sol.ap_of_head.len() != sol.heads.len() {
        return Some("length mismatch".into());
    }
    let mut ap_load = vec![0usize; s.aps.len()];
    for (slot, &h) in sol.heads.iter().enumerate() {
        if sol.head_of[h] != Some(h) {
            return Some(format!("head {h} not self-assigned"));
        }
        match sol.ap_of_head[slot] {
            Some(m) => {
                ap_load[m] += 1;
                if p_lr(s, m, h) / NOISE < SNR_MIN {
                    return Some(format!("head {h} LR link below threshold"));
                }
            }
            None => {
                if !sol.members_of(h).is_empty() {
                    return Some(format!("head {h} has members but no AP"));
                }
            }
        }
    }
    if let Some(m) = ap_load.iter().position(|&l| l > delta_lr) {
        return Some(format!("AP {m} over capacity"));
    }
    let mut members = vec![0usize; n];
    for (i, h) in sol.head_of.iter().enumerate() {
        let Some(h) = *h else { continue };
        if h == i {
            continue;
        }
        if !sol.heads.contains(&h) {
            return Some(format!("device {i} assigned to non-head {h}"));
        }
        if sol.heads.contains(&i) {
            return Some(format!("head {i} also a member of {h}"));
        }
        members[h] += 1;
        if p_sr(s, h, i) / NOISE < SNR_MIN {
            return Some(format!("member {i} SR link below threshold"));
        }
    }
    if let Some(h) = members.iter().position(|&c| c > delta_sr) {
        return Some(format!("head {h} over capacity"));
    }
    let mut seen = vec![false; n];
    for &h in &sol.heads {
        if std::mem::replace(&mut seen[h], true) {
            return Some(format!("head {h} listed twice"));
        }
    }
    None
}

pub fn scenario_from(devices: &[(f64, f64, f64)], aps: &[(f64, f64)], area: f64) -> Scenario {
    Scenario {
        area_width: area,
        area_height: area,
        devices: devices
            .iter()
            .enumerate()
            .map(|(id, &(x, y, b))| Device {
                id,
                x,
                y,
                battery_frac: b,
                rating: 1.0,
            })
            .collect(),
        aps: aps
            .iter()
            .enumerate()
            .map(|(id, &(x, y))| AccessPoint {
                id,
                x,
                y,
                tx_power: 10.0,
            })
            .collect(),
        seed: 0,
    }
}

/// Small random scenario: `n` devices in a square of side `area`, one AP
/// per entry of `aps` (fractional coordinates).
pub fn small_scenario(
    n: std::ops::RangeInclusive<usize>,
    max_aps: usize,
    area: f64,
) -> impl Strategy<Value = Scenario> {
    let dev = (0.0..=1.0f64, 0.0..=1.0f64, 0.1..=0.9f64);
    let ap = (0.0..=1.0f64, 0.0..=1.0f64);
    (prop::collection::vec(dev, n), prop::collection::vec(ap, 1..=max_aps)).prop_map(move |(d, a)| {
        let d: Vec<_> = d.into_iter().map(|(x, y, b)| (x * area, y * area, b)).collect();
        let a: Vec<_> = a.into_iter().map(|(x, y)| (x * area, y * area)).collect();
        scenario_from(&d, &a, area)
    })
}

pub fn points() -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec(
        (0.0..100.0f64, 0.0..100.0f64).prop_map(|(x, y)| Point::new(x, y)),
        1..40,
    )
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
