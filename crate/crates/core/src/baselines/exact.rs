//! Exact solver for small instances of the cluster-formation integer program.
//!
//! Every device takes exactly one role: outage, a direct LR link to some AP,
//! or membership of another device's cluster over SR. The objective separates
//! over those roles:
//!
//! | role            | contribution                              |
//! |-----------------|-------------------------------------------|
//! | outage          | 0                                         |
//! | direct to AP m  | `-P_lr(m, i)`                             |
//! | member of head j| `rho * (1 - reliability_j) - P_sr(j, i)`  |
//!
//! Coupling comes only from the constraints: a head must itself be direct,
//! AP and head degrees are capped, and at least `ceil((1 - theta) N)` devices
//! must be served. Depth-first search assigns devices in index order, trying
//! roles cheapest-first, and prunes a branch when its partial cost plus the
//! best-case contribution of every remaining device cannot beat the incumbent.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baselines::objective_value;
use crate::metrics::min_served;
use crate::radio::{self, RadioParams};
use crate::scenario::Scenario;
use crate::solution::ClusterSolution;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExactSolverConfig {
    pub rho: f64,
    pub theta: f64,
    pub delta_lr: usize,
    pub delta_sr: usize,
    /// Largest device count accepted.
    pub node_limit: usize,
    pub time_limit_secs: f64,
}

impl Default for ExactSolverConfig {
    fn default() -> Self {
        Self {
            rho: 20.0,
            theta: 0.05,
            delta_lr: 30,
            delta_sr: 10,
            node_limit: 10,
            time_limit_secs: 60.0,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExactError {
    #[error("exact solver accepts at most {limit} devices, got {n}")]
    TooLarge { n: usize, limit: usize },
    #[error("no assignment satisfies the constraints (outage bound needs {required} of {n} served)")]
    Infeasible { n: usize, required: usize },
    #[error("exact search exceeded its {secs} s time limit")]
    TimeLimit { secs: f64 },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactOutcome {
    pub solution: ClusterSolution,
    pub objective: f64,
    /// Search nodes visited.
    pub nodes: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Role {
    Outage,
    Direct(usize),
    Member(usize),
}

#[derive(Debug, Clone, Copy)]
struct Option_ {
    role: Role,
    value: f64,
}

struct Search<'a> {
    cfg: &'a ExactSolverConfig,
    options: Vec<Vec<Option_>>,
    /// Sum over devices `i..` of each device's cheapest possible contribution.
    suffix_bound: Vec<f64>,
    can_direct: Vec<bool>,
    required: usize,
    roles: Vec<Role>,
    ap_degree: Vec<usize>,
    members: Vec<usize>,
    best: f64,
    best_roles: Option<Vec<Role>>,
    nodes: u64,
    started: Instant,
    limit: Duration,
    timed_out: bool,
}

impl Search<'_> {
    fn descend(&mut self, i: usize, cost: f64, served: usize) {
        if self.timed_out {
            return;
        }
        self.nodes += 1;
        if self.nodes.is_multiple_of(1024) && self.started.elapsed() > self.limit {
            self.timed_out = true;
            return;
        }
        let n = self.roles.len();
        if served + (n - i) < self.required {
            return;
        }
        if i == n {
            if cost < self.best {
                self.best = cost;
                self.best_roles = Some(self.roles.clone());
            }
            return;
        }
        let rest = self.suffix_bound[i + 1];
        let must_be_direct = self.members[i] > 0;
        for k in 0..self.options[i].len() {
            let opt = self.options[i][k];
            // Options are sorted by value, so nothing later can do better.
            if cost + opt.value + rest >= self.best {
                break;
            }
            match opt.role {
                Role::Outage => {
                    if must_be_direct {
                        continue;
                    }
                    self.roles[i] = Role::Outage;
                    self.descend(i + 1, cost + opt.value, served);
                }
                Role::Direct(m) => {
                    if self.ap_degree[m] >= self.cfg.delta_lr {
                        continue;
                    }
                    self.ap_degree[m] += 1;
                    self.roles[i] = opt.role;
                    self.descend(i + 1, cost + opt.value, served + 1);
                    self.ap_degree[m] -= 1;
                }
                Role::Member(j) => {
                    if must_be_direct || self.members[j] >= self.cfg.delta_sr {
                        continue;
                    }
                    let head_ok = if j < i {
                        matches!(self.roles[j], Role::Direct(_))
                    } else {
                        self.can_direct[j]
                    };
                    if !head_ok {
                        continue;
                    }
                    self.members[j] += 1;
                    self.roles[i] = opt.role;
                    self.descend(i + 1, cost + opt.value, served + 1);
                    self.members[j] -= 1;
                }
            }
            if self.timed_out {
                return;
            }
        }
        self.roles[i] = Role::Outage;
    }
}

/// Globally optimal assignment for instances of at most `cfg.node_limit`
/// devices.
pub fn exact_solve(
    scenario: &Scenario,
    radio_params: &RadioParams,
    cfg: &ExactSolverConfig,
) -> Result<ExactOutcome, ExactError> {
    let n = scenario.n_devices();
    if n > cfg.node_limit {
        return Err(ExactError::TooLarge {
            n,
            limit: cfg.node_limit,
        });
    }
    if cfg.rho.is_nan() || cfg.rho < 0.0 || !(0.0..=1.0).contains(&cfg.theta) {
        return Err(ExactError::InvalidConfig(format!(
            "need rho >= 0 and theta in [0, 1], got rho={} theta={}",
            cfg.rho, cfg.theta
        )));
    }
    let rel = radio::reliabilities(&scenario.devices, radio_params);

    let mut options = Vec::with_capacity(n);
    let mut can_direct = vec![false; n];
    for (i, dev) in scenario.devices.iter().enumerate() {
        let mut opts = Vec::new();
        for (m, ap) in scenario.aps.iter().enumerate() {
            if radio_params.lr_snr(ap, dev) >= radio_params.snr_min_lr {
                opts.push(Option_ {
                    role: Role::Direct(m),
                    value: -radio_params.lr_power(ap, dev),
                });
                can_direct[i] = true;
            }
        }
        for (j, head) in scenario.devices.iter().enumerate() {
            if j == i || radio_params.sr_snr(head.pos(), dev.pos()) < radio_params.snr_min_sr {
                continue;
            }
            opts.push(Option_ {
                role: Role::Member(j),
                value: cfg.rho * (1.0 - rel[j]) - radio_params.sr_power(head.pos(), dev.pos()),
            });
        }
        opts.push(Option_ {
            role: Role::Outage,
            value: 0.0,
        });
        opts.sort_by(|a, b| a.value.total_cmp(&b.value));
        options.push(opts);
    }
    // Members of heads that can never be direct are dead options.
    for opts in &mut options {
        opts.retain(|o| !matches!(o.role, Role::Member(j) if !can_direct[j]));
    }
    let mut suffix_bound = vec![0.0; n + 1];
    for i in (0..n).rev() {
        let cheapest = options[i].first().map_or(0.0, |o| o.value.min(0.0));
        suffix_bound[i] = suffix_bound[i + 1] + cheapest;
    }

    let required = min_served(n, cfg.theta);
    let mut search = Search {
        cfg,
        options,
        suffix_bound,
        can_direct,
        required,
        roles: vec![Role::Outage; n],
        ap_degree: vec![0; scenario.n_aps()],
        members: vec![0; n],
        best: f64::INFINITY,
        best_roles: None,
        nodes: 0,
        started: Instant::now(),
        limit: Duration::from_secs_f64(cfg.time_limit_secs.max(0.0)),
        timed_out: false,
    };
    search.descend(0, 0.0, 0);
    if search.timed_out {
        return Err(ExactError::TimeLimit {
            secs: cfg.time_limit_secs,
        });
    }
    let roles = search.best_roles.ok_or(ExactError::Infeasible { n, required })?;

    let mut sol = ClusterSolution::empty(n);
    for (i, role) in roles.iter().enumerate() {
        match *role {
            Role::Direct(m) => {
                sol.heads.push(i);
                sol.ap_of_head.push(Some(m));
                sol.head_of[i] = Some(i);
            }
            Role::Member(j) => sol.head_of[i] = Some(j),
            Role::Outage => {}
        }
    }
    let objective = objective_value(&sol, scenario, radio_params, cfg.rho);
    Ok(ExactOutcome {
        solution: sol,
        objective,
        nodes: search.nodes,
    })
}
