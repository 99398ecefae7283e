//! The common output of every solver.
//!
//! `head_of[i]` is `Some(i)` for a cluster head, `Some(h)` for a member served
//! by head `h` over SR, and `None` for a device in outage. Heads are the devices
//! with an LR link; `ap_of_head` runs parallel to `heads`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClusterSolution {
    pub heads: Vec<usize>,
    pub head_of: Vec<Option<usize>>,
    pub ap_of_head: Vec<Option<usize>>,
}

#[derive(Debug, Error, PartialEq)]
pub enum SolutionError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("malformed solution: {0}")]
    Malformed(String),
}

impl ClusterSolution {
    /// Every device in outage.
    pub fn empty(n_devices: usize) -> Self {
        Self {
            heads: Vec::new(),
            head_of: vec![None; n_devices],
            ap_of_head: Vec::new(),
        }
    }

    pub fn n_devices(&self) -> usize {
        self.head_of.len()
    }

    pub fn is_head(&self, device: usize) -> bool {
        self.head_of[device] == Some(device)
    }

    /// Members of head `h` (excluding `h` itself), ascending.
    pub fn members_of(&self, h: usize) -> Vec<usize> {
        self.head_of
            .iter()
            .enumerate()
            .filter(|&(i, &hd)| i != h && hd == Some(h))
            .map(|(i, _)| i)
            .collect()
    }

    /// Member count for each entry of `heads`.
    pub fn member_counts(&self) -> Vec<usize> {
        let mut by_device = vec![0usize; self.n_devices()];
        for (i, hd) in self.head_of.iter().enumerate() {
            if let Some(h) = *hd {
                if h != i && h < by_device.len() {
                    by_device[h] += 1;
                }
            }
        }
        self.heads
            .iter()
            .map(|&h| by_device.get(h).copied().unwrap_or(0))
            .collect()
    }

    /// `(head, ap)` for every head with an LR link.
    pub fn lr_links(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.heads
            .iter()
            .zip(&self.ap_of_head)
            .filter_map(|(&h, ap)| ap.map(|m| (h, m)))
    }

    /// `(head, member)` for every SR link.
    pub fn sr_links(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.head_of
            .iter()
            .enumerate()
            .filter_map(|(i, hd)| hd.filter(|&h| h != i).map(|h| (h, i)))
    }

    /// Devices with no active reception link: explicit outage, heads without
    /// an AP, and members of such heads.
    pub fn outage(&self) -> Vec<usize> {
        let mut served = vec![false; self.n_devices()];
        for (h, _) in self.lr_links() {
            if h < served.len() {
                served[h] = true;
            }
        }
        let head_served = served.clone();
        for (h, i) in self.sr_links() {
            if head_served.get(h).copied().unwrap_or(false) {
                served[i] = true;
            }
        }
        served.iter().enumerate().filter(|(_, &s)| !s).map(|(i, _)| i).collect()
    }

    pub fn served_count(&self) -> usize {
        self.n_devices() - self.outage().len()
    }

    /// Demotes heads without an AP link to outage, together with their members.
    pub fn drop_unserved_heads(&mut self) {
        let mut keep_heads = Vec::with_capacity(self.heads.len());
        let mut keep_aps = Vec::with_capacity(self.heads.len());
        let mut dropped = vec![false; self.n_devices()];
        for (&h, &ap) in self.heads.iter().zip(&self.ap_of_head) {
            if ap.is_some() {
                keep_heads.push(h);
                keep_aps.push(ap);
            } else {
                dropped[h] = true;
            }
        }
        for hd in self.head_of.iter_mut() {
            if let Some(h) = *hd {
                if dropped[h] {
                    *hd = None;
                }
            }
        }
        self.heads = keep_heads;
        self.ap_of_head = keep_aps;
    }

    /// Structural consistency: lengths match, indices are in range, heads
    /// point to themselves, members point to listed heads.
    pub fn validate_structure(&self, n_aps: usize) -> Result<(), SolutionError> {
        let n = self.n_devices();
        let bad = |m: String| Err(SolutionError::Malformed(m));
        if self.heads.len() != self.ap_of_head.len() {
            return bad(format!(
                "{} heads but {} ap_of_head entries",
                self.heads.len(),
                self.ap_of_head.len()
            ));
        }
        let mut listed = vec![false; n];
        for &h in &self.heads {
            if h >= n {
                return bad(format!("head {h} out of range for {n} devices"));
            }
            listed[h] = true;
        }
        for ap in self.ap_of_head.iter().flatten() {
            if *ap >= n_aps {
                return bad(format!("AP {ap} out of range for {n_aps} APs"));
            }
        }
        for (i, hd) in self.head_of.iter().enumerate() {
            match *hd {
                Some(h) if h >= n => return bad(format!("device {i} points to {h}, out of range")),
                Some(h) if h == i && !listed[i] => {
                    return bad(format!("device {i} points to itself but is not in heads"))
                }
                Some(h) if h != i && !listed[h] => {
                    return bad(format!("device {i} points to {h}, which is not a head"))
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn to_doc(&self) -> SolutionDoc {
        let to_i64 = |o: &Option<usize>| o.map_or(-1, |v| v as i64);
        SolutionDoc {
            heads: self.heads.clone(),
            head_of: self.head_of.iter().map(to_i64).collect(),
            ap_of_head: self.ap_of_head.iter().map(to_i64).collect(),
            outage: self.outage(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("solution serialization is infallible")
    }

    /// Parses a solution document. Only the shape is checked here; semantic
    /// constraints are the job of the feasibility checker.
    pub fn from_json(text: &str) -> Result<Self, SolutionError> {
        let doc: SolutionDoc = serde_json::from_str(text).map_err(|e| SolutionError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Self::from_doc(doc)
    }

    pub fn from_doc(doc: SolutionDoc) -> Result<Self, SolutionError> {
        let from_i64 = |what: &str, v: i64| -> Result<Option<usize>, SolutionError> {
            match v {
                -1 => Ok(None),
                v if v >= 0 => Ok(Some(v as usize)),
                v => Err(SolutionError::Malformed(format!("{what}: invalid index {v}"))),
            }
        };
        let head_of = doc
            .head_of
            .iter()
            .map(|&v| from_i64("head_of", v))
            .collect::<Result<Vec<_>, _>>()?;
        let ap_of_head = doc
            .ap_of_head
            .iter()
            .map(|&v| from_i64("ap_of_head", v))
            .collect::<Result<Vec<_>, _>>()?;
        let sol = Self {
            heads: doc.heads,
            head_of,
            ap_of_head,
        };
        // The outage list is derived data; a disagreeing one means the
        // document was edited inconsistently.
        let n = sol.n_devices();
        if sol.heads.iter().any(|&h| h >= n) || sol.head_of.iter().flatten().any(|&h| h >= n) {
            return Err(SolutionError::Malformed("device index out of range".into()));
        }
        if sol.heads.len() == sol.ap_of_head.len() && doc.outage != sol.outage() {
            return Err(SolutionError::Malformed(
                "outage list disagrees with head_of/ap_of_head".into(),
            ));
        }
        Ok(sol)
    }
}

/// On-disk form of a [`ClusterSolution`]; `-1` encodes "none".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionDoc {
    pub heads: Vec<usize>,
    pub head_of: Vec<i64>,
    pub ap_of_head: Vec<i64>,
    pub outage: Vec<usize>,
}
