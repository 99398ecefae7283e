//! Network scenarios: device and access-point placements plus per-device state.
//!
//! A scenario is an immutable snapshot. It is generated from a seed or loaded
//! from a JSON document of the form
//!
//! ```json
//! {
//!   "area_width": 100.0, "area_height": 100.0, "seed": 7,
//!   "devices": [{"id": 0, "x": 1.5, "y": 2.0, "battery_frac": 0.4, "rating": 1.0}],
//!   "aps": [{"id": 0, "x": 50.0, "y": 50.0, "tx_power": 10.0}]
//! }
//! ```
//!
//! `rating` defaults to 1.0 and `seed` to 0 when omitted. Unknown fields are
//! rejected.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::Point;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn default_rating() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Device {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    /// Remaining battery as a fraction of full capacity.
    pub battery_frac: f64,
    /// Historical cooperation rating in [0, 1].
    #[serde(default = "default_rating")]
    pub rating: f64,
}

impl Device {
    pub fn pos(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AccessPoint {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    /// Transmit power in watts.
    pub tx_power: f64,
}

impl AccessPoint {
    pub fn pos(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub area_width: f64,
    pub area_height: f64,
    pub devices: Vec<Device>,
    pub aps: Vec<AccessPoint>,
    #[serde(default)]
    pub seed: u64,
}

/// Inputs to [`generate_scenario`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateParams {
    pub n_devices: usize,
    pub n_aps: usize,
    #[serde(default = "GenerateParams::default_side")]
    pub width: f64,
    #[serde(default = "GenerateParams::default_side")]
    pub height: f64,
    #[serde(default = "GenerateParams::default_battery_lo")]
    pub battery_lo: f64,
    #[serde(default = "GenerateParams::default_battery_hi")]
    pub battery_hi: f64,
    #[serde(default = "GenerateParams::default_ap_tx_power")]
    pub ap_tx_power: f64,
}

impl GenerateParams {
    fn default_side() -> f64 {
        100.0
    }
    fn default_battery_lo() -> f64 {
        0.1
    }
    fn default_battery_hi() -> f64 {
        0.9
    }
    fn default_ap_tx_power() -> f64 {
        10.0
    }

    /// Defaults: 100 m x 100 m area, batteries uniform in [0.1, 0.9], 10 W APs.
    pub fn new(n_devices: usize, n_aps: usize) -> Self {
        Self {
            n_devices,
            n_aps,
            width: Self::default_side(),
            height: Self::default_side(),
            battery_lo: Self::default_battery_lo(),
            battery_hi: Self::default_battery_hi(),
            ap_tx_power: Self::default_ap_tx_power(),
        }
    }

    pub fn with_area(mut self, width: f64, height: f64) -> Self {
        self.width = width;
        self.height = height;
        self
    }

    pub fn with_battery_range(mut self, lo: f64, hi: f64) -> Self {
        self.battery_lo = lo;
        self.battery_hi = hi;
        self
    }
}

/// Access-point layout: one AP at the area center, otherwise the centers of
/// a near-square grid of cells filled in row-major order.
pub fn ap_grid(n_aps: usize, width: f64, height: f64) -> Vec<Point> {
    if n_aps == 0 {
        return Vec::new();
    }
    let cols = (n_aps as f64).sqrt().ceil() as usize;
    let rows = n_aps.div_ceil(cols);
    let cw = width / cols as f64;
    let ch = height / rows as f64;
    (0..n_aps)
        .map(|i| {
            let (r, c) = (i / cols, i % cols);
            Point::new((c as f64 + 0.5) * cw, (r as f64 + 0.5) * ch)
        })
        .collect()
}

/// Uniformly scatters devices over the area with i.i.d. uniform battery levels.
///
/// Ratings are 1.0. Identical parameters and seed give identical scenarios.
pub fn generate_scenario(params: &GenerateParams, seed: u64) -> Result<Scenario, ScenarioError> {
    let GenerateParams {
        n_devices,
        n_aps,
        width,
        height,
        battery_lo: lo,
        battery_hi: hi,
        ap_tx_power,
    } = *params;
    if !(width > 0.0 && height > 0.0 && width.is_finite() && height.is_finite()) {
        return Err(ScenarioError::InvalidConfig(format!(
            "area must have positive finite extent, got {width} x {height}"
        )));
    }
    if n_devices == 0 || n_aps == 0 {
        return Err(ScenarioError::InvalidConfig(format!(
            "need at least one device and one AP, got {n_devices} devices and {n_aps} APs"
        )));
    }
    if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
        return Err(ScenarioError::InvalidConfig(format!(
            "battery range [{lo}, {hi}] must satisfy 0 <= lo <= hi <= 1"
        )));
    }
    if !(ap_tx_power > 0.0 && ap_tx_power.is_finite()) {
        return Err(ScenarioError::InvalidConfig(format!(
            "AP transmit power must be positive, got {ap_tx_power}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let devices = (0..n_devices)
        .map(|id| {
            let x = rng.gen::<f64>() * width;
            let y = rng.gen::<f64>() * height;
            let battery_frac = (lo + (hi - lo) * rng.gen::<f64>()).min(hi);
            Device {
                id,
                x,
                y,
                battery_frac,
                rating: 1.0,
            }
        })
        .collect();
    let aps = ap_grid(n_aps, width, height)
        .into_iter()
        .enumerate()
        .map(|(id, p)| AccessPoint {
            id,
            x: p.x,
            y: p.y,
            tx_power: ap_tx_power,
        })
        .collect();

    Ok(Scenario {
        area_width: width,
        area_height: height,
        devices,
        aps,
        seed,
    })
}

impl Scenario {
    pub fn n_devices(&self) -> usize {
        self.devices.len()
    }

    pub fn n_aps(&self) -> usize {
        self.aps.len()
    }

    pub fn device_positions(&self) -> Vec<Point> {
        self.devices.iter().map(Device::pos).collect()
    }

    pub fn ap_positions(&self) -> Vec<Point> {
        self.aps.iter().map(AccessPoint::pos).collect()
    }

    fn in_area(&self, x: f64, y: f64) -> bool {
        (0.0..=self.area_width).contains(&x) && (0.0..=self.area_height).contains(&y)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let bad = |msg: String| Err(ScenarioError::Validation(msg));
        if !(self.area_width > 0.0
            && self.area_height > 0.0
            && self.area_width.is_finite()
            && self.area_height.is_finite())
        {
            return bad(format!(
                "area {} x {} must be positive and finite",
                self.area_width, self.area_height
            ));
        }
        if self.devices.is_empty() {
            return bad("scenario has no devices".into());
        }
        if self.aps.is_empty() {
            return bad("scenario has no access points".into());
        }
        for (i, d) in self.devices.iter().enumerate() {
            if d.id != i {
                return bad(format!(
                    "devices[{i}]: id {} breaks the contiguous 0..N-1 numbering (duplicate or out of order)",
                    d.id
                ));
            }
            if !(0.0..=1.0).contains(&d.battery_frac) {
                return bad(format!("device {i}: battery_frac {} outside [0, 1]", d.battery_frac));
            }
            if !(0.0..=1.0).contains(&d.rating) {
                return bad(format!("device {i}: rating {} outside [0, 1]", d.rating));
            }
            if !self.in_area(d.x, d.y) {
                return bad(format!("device {i}: position ({}, {}) outside the area", d.x, d.y));
            }
        }
        for (i, ap) in self.aps.iter().enumerate() {
            if ap.id != i {
                return bad(format!(
                    "aps[{i}]: id {} breaks the contiguous 0..M-1 numbering (duplicate or out of order)",
                    ap.id
                ));
            }
            if !(ap.tx_power > 0.0 && ap.tx_power.is_finite()) {
                return bad(format!("ap {i}: tx_power {} must be positive", ap.tx_power));
            }
            if !self.in_area(ap.x, ap.y) {
                return bad(format!("ap {i}: position ({}, {}) outside the area", ap.x, ap.y));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serialization is infallible")
    }

    /// Parses and validates a scenario document.
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| ScenarioError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        s.validate()?;
        Ok(s)
    }
}

pub fn save_scenario(scenario: &Scenario, path: impl AsRef<Path>) -> Result<(), ScenarioError> {
    let path = path.as_ref();
    fs::write(path, scenario.to_json()).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Scenario::from_json(&text)
}
