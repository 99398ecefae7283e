//! Deterministic link budget: log-distance path loss, SNR, Shannon rate, and
//! the per-device reliability score.

use serde::{Deserialize, Serialize};

use crate::geom::Point;
use crate::scenario::{AccessPoint, Device};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadioParams {
    /// Watts.
    pub ap_tx_power: f64,
    /// Watts.
    pub dev_tx_power: f64,
    /// Noise power (sigma^2) in watts.
    pub noise: f64,
    /// Channel bandwidth in Hz, shared by LR and SR links.
    pub bandwidth: f64,
    pub pathloss_exponent: f64,
    /// Linear gain at `ref_distance`.
    pub ref_gain: f64,
    /// Meters. Distances below this are floored to it.
    pub ref_distance: f64,
    pub snr_min_lr: f64,
    pub snr_min_sr: f64,
    /// Battery fraction below which a device is unreliable.
    pub beta: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            ap_tx_power: 10.0,
            dev_tx_power: 0.22,
            noise: 1e-9,
            bandwidth: 20e6,
            pathloss_exponent: 3.0,
            ref_gain: 1e-4,
            ref_distance: 1.0,
            snr_min_lr: 1.0,
            snr_min_sr: 1.0,
            beta: 0.3,
        }
    }
}

impl RadioParams {
    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("ap_tx_power", self.ap_tx_power),
            ("dev_tx_power", self.dev_tx_power),
            ("noise", self.noise),
            ("bandwidth", self.bandwidth),
            ("ref_gain", self.ref_gain),
            ("ref_distance", self.ref_distance),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("radio.{name} must be positive and finite, got {v}"));
            }
        }
        if !(self.pathloss_exponent >= 2.0 && self.pathloss_exponent.is_finite()) {
            return Err(format!(
                "radio.pathloss_exponent must be >= 2, got {}",
                self.pathloss_exponent
            ));
        }
        if !(0.0..1.0).contains(&self.beta) {
            return Err(format!("radio.beta must lie in [0, 1), got {}", self.beta));
        }
        for (name, v) in [("snr_min_lr", self.snr_min_lr), ("snr_min_sr", self.snr_min_sr)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(format!("radio.{name} must be non-negative, got {v}"));
            }
        }
        Ok(())
    }

    /// Power received by a device from an AP.
    pub fn lr_power(&self, ap: &AccessPoint, device: &Device) -> f64 {
        received_power(ap.tx_power, ap.pos().distance(device.pos()), self)
    }

    /// Power received by `to` from `from` over a D2D link.
    pub fn sr_power(&self, from: Point, to: Point) -> f64 {
        received_power(self.dev_tx_power, from.distance(to), self)
    }

    pub fn lr_snr(&self, ap: &AccessPoint, device: &Device) -> f64 {
        snr(self.lr_power(ap, device), self)
    }

    pub fn sr_snr(&self, from: Point, to: Point) -> f64 {
        snr(self.sr_power(from, to), self)
    }
}

/// `tx_power * G0 * (max(d, d0) / d0)^-alpha`.
pub fn received_power(tx_power: f64, distance: f64, p: &RadioParams) -> f64 {
    let d = distance.max(p.ref_distance);
    tx_power * p.ref_gain * (d / p.ref_distance).powf(-p.pathloss_exponent)
}

pub fn snr(p_rx: f64, p: &RadioParams) -> f64 {
    p_rx / p.noise
}

/// Shannon rate `W log2(1 + snr)` in bits per second.
pub fn bitrate(snr_value: f64, p: &RadioParams) -> f64 {
    p.bandwidth * (1.0 + snr_value).log2()
}

/// Reliability in [0, 1]: the rating scaled by the battery headroom above
/// `beta`, normalized so a full battery yields the bare rating.
pub fn device_reliability(battery_frac: f64, rating: f64, beta: f64) -> f64 {
    let headroom = ((battery_frac - beta) / (1.0 - beta)).clamp(0.0, 1.0);
    rating * headroom
}

/// Reliability of every device in scenario order.
pub fn reliabilities(devices: &[Device], p: &RadioParams) -> Vec<f64> {
    devices
        .iter()
        .map(|d| device_reliability(d.battery_frac, d.rating, p.beta))
        .collect()
}
