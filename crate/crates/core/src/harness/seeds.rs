//! Seed derivation. Pure functions of their inputs, stable across platforms
//! and releases.

use super::Algorithm;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// One SplitMix64 output step.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Order-sensitive hash of `parts`.
pub fn mix(parts: &[u64]) -> u64 {
    parts.iter().fold(GOLDEN, |h, &p| splitmix64(h ^ splitmix64(p)))
}

pub fn scenario_seed(trial_seed: u64, n_devices: usize, n_aps: usize) -> u64 {
    mix(&[trial_seed, n_devices as u64, n_aps as u64])
}

pub fn algorithm_seed(scenario_seed: u64, algorithm: Algorithm) -> u64 {
    mix(&[scenario_seed, algorithm.index()])
}
