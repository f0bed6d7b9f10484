//! Conditional value at risk of sampled energies.

use crate::{Error, Result};

/// Number of samples in the lower `alpha` tail: `⌈α·len⌉`, at least one.
/// A tiny slack keeps products like `0.2 · 15` from rounding up past 3.
pub fn tail_size(len: usize, alpha: f64) -> usize {
    let k = (alpha * len as f64 - 1e-9).ceil();
    (k.max(1.0) as usize).min(len)
}

/// Mean of the lowest `⌈α·|energies|⌉` values.
pub fn cvar(energies: &[f64], alpha: f64) -> Result<f64> {
    if energies.is_empty() {
        return Err(Error::EmptySamples);
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidConfig(format!("cvar alpha {alpha} is outside (0, 1]")));
    }
    let k = tail_size(energies.len(), alpha);
    let mut v = energies.to_vec();
    if k < v.len() {
        v.select_nth_unstable_by(k - 1, f64::total_cmp);
    }
    Ok(v[..k].iter().sum::<f64>() / k as f64)
}
