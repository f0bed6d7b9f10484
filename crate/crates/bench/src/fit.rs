//! Log-linear regression of cost against problem size.

use serde::{Deserialize, Serialize};

use crate::{BenchError, Result};

/// One ensemble summary: qubit count, normalized mean cost and its spread.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    #[serde(rename = "M")]
    pub m: usize,
    pub cost: f64,
    pub std: f64,
}

/// `ln cost ≈ intercept + slope · M`, fitted by ordinary least squares over
/// the points with `M ≥ fit_start_m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub points: Vec<ScalingPoint>,
    pub slope: f64,
    pub slope_stderr: f64,
    pub intercept: f64,
    pub intercept_stderr: f64,
    pub r_squared: f64,
    pub fit_start_m: usize,
    /// Number of points that entered the regression.
    pub used: usize,
}

impl ScalingFit {
    /// Fitted `ln cost` at size `m`.
    pub fn predict_ln(&self, m: f64) -> f64 {
        self.intercept + self.slope * m
    }
}

pub fn fit_scaling(points: &[ScalingPoint], fit_start_m: usize) -> Result<ScalingFit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for p in points.iter().filter(|p| p.m >= fit_start_m) {
        if !(p.cost.is_finite() && p.cost > 0.0) {
            return Err(BenchError::Fit(format!("cost {} at M={} is not positive", p.cost, p.m)));
        }
        xs.push(p.m as f64);
        ys.push(p.cost.ln());
    }
    let k = xs.len();
    if k < 3 {
        return Err(BenchError::Fit(format!(
            "{k} usable points at M ≥ {fit_start_m}, need at least 3"
        )));
    }
    let kf = k as f64;
    let mx = xs.iter().sum::<f64>() / kf;
    let my = ys.iter().sum::<f64>() / kf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(BenchError::Fit("all usable points share one M".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let s2 = ss_res / (kf - 2.0);
    // A flat set of log costs is fitted exactly; don't divide rounding noise.
    let scale = ys.iter().fold(0.0f64, |a, y| a.max(y.abs()));
    let flat = syy <= kf * (16.0 * f64::EPSILON * scale).powi(2);
    let r_squared = if flat { 1.0 } else { (1.0 - ss_res / syy).clamp(0.0, 1.0) };
    let mut pts = points.to_vec();
    pts.sort_by_key(|p| p.m);
    Ok(ScalingFit {
        points: pts,
        slope,
        slope_stderr: (s2 / sxx).sqrt(),
        intercept,
        intercept_stderr: (s2 * (1.0 / kf + mx * mx / sxx)).sqrt(),
        r_squared,
        fit_start_m,
        used: k,
    })
}
