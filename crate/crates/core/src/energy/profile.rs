use serde::{Deserialize, Serialize};

use super::problem::RotamerProblem;

/// Pair-energy magnitudes at one residue separation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceProfile {
    pub distance: usize,
    pub mean_abs: f64,
    pub max_abs: f64,
    /// Number of rotamer pairs included (absent tables count as zeros).
    pub count: usize,
}

/// Mean and max `|E_int|` per residue separation `d = 1..N-1`.
pub fn interaction_profile(problem: &RotamerProblem) -> Vec<DistanceProfile> {
    let n = problem.num_residues();
    (1..n)
        .map(|d| {
            let mut sum = 0.0;
            let mut max: f64 = 0.0;
            let mut count = 0;
            for i in 0..n - d {
                let j = i + d;
                let cells = problem.rotamers(i) * problem.rotamers(j);
                count += cells;
                if let Some(t) = problem.pair_table(i, j) {
                    for v in t.values() {
                        sum += v.abs();
                        max = max.max(v.abs());
                    }
                }
            }
            DistanceProfile {
                distance: d,
                mean_abs: if count > 0 { sum / count as f64 } else { 0.0 },
                max_abs: max,
                count,
            }
        })
        .collect()
}

/// Largest `max_abs` beyond `d = 1` divided by the `d = 1` maximum.
pub fn long_range_ratio(profile: &[DistanceProfile]) -> Option<f64> {
    let nn = profile.iter().find(|p| p.distance == 1)?.max_abs;
    let far = profile
        .iter()
        .filter(|p| p.distance > 1)
        .map(|p| p.max_abs)
        .fold(0.0, f64::max);
    (nn > 0.0).then(|| far / nn)
}
