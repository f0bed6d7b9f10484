use rand::Rng as _;

use crate::rng::Rng;
use crate::{Error, Result};

/// `γ₁, β₁, …, γ_p, β_p` with `γ_i ~ U[gamma)` and `β_i ~ U[beta)`.
pub fn init_params(p: usize, gamma: (f64, f64), beta: (f64, f64), rng: &mut Rng) -> Result<Vec<f64>> {
    for (name, (lo, hi)) in [("gamma", gamma), ("beta", beta)] {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidConfig(format!("{name} range [{lo}, {hi}] is empty")));
        }
    }
    let mut out = Vec::with_capacity(2 * p);
    for _ in 0..p {
        out.push(rng.gen_range(gamma.0..gamma.1));
        out.push(rng.gen_range(beta.0..beta.1));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    const G: (f64, f64) = (-0.1, 0.1);
    const B: (f64, f64) = (-1.0, 1.0);

    #[test]
    fn interleaved_within_ranges() {
        let v = init_params(4, G, B, &mut rng_from_seed(3)).unwrap();
        assert_eq!(v.len(), 8);
        for pair in v.chunks(2) {
            assert!(pair[0].abs() <= 0.1);
            assert!(pair[1].abs() <= 1.0);
        }
        assert_eq!(v, init_params(4, G, B, &mut rng_from_seed(3)).unwrap());
        assert_eq!(init_params(1, G, B, &mut rng_from_seed(0)).unwrap().len(), 2);
    }

    #[test]
    fn gamma_mean_is_centered() {
        let mut rng = rng_from_seed(11);
        let draws = 10_000;
        let sum: f64 = (0..draws)
            .map(|_| init_params(1, G, B, &mut rng).unwrap()[0])
            .sum();
        let sigma = 0.2 / 12f64.sqrt() / (draws as f64).sqrt();
        assert!((sum / draws as f64).abs() < 4.0 * sigma);
    }

    #[test]
    fn empty_range_is_rejected() {
        assert!(init_params(2, (0.1, 0.1), B, &mut rng_from_seed(0)).is_err());
    }
}
