//! Monte-Carlo check of the wrong-key distribution of `T`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use super::{chi_sq_statistic, CounterVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct SimulationResult {
    pub m: u32,
    pub n_samples: u64,
    pub trials: usize,
    pub seed: u64,
    pub mean: f64,
    pub variance: f64,
    /// Set when `N < 100·2^m`, outside the regime of the chi-squared model.
    pub warning: Option<String>,
}

/// Uniform multinomial counters via sequential binomial draws.
fn uniform_multinomial(m: u32, n: u64, rng: &mut ChaCha8Rng) -> CounterVector {
    let cells = 1usize << m;
    let mut v = CounterVector::zeros(m);
    let mut left = n;
    for z in 0..cells - 1 {
        let p = 1.0 / (cells - z) as f64;
        let c = Binomial::new(left, p).expect("valid binomial").sample(rng);
        v.counts[z] = c;
        left -= c;
    }
    v.counts[cells - 1] = left;
    v
}

/// Draws `trials` counter vectors with `N` samples spread uniformly over `2^m`
/// cells and returns the empirical mean and variance of `T`. Trial `i` uses
/// its own stream of the master seed, so results do not depend on threading.
pub fn simulate_wrong_key_t(m: u32, n_samples: u64, trials: usize, seed: u64) -> Result<SimulationResult> {
    if m == 0 || m > 20 || n_samples == 0 || trials == 0 {
        return Err(Error::InvalidParameter(format!("m = {m}, N = {n_samples}, trials = {trials}")));
    }
    let ts: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            chi_sq_statistic(&uniform_multinomial(m, n_samples, &mut rng)).expect("N > 0")
        })
        .collect();
    let mean = ts.iter().sum::<f64>() / trials as f64;
    let variance = if trials > 1 {
        ts.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (trials - 1) as f64
    } else {
        0.0
    };
    let warning = (n_samples < 100 << m).then(|| format!("N = {n_samples} is below 100·2^{m}"));
    Ok(SimulationResult { m, n_samples, trials, seed, mean, variance, warning })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mass_is_conserved() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(uniform_multinomial(7, 12345, &mut rng).total(), 12345);
    }

    #[test]
    fn deterministic_single_trial() {
        let a = simulate_wrong_key_t(3, 1000, 1, 9).unwrap();
        let b = simulate_wrong_key_t(3, 1000, 1, 9).unwrap();
        assert_eq!(a.mean, b.mean);
    }

    // With the (1 - 1/ℓ) normalisation each cell contributes 1 on average, so
    // E[T] = ℓ; for m = 1 that is twice the squared standardized deviation.
    #[test]
    fn one_dimensional_mean_is_ell() {
        let r = simulate_wrong_key_t(1, 10_000, 4000, 2).unwrap();
        assert!((r.mean - 2.0).abs() < 0.2, "{r:?}");
        assert!(r.warning.is_none());
        assert!(simulate_wrong_key_t(7, 1000, 1, 0).unwrap().warning.is_some());
    }
}
