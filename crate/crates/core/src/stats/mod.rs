//! The multidimensional chi-squared distinguisher: statistic, moments of the
//! right- and wrong-key distributions, data complexity and threshold.
//!
//! Probabilities are passed as base-2 logarithms (`beta0_log2 = -2.7`) so
//! that values like `2^-48` survive intact.

pub mod normal;
mod sim;

pub use sim::{simulate_wrong_key_t, SimulationResult};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Counters `V[z]` over `2^m` cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterVector {
    pub m: u32,
    pub counts: Vec<u64>,
}

impl CounterVector {
    pub fn zeros(m: u32) -> Self {
        CounterVector { m, counts: vec![0; 1 << m] }
    }

    pub fn from_counts(counts: Vec<u64>) -> Result<Self> {
        if !counts.len().is_power_of_two() || counts.len() < 2 {
            return Err(Error::InvalidParameter(format!("{} cells is not 2^m with m >= 1", counts.len())));
        }
        Ok(CounterVector { m: counts.len().trailing_zeros(), counts })
    }

    #[inline]
    pub fn add(&mut self, z: usize, count: u64) {
        self.counts[z] += count;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// `T = Σ_z (V[z] − N/ℓ)² / (N/ℓ · (1 − 1/ℓ))`.
pub fn chi_sq_statistic(v: &CounterVector) -> Result<f64> {
    let n = v.total();
    if n == 0 {
        return Err(Error::InvalidParameter("statistic over zero samples".into()));
    }
    let ell = v.counts.len() as f64;
    let expected = n as f64 / ell;
    let denom = expected * (1.0 - 1.0 / ell);
    Ok(v.counts.iter().map(|&c| (c as f64 - expected).powi(2)).sum::<f64>() / denom)
}

/// Inputs to the moment and data-complexity formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistinguisherParams {
    /// Block size in bits.
    pub n: u32,
    /// Dimension; `ℓ = 2^m`.
    pub m: u32,
    /// `log2` of the type-I error probability.
    pub beta0_log2: f64,
    /// `log2` of the type-II error probability.
    pub beta1_log2: f64,
}

impl DistinguisherParams {
    pub fn new(n: u32, m: u32, beta0_log2: f64, beta1_log2: f64) -> Result<Self> {
        if n == 0 || n > 128 || m == 0 || m > 32 {
            return Err(Error::InvalidParameter(format!("n = {n}, m = {m}")));
        }
        for (name, b) in [("beta0", beta0_log2), ("beta1", beta1_log2)] {
            if !(b < -1.0) || !b.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} = 2^{b} is not in (0, 1/2)")));
            }
        }
        Ok(DistinguisherParams { n, m, beta0_log2, beta1_log2 })
    }

    pub fn ell(&self) -> f64 {
        (self.m as f64).exp2()
    }

    /// `z_{1−β_0}`.
    pub fn z0(&self) -> f64 {
        normal::upper_quantile_log2(self.beta0_log2).expect("validated")
    }

    /// `z_{1−β_1}`.
    pub fn z1(&self) -> f64 {
        normal::upper_quantile_log2(self.beta1_log2).expect("validated")
    }
}

/// `N = (2^n − 1)(z_{1−β_0} + z_{1−β_1}) / (√((ℓ−1)/2) + z_{1−β_0}) + 1`.
pub fn required_samples(p: &DistinguisherParams) -> f64 {
    let (z0, z1) = (p.z0(), p.z1());
    let space = (p.n as f64).exp2() - 1.0;
    space * (z0 + z1) / (((p.ell() - 1.0) / 2.0).sqrt() + z0) + 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    pub n_samples: f64,
    pub mu0: f64,
    pub sigma0_sq: f64,
    pub mu1: f64,
    pub sigma1_sq: f64,
    /// `μ_0 + σ_0·z_{1−β_0}`, the threshold used for decisions.
    pub tau: f64,
    /// `μ_1 − σ_1·z_{1−β_1}`; equal to `tau` at the designed `N`.
    pub tau_from_wrong_key: f64,
}

/// Right-key (`μ_0, σ_0²`) and wrong-key (`μ_1, σ_1²`) moments for `N` samples.
pub fn moments(p: &DistinguisherParams, n_samples: f64) -> Result<MomentSet> {
    let space = (p.n as f64).exp2();
    if !(0.0..=space).contains(&n_samples) {
        return Err(Error::InvalidParameter(format!("N = {n_samples} outside [0, 2^{}]", p.n)));
    }
    let l1 = p.ell() - 1.0;
    let ratio = (space - n_samples) / (space - 1.0);
    let mu0 = l1 * ratio;
    let sigma0_sq = 2.0 * l1 * ratio * ratio;
    let mu1 = l1;
    let sigma1_sq = 2.0 * l1;
    Ok(MomentSet {
        n_samples,
        mu0,
        sigma0_sq,
        mu1,
        sigma1_sq,
        tau: mu0 + sigma0_sq.sqrt() * p.z0(),
        tau_from_wrong_key: mu1 - sigma1_sq.sqrt() * p.z1(),
    })
}

/// Survivor rule: a guess is kept when `T ≤ τ`.
#[inline]
pub fn survives(t: f64, tau: f64) -> bool {
    t <= tau
}
