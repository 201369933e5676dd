//! Linear masks and correlations.
//!
//! Exact correlations are kept as integer numerators over a power-of-two
//! domain so that "exactly zero" is decidable; floats only appear in sampled
//! estimates.

mod fl;
pub mod lemmas;

pub use fl::{fl_bar, fl_bar_chain, fl_mask_backpropagate};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::{dot, ones};
use crate::error::{Error, Result};

/// Largest domain (as a power of two) enumerated exhaustively.
pub const ENUMERATION_LIMIT_LOG2: u32 = 24;

/// A mask over a `width`-bit value, MSB-first like every other value here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinearMask {
    pub bits: u64,
    pub width: u32,
}

impl LinearMask {
    pub fn new(bits: u64, width: u32) -> Result<Self> {
        if width == 0 || width > 64 || bits > ones(width) {
            return Err(Error::WidthMismatch { what: "mask", value: bits, bits: width });
        }
        Ok(LinearMask { bits, width })
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    /// Parity of the selected bits of `value`.
    pub fn parity(&self, value: u64) -> Result<u32> {
        if value > ones(self.width) {
            return Err(Error::WidthMismatch { what: "masked value", value, bits: self.width });
        }
        Ok(dot(self.bits, value))
    }
}

/// An exact or sampled correlation value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Correlation {
    /// `numerator / 2^log2_domain`.
    Exact { numerator: i64, log2_domain: u32 },
    /// Signed agreement count over `samples` draws.
    Sampled { numerator: i64, samples: u64 },
}

impl Correlation {
    pub fn value(&self) -> f64 {
        match *self {
            Correlation::Exact { numerator, log2_domain } => numerator as f64 / (log2_domain as f64).exp2(),
            Correlation::Sampled { numerator, samples } => numerator as f64 / samples as f64,
        }
    }

    pub fn numerator(&self) -> i64 {
        match *self {
            Correlation::Exact { numerator, .. } | Correlation::Sampled { numerator, .. } => numerator,
        }
    }

    /// Exact and zero. Sampled values never qualify.
    pub fn is_exact_zero(&self) -> bool {
        matches!(self, Correlation::Exact { numerator: 0, .. })
    }

    /// One standard deviation of a sampled estimate around zero.
    pub fn standard_error(&self) -> f64 {
        match *self {
            Correlation::Exact { .. } => 0.0,
            Correlation::Sampled { samples, .. } => (samples as f64).sqrt().recip(),
        }
    }
}

fn guard(n: u32) -> Result<()> {
    if n > ENUMERATION_LIMIT_LOG2 {
        Err(Error::DomainTooLarge { bits: n, limit: ENUMERATION_LIMIT_LOG2 })
    } else {
        Ok(())
    }
}

/// `Σ_x (-1)^{β·f(x) ⊕ α·x}` over all `n`-bit `x`, as an exact correlation.
pub fn correlation_exhaustive<F>(n: u32, f: F, alpha: u64, beta: u64) -> Result<Correlation>
where
    F: Fn(u64) -> u64 + Sync,
{
    guard(n)?;
    let numerator: i64 = (0..1u64 << n)
        .into_par_iter()
        .map(|x| 1 - 2 * (dot(beta, f(x)) ^ dot(alpha, x)) as i64)
        .sum();
    Ok(Correlation::Exact { numerator, log2_domain: n })
}

/// In-place fast Walsh–Hadamard transform.
pub fn fwht(v: &mut [i64]) {
    let n = v.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in v.chunks_mut(2 * h) {
            let (a, b) = block.split_at_mut(h);
            for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                let (s, d) = (*x + *y, *x - *y);
                *x = s;
                *y = d;
            }
        }
        h *= 2;
    }
}

/// Correlation numerators of `β·f(x) ⊕ α·x` for every `α`, indexed by `α`,
/// all over the denominator `2^n`.
pub fn correlation_wht<F>(n: u32, f: F, beta: u64) -> Result<Vec<i64>>
where
    F: Fn(u64) -> u64 + Sync,
{
    guard(n)?;
    let mut v: Vec<i64> = (0..1u64 << n)
        .into_par_iter()
        .map(|x| 1 - 2 * dot(beta, f(x)) as i64)
        .collect();
    fwht(&mut v);
    Ok(v)
}

/// Sampled correlation of `β·f(x) ⊕ α·x` over uniform `x` of `n` bits.
pub fn correlation_sampled<F>(n: u32, f: F, alpha: u64, beta: u64, samples: u64, seed: u64) -> Correlation
where
    F: Fn(u64) -> u64,
{
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mask = ones(n);
    let mut numerator = 0i64;
    for _ in 0..samples {
        let x = rng.random::<u64>() & mask;
        numerator += 1 - 2 * (dot(beta, f(x)) ^ dot(alpha, x)) as i64;
    }
    Correlation::Sampled { numerator, samples }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::CipherParams;

    #[test]
    fn parity_conventions() {
        let m = LinearMask::new(0, 8).unwrap();
        assert_eq!(m.parity(0xab).unwrap(), 0);
        let m = LinearMask::new(0xff, 8).unwrap();
        assert_eq!(m.parity(0xab).unwrap(), 5 % 2);
        let m = LinearMask::new(0x80, 8).unwrap();
        assert_eq!(m.parity(0x80).unwrap(), 1);
        assert_eq!(m.parity(0x7f).unwrap(), 0);
        assert!(m.parity(0x100).is_err());
        assert!(LinearMask::new(0x100, 8).is_err());
    }

    #[test]
    fn identity_correlations() {
        let c = correlation_exhaustive(8, |x| x, 0x5a, 0x5a).unwrap();
        assert_eq!(c.value(), 1.0);
        let c = correlation_exhaustive(8, |x| x, 0x5a, 0x5b).unwrap();
        assert!(c.is_exact_zero());
    }

    #[test]
    fn wht_matches_direct_sum_on_toy_fi() {
        let p = CipherParams::toy();
        let f = |x: u64| p.fi(x as u32, 0b1010) as u64;
        for beta in 0..16 {
            let w = correlation_wht(4, f, beta).unwrap();
            let mut energy = 0;
            for alpha in 0..16u64 {
                let c = correlation_exhaustive(4, f, alpha, beta).unwrap();
                assert_eq!(c.numerator(), w[alpha as usize]);
                energy += w[alpha as usize] * w[alpha as usize];
            }
            assert_eq!(energy, 256, "Parseval for beta {beta}");
        }
    }

    #[test]
    fn zero_output_mask_is_a_delta() {
        let w = correlation_wht(6, |x| x ^ 3, 0).unwrap();
        assert_eq!(w[0], 64);
        assert!(w[1..].iter().all(|&c| c == 0));
    }

    #[test]
    fn guard_refuses_large_domains() {
        assert!(matches!(
            correlation_exhaustive(25, |x| x, 1, 1),
            Err(Error::DomainTooLarge { bits: 25, .. })
        ));
    }

    #[test]
    fn sampled_estimator_tracks_a_biased_function() {
        // Output bit equals input bit 0 except on one quarter of inputs: correlation 1/2.
        let f = |x: u64| if x & 0b110 == 0b110 { x ^ 1 } else { x };
        let c = correlation_sampled(16, f, 1, 1, 1 << 16, 7);
        assert!((c.value() - 0.5).abs() < 3.0 * c.standard_error());
    }
}
