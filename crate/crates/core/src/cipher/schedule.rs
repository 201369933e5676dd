//! Key schedule. Subkey indices are 1-based throughout, matching the usual
//! MISTY1 notation `K1..K8`, `K'1..K'8`, `KO_{i,j}`, `KI_{i,j}`, `KL_{i,j}`.

use serde::{Deserialize, Serialize};

use super::functions::{FlKey, FoKey};
use super::params::CipherParams;
use crate::error::{Error, Result};

/// Eight key words `K1..K8`, each `word_bits` wide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MasterKey(pub [u32; 8]);

impl MasterKey {
    pub fn new(params: &CipherParams, words: [u32; 8]) -> Result<Self> {
        for &w in &words {
            params.check_word("key word", w)?;
        }
        Ok(MasterKey(words))
    }

    /// Parses a key written as eight concatenated words, most significant first
    /// (32 hex digits for MISTY1, 8 for the toy cipher).
    pub fn from_hex(params: &CipherParams, hex: &str) -> Result<Self> {
        let digits = (params.word_bits / 4) as usize;
        let hex = hex.trim();
        if hex.len() != 8 * digits {
            return Err(Error::Parse(format!(
                "key must have {} hex digits, got {}",
                8 * digits,
                hex.len()
            )));
        }
        let mut words = [0u32; 8];
        for (i, w) in words.iter_mut().enumerate() {
            let s = &hex[i * digits..(i + 1) * digits];
            *w = u32::from_str_radix(s, 16).map_err(|e| Error::Parse(format!("{s}: {e}")))?;
        }
        Ok(MasterKey(words))
    }

    pub fn to_hex(&self, params: &CipherParams) -> String {
        let digits = (params.word_bits / 4) as usize;
        self.0.iter().map(|w| format!("{w:0digits$x}")).collect()
    }

    /// Draws a uniformly random key.
    pub fn random<R: rand::Rng + ?Sized>(params: &CipherParams, rng: &mut R) -> Self {
        let mask = params.word_mask();
        MasterKey(std::array::from_fn(|_| rng.random::<u32>() & mask))
    }
}

/// `K1..K8` together with the derived words `K'i = FI(Ki, K(i+1))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubkeySchedule {
    k: [u32; 8],
    k_prime: [u32; 8],
}

#[inline]
fn wrap(i: usize) -> usize {
    (i - 1) % 8
}

impl SubkeySchedule {
    pub fn new(params: &CipherParams, key: &MasterKey) -> Self {
        let k = key.0;
        let k_prime = std::array::from_fn(|i| params.fi(k[i], k[(i + 1) % 8]));
        SubkeySchedule { k, k_prime }
    }

    /// `K_i`, indices taken modulo 8 into `1..=8`.
    #[inline]
    pub fn k(&self, i: usize) -> u32 {
        self.k[wrap(i)]
    }

    /// `K'_i`, indices taken modulo 8 into `1..=8`.
    #[inline]
    pub fn k_prime(&self, i: usize) -> u32 {
        self.k_prime[wrap(i)]
    }

    /// `(KO_{i,1}, .., KO_{i,4}) = (K_i, K_{i+2}, K_{i+7}, K_{i+4})`.
    pub fn ko(&self, round: usize) -> [u32; 4] {
        [self.k(round), self.k(round + 2), self.k(round + 7), self.k(round + 4)]
    }

    /// `(KI_{i,1}, KI_{i,2}, KI_{i,3}) = (K'_{i+5}, K'_{i+1}, K'_{i+3})`.
    pub fn ki(&self, round: usize) -> [u32; 3] {
        [self.k_prime(round + 5), self.k_prime(round + 1), self.k_prime(round + 3)]
    }

    /// `(KL_{i,1}, KL_{i,2})` for FL layer `i` in `1..=10`.
    pub fn kl(&self, layer: usize) -> [u32; 2] {
        if layer % 2 == 1 {
            let j = (layer + 1) / 2;
            [self.k(j), self.k_prime(j + 6)]
        } else {
            let j = layer / 2;
            [self.k_prime(j + 2), self.k(j + 4)]
        }
    }

    pub fn fo_key(&self, round: usize) -> FoKey {
        FoKey { ko: self.ko(round), ki: self.ki(round) }
    }

    pub fn fl_key(&self, layer: usize) -> FlKey {
        let [kl1, kl2] = self.kl(layer);
        FlKey { kl1, kl2 }
    }
}

/// Expanded per-round keys. Built from a [`SubkeySchedule`] or assembled by
/// hand when a test needs independent round keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RoundKeys {
    /// `fo[i - 1]` is used by round `i`.
    pub fo: [FoKey; 8],
    /// `fl[i - 1]` is used by FL layer `i`.
    pub fl: [FlKey; 10],
}

impl RoundKeys {
    pub fn from_schedule(s: &SubkeySchedule) -> Self {
        RoundKeys {
            fo: std::array::from_fn(|i| s.fo_key(i + 1)),
            fl: std::array::from_fn(|i| s.fl_key(i + 1)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schedule() -> SubkeySchedule {
        let p = CipherParams::misty1();
        let key = MasterKey::from_hex(&p, "00112233445566778899aabbccddeeff").unwrap();
        SubkeySchedule::new(&p, &key)
    }

    #[test]
    fn derived_words_match_reference() {
        let s = schedule();
        let expected = [0xcf51, 0x8e7f, 0x5e29, 0x673a, 0xcdbc, 0x07d6, 0xbf35, 0x5e11];
        for (i, &e) in expected.iter().enumerate() {
            assert_eq!(s.k_prime(i + 1), e, "K'{}", i + 1);
        }
    }

    #[test]
    fn selection_table() {
        let s = schedule();
        assert_eq!(s.ko(1), [s.k(1), s.k(3), s.k(8), s.k(5)]);
        assert_eq!(s.ki(8), [s.k_prime(5), s.k_prime(1), s.k_prime(3)]);
        assert_eq!(s.kl(10), [s.k_prime(7), s.k(1)]);
        assert_eq!(s.kl(9), [s.k(5), s.k_prime(3)]);
        assert_eq!(s.kl(3), [s.k(2), s.k_prime(8)]);
        assert_eq!(s.kl(5), [s.k(3), s.k_prime(1)]);
        assert_eq!(s.kl(7), [s.k(4), s.k_prime(2)]);
        assert_eq!(s.kl(2), [s.k_prime(3), s.k(5)]);
    }

    #[test]
    fn hex_round_trip() {
        let p = CipherParams::toy();
        let key = MasterKey::from_hex(&p, "0123abcd").unwrap();
        assert_eq!(key.0, [0, 1, 2, 3, 0xa, 0xb, 0xc, 0xd]);
        assert_eq!(key.to_hex(&p), "0123abcd");
        assert!(MasterKey::from_hex(&p, "0123abc").is_err());
        assert!(MasterKey::new(&p, [16, 0, 0, 0, 0, 0, 0, 0]).is_err());
    }
}
