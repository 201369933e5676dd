//! Named subkey fragments guessed by the attacks.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::bits::ones;
use crate::cipher::CipherParams;
use crate::error::{Error, Result};

/// A named fragment width, e.g. `K8[0-8]` with 9 bits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FragmentSpec {
    pub name: String,
    pub bits: u32,
}

impl FragmentSpec {
    pub fn new(name: impl Into<String>, bits: u32) -> Self {
        FragmentSpec { name: name.into(), bits }
    }
}

/// Key material guessed (or derived) so far, in guessing order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct KeyGuess {
    pub fragments: Vec<(FragmentSpec, u64)>,
}

impl KeyGuess {
    pub fn push(&mut self, spec: FragmentSpec, value: u64) -> Result<()> {
        if value > ones(spec.bits) {
            return Err(Error::WidthMismatch { what: "key fragment", value, bits: spec.bits });
        }
        if let Some(slot) = self.fragments.iter_mut().find(|(s, _)| s.name == spec.name) {
            slot.1 = value;
        } else {
            self.fragments.push((spec, value));
        }
        Ok(())
    }

    pub fn with(mut self, spec: FragmentSpec, value: u64) -> Result<Self> {
        self.push(spec, value)?;
        Ok(self)
    }

    pub fn get(&self, name: &str) -> Result<u64> {
        self.fragments
            .iter()
            .find(|(s, _)| s.name == name)
            .map(|&(_, v)| v)
            .ok_or_else(|| Error::MissingFragment(name.to_string()))
    }

    pub fn guessed_bits(&self) -> u32 {
        self.fragments.iter().map(|(s, _)| s.bits).sum()
    }

    /// Fragment values as zero-padded hex, keyed by name.
    pub fn to_hex(&self) -> BTreeMap<String, String> {
        self.fragments
            .iter()
            .map(|(s, v)| (s.name.clone(), format!("{v:0w$x}", w = s.bits.div_ceil(4) as usize)))
            .collect()
    }
}

/// Name of the MSB-first bit range `[a-b]` of a key word.
pub fn range_name(word: &str, start: u32, len: u32) -> String {
    if len == 1 {
        format!("{word}[{start}]")
    } else {
        format!("{word}[{start}-{}]", start + len - 1)
    }
}

/// `K'8 = FI(K8, K1)`, `K3 = FI⁻¹(K'3, K4)`, `K'2 = FI(K2, K3)` and, for the
/// chain key `KL5,2`, `K'1 = FI(K1, K2)`.
pub fn derive_dependent_subkeys(params: &CipherParams, guess: &KeyGuess) -> Result<KeyGuess> {
    let w = params.word_bits;
    let (k1, k2, k4, k8, kp3) = (guess.get("K1")?, guess.get("K2")?, guess.get("K4")?, guess.get("K8")?, guess.get("K'3")?);
    let fi = |x: u64, k: u64| params.fi(x as u32, k as u32) as u64;
    let kp8 = fi(k8, k1);
    let k3 = params.fi_inv(kp3 as u32, k4 as u32) as u64;
    let kp2 = fi(k2, k3);
    let kp1 = fi(k1, k2);
    guess
        .clone()
        .with(FragmentSpec::new("K'8", w), kp8)?
        .with(FragmentSpec::new("K3", w), k3)?
        .with(FragmentSpec::new("K'2", w), kp2)?
        .with(FragmentSpec::new("K'1", w), kp1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cipher::{MasterKey, SubkeySchedule};

    fn full_guess(p: &CipherParams, s: &SubkeySchedule) -> KeyGuess {
        let w = p.word_bits;
        let mut g = KeyGuess::default();
        for (n, v) in [("K1", s.k(1)), ("K2", s.k(2)), ("K4", s.k(4)), ("K8", s.k(8)), ("K'3", s.k_prime(3))] {
            g.push(FragmentSpec::new(n, w), v as u64).unwrap();
        }
        g
    }

    #[test]
    fn derived_words_match_schedule() {
        for p in [CipherParams::misty1(), CipherParams::toy()] {
            for seed in 0..4u32 {
                let key = MasterKey(std::array::from_fn(|i| (seed * 7919 + i as u32 * 104_729) & p.word_mask()));
                let s = SubkeySchedule::new(&p, &key);
                let d = derive_dependent_subkeys(&p, &full_guess(&p, &s)).unwrap();
                assert_eq!(d.get("K'8").unwrap(), s.k_prime(8) as u64);
                assert_eq!(d.get("K3").unwrap(), s.k(3) as u64);
                assert_eq!(d.get("K'2").unwrap(), s.k_prime(2) as u64);
                assert_eq!(d.get("K'1").unwrap(), s.k_prime(1) as u64);
                let k3 = d.get("K3").unwrap() as u32;
                assert_eq!(p.fi(k3, s.k(4)) as u64, d.get("K'3").unwrap());
            }
        }
    }

    #[test]
    fn missing_fragment_is_reported() {
        let g = KeyGuess::default().with(FragmentSpec::new("K1", 16), 1).unwrap();
        assert_eq!(
            derive_dependent_subkeys(&CipherParams::misty1(), &g),
            Err(Error::MissingFragment("K2".into()))
        );
        assert!(KeyGuess::default().with(FragmentSpec::new("x", 3), 8).is_err());
    }

    #[test]
    fn names() {
        assert_eq!(range_name("K8", 0, 9), "K8[0-8]");
        assert_eq!(range_name("K'3", 0, 1), "K'3[0]");
    }
}
