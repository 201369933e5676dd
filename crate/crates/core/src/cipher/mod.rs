//! MISTY1 and its width-reduced toy counterpart.
//!
//! The round function acts on a state `(L, R)` of two halves:
//! `(L, R) <- (FO_i(L) ^ R, L)`. Before every odd round `2j-1` the present FL
//! layers `FL_{2j-1}` and `FL_{2j}` act on `L` and `R`; after round 8, `FL_9`
//! and `FL_10` do. A plaintext block is `L || R` before the first active
//! round. A ciphertext block is `R || L` after the last one, the orientation
//! of the reference implementation.

mod functions;
mod params;
pub mod sbox;
mod suite;
mod schedule;
pub mod vectors;

pub use functions::{FlKey, FoKey};
pub use params::{fl_layer_round, CipherParams, FlLayers, Variant};
pub use schedule::{MasterKey, RoundKeys, SubkeySchedule};
pub use suite::cipher_suite;

pub(crate) use params::check_width;
use crate::error::Result;

/// A keyed cipher instance.
#[derive(Debug, Clone)]
pub struct Cipher {
    params: CipherParams,
    keys: RoundKeys,
}

impl Cipher {
    pub fn new(params: CipherParams, key: &MasterKey) -> Result<Self> {
        let key = MasterKey::new(&params, key.0)?;
        let schedule = SubkeySchedule::new(&params, &key);
        Ok(Cipher { keys: RoundKeys::from_schedule(&schedule), params })
    }

    /// Uses explicitly supplied round keys instead of the key schedule.
    pub fn with_round_keys(params: CipherParams, keys: RoundKeys) -> Result<Self> {
        for fo in &keys.fo {
            for &k in fo.ko.iter().chain(fo.ki.iter()) {
                params.check_word("round key", k)?;
            }
        }
        for fl in &keys.fl {
            params.check_word("KL1", fl.kl1)?;
            params.check_word("KL2", fl.kl2)?;
        }
        Ok(Cipher { params, keys })
    }

    pub fn params(&self) -> &CipherParams {
        &self.params
    }

    pub fn round_keys(&self) -> &RoundKeys {
        &self.keys
    }

    #[inline]
    fn fl_layer(&self, layer: usize, x: u32) -> u32 {
        if self.params.fl_layers.contains(layer) {
            self.params.fl(x, &self.keys.fl[layer - 1])
        } else {
            x
        }
    }

    #[inline]
    fn fl_layer_inv(&self, layer: usize, x: u32) -> u32 {
        if self.params.fl_layers.contains(layer) {
            self.params.fl_inv(x, &self.keys.fl[layer - 1])
        } else {
            x
        }
    }

    /// Runs the active rounds on a state `(L, R)` and returns the final state.
    #[inline]
    pub fn encrypt_state(&self, mut l: u32, mut r: u32) -> (u32, u32) {
        for round in self.params.rounds() {
            let i = round as usize;
            if i % 2 == 1 {
                l = self.fl_layer(i, l);
                r = self.fl_layer(i + 1, r);
            }
            let next = self.params.fo(l, &self.keys.fo[i - 1]) ^ r;
            r = l;
            l = next;
            if i == 8 {
                l = self.fl_layer(9, l);
                r = self.fl_layer(10, r);
            }
        }
        (l, r)
    }

    /// Inverse of [`Cipher::encrypt_state`].
    #[inline]
    pub fn decrypt_state(&self, mut l: u32, mut r: u32) -> (u32, u32) {
        for round in self.params.rounds().rev() {
            let i = round as usize;
            if i == 8 {
                l = self.fl_layer_inv(9, l);
                r = self.fl_layer_inv(10, r);
            }
            let prev_l = r;
            r = l ^ self.params.fo(prev_l, &self.keys.fo[i - 1]);
            l = prev_l;
            if i % 2 == 1 {
                l = self.fl_layer_inv(i, l);
                r = self.fl_layer_inv(i + 1, r);
            }
        }
        (l, r)
    }

    #[inline]
    pub fn encrypt(&self, block: u64) -> u64 {
        let h = self.params.half_bits();
        let (l, r) = self.encrypt_state((block >> h) as u32, block as u32 & self.params.half_mask());
        (r as u64) << h | l as u64
    }

    #[inline]
    pub fn decrypt(&self, block: u64) -> u64 {
        let h = self.params.half_bits();
        let (l, r) = self.decrypt_state(block as u32 & self.params.half_mask(), (block >> h) as u32);
        (l as u64) << h | r as u64
    }

    pub fn encrypt_checked(&self, block: u64) -> Result<u64> {
        params::check_width("plaintext", block, self.params.block_bits())?;
        Ok(self.encrypt(block))
    }

    pub fn decrypt_checked(&self, block: u64) -> Result<u64> {
        params::check_width("ciphertext", block, self.params.block_bits())?;
        Ok(self.decrypt(block))
    }
}

/// Splits a ciphertext block into the final state `(L, R)`.
#[inline]
pub fn ciphertext_state(params: &CipherParams, ct: u64) -> (u32, u32) {
    let h = params.half_bits();
    (ct as u32 & params.half_mask(), (ct >> h) as u32)
}

/// Splits a plaintext block into the initial state `(L, R)`.
#[inline]
pub fn plaintext_state(params: &CipherParams, pt: u64) -> (u32, u32) {
    let h = params.half_bits();
    ((pt >> h) as u32, pt as u32 & params.half_mask())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_vectors() {
        let p = CipherParams::misty1();
        let key = MasterKey::from_hex(&p, "00112233445566778899aabbccddeeff").unwrap();
        let c = Cipher::new(p, &key).unwrap();
        assert_eq!(c.encrypt(0x0123456789abcdef), 0x8b1da5f56ab3d07c);
        assert_eq!(c.encrypt(0xfedcba9876543210), 0x04b68240b13be95d);
        assert_eq!(c.decrypt(0x8b1da5f56ab3d07c), 0x0123456789abcdef);
    }

    #[test]
    fn reduced_rounds_round_trip() {
        for variant in [Variant::Real, Variant::Toy] {
            for p in [
                CipherParams::seven_round_with_fl(variant),
                CipherParams::seven_round_no_fl(variant),
            ] {
                let key = MasterKey([1, 2, 3, 4, 5, 6, 7, 8]);
                let c = Cipher::new(p.clone(), &key).unwrap();
                let mask = crate::bits::ones(p.block_bits());
                for pt in [0u64, 1, 0x1234, mask, mask / 3] {
                    assert_eq!(c.decrypt(c.encrypt(pt & mask)), pt & mask);
                }
            }
        }
    }

    #[test]
    fn state_and_block_views_agree() {
        let p = CipherParams::seven_round_with_fl(Variant::Real);
        let c = Cipher::new(p.clone(), &MasterKey([9, 8, 7, 6, 5, 4, 3, 2])).unwrap();
        let pt = 0x0011_2233_4455_6677;
        let (l0, r0) = plaintext_state(&p, pt);
        let (l8, r8) = c.encrypt_state(l0, r0);
        assert_eq!(ciphertext_state(&p, c.encrypt(pt)), (l8, r8));
    }

    #[test]
    fn checked_block_width() {
        let c = Cipher::new(CipherParams::toy(), &MasterKey([0; 8])).unwrap();
        assert!(c.encrypt_checked(1 << 16).is_err());
        assert!(c.decrypt_checked(0xffff).is_ok());
    }
}
