//! The FI, FO and FL building blocks, parametrised by word width.
//!
//! An FI input is split into a `long_bits` top part and a `short_bits` bottom
//! part. The key split matches the reference implementation: the top
//! `short_bits` of KI enter the short branch and the bottom `long_bits` the
//! long branch.

use super::params::CipherParams;
use crate::error::Result;

/// Subkeys consumed by one FO function: `ko[0..4]` and `ki[0..3]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FoKey {
    pub ko: [u32; 4],
    pub ki: [u32; 3],
}

/// Subkeys consumed by one FL function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FlKey {
    pub kl1: u32,
    pub kl2: u32,
}

impl CipherParams {
    /// FI without width checks. Inputs must already fit in a word.
    #[inline]
    pub fn fi(&self, x: u32, ki: u32) -> u32 {
        let (l, lmask, smask) = (self.long_bits, self.long_mask(), self.short_mask());
        let mut d_long = x >> self.short_bits;
        let mut d_short = x & smask;
        d_long = self.sbox_long.apply(d_long) ^ d_short;
        d_short = self.sbox_short.apply(d_short) ^ (d_long & smask);
        d_short ^= ki >> l;
        d_long ^= ki & lmask;
        d_long = self.sbox_long.apply(d_long) ^ d_short;
        d_short << l | d_long
    }

    /// Inverse of [`CipherParams::fi`] for a fixed key.
    #[inline]
    pub fn fi_inv(&self, y: u32, ki: u32) -> u32 {
        let (l, lmask, smask) = (self.long_bits, self.long_mask(), self.short_mask());
        let d_short = y >> l;
        let mut d_long = self.sbox_long.invert((y & lmask) ^ d_short);
        d_long ^= ki & lmask;
        let d_short = d_short ^ (ki >> l);
        let x_short = self.sbox_short.invert(d_short ^ (d_long & smask));
        let x_long = self.sbox_long.invert(d_long ^ x_short);
        x_long << self.short_bits | x_short
    }

    pub fn fi_checked(&self, x: u32, ki: u32) -> Result<u32> {
        self.check_word("FI input", x)?;
        self.check_word("KI", ki)?;
        Ok(self.fi(x, ki))
    }

    #[inline]
    pub fn fo(&self, x: u32, key: &FoKey) -> u32 {
        let w = self.word_bits;
        let wm = self.word_mask();
        let mut t0 = x >> w;
        let mut t1 = x & wm;
        t0 = self.fi(t0 ^ key.ko[0], key.ki[0]) ^ t1;
        t1 = self.fi(t1 ^ key.ko[1], key.ki[1]) ^ t0;
        t0 = self.fi(t0 ^ key.ko[2], key.ki[2]) ^ t1;
        t1 ^= key.ko[3];
        t1 << w | t0
    }

    pub fn fo_checked(&self, x: u32, key: &FoKey) -> Result<u32> {
        self.check_half("FO input", x)?;
        for &k in key.ko.iter().chain(key.ki.iter()) {
            self.check_word("FO subkey", k)?;
        }
        Ok(self.fo(x, key))
    }

    #[inline]
    pub fn fl(&self, x: u32, key: &FlKey) -> u32 {
        let w = self.word_bits;
        let mut d0 = x >> w;
        let mut d1 = x & self.word_mask();
        d1 ^= d0 & key.kl1;
        d0 ^= d1 | key.kl2;
        d0 << w | d1
    }

    #[inline]
    pub fn fl_inv(&self, y: u32, key: &FlKey) -> u32 {
        let w = self.word_bits;
        let mut d0 = y >> w;
        let mut d1 = y & self.word_mask();
        d0 ^= d1 | key.kl2;
        d1 ^= d0 & key.kl1;
        d0 << w | d1
    }

    pub fn fl_checked(&self, x: u32, key: &FlKey) -> Result<u32> {
        self.check_half("FL input", x)?;
        self.check_word("KL1", key.kl1)?;
        self.check_word("KL2", key.kl2)?;
        Ok(self.fl(x, key))
    }
}
