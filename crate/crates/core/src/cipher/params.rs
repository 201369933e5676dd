use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::sbox::{misty_boxes, toy_boxes, Sbox};
use crate::bits::ones;
use crate::error::{Error, Result};

/// Which instantiation of the MISTY1 structure is in use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// 64-bit block, 16-bit words, FI split (9, 7).
    Real,
    /// 16-bit block, 4-bit words, FI split (3, 1).
    Toy,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Real => f.write_str("real"),
            Variant::Toy => f.write_str("toy"),
        }
    }
}

/// Set of FL layers (indices 1..=10) that are present.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct FlLayers(u16);

impl FlLayers {
    pub const NONE: FlLayers = FlLayers(0);
    pub const ALL: FlLayers = FlLayers(0b111_1111_1110);

    pub fn from_indices<I: IntoIterator<Item = u8>>(layers: I) -> Result<Self> {
        let mut set = 0u16;
        for l in layers {
            if !(1..=10).contains(&l) {
                return Err(Error::InvalidRounds(format!("FL layer {l} is outside 1..=10")));
            }
            set |= 1 << l;
        }
        Ok(FlLayers(set))
    }

    #[inline]
    pub fn contains(&self, layer: usize) -> bool {
        self.0 >> layer & 1 == 1
    }

    pub fn indices(&self) -> Vec<u8> {
        (1..=10u8).filter(|&l| self.contains(l as usize)).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }
}

/// Round that owns an FL layer: layers 2j-1 and 2j precede odd round 2j-1,
/// layers 9 and 10 follow round 8.
pub fn fl_layer_round(layer: u8) -> u8 {
    if layer >= 9 {
        8
    } else {
        (layer + 1) / 2 * 2 - 1
    }
}

/// Full description of a cipher instance: widths, S-boxes, and which part of
/// the 8-round / 10-FL-layer skeleton is active.
#[derive(Debug, Clone)]
pub struct CipherParams {
    pub variant: Variant,
    /// Width of FI inputs, FO/FL halves and key words.
    pub word_bits: u32,
    /// Width of the left (S9-side) part of an FI input.
    pub long_bits: u32,
    /// Width of the right (S7-side) part of an FI input.
    pub short_bits: u32,
    pub sbox_long: Arc<Sbox>,
    pub sbox_short: Arc<Sbox>,
    pub first_round: u8,
    pub last_round: u8,
    pub fl_layers: FlLayers,
}

impl CipherParams {
    /// Full 8-round MISTY1 with all ten FL layers.
    pub fn misty1() -> Self {
        let (sbox_long, sbox_short) = misty_boxes();
        CipherParams {
            variant: Variant::Real,
            word_bits: 16,
            long_bits: 9,
            short_bits: 7,
            sbox_long,
            sbox_short,
            first_round: 1,
            last_round: 8,
            fl_layers: FlLayers::ALL,
        }
    }

    /// Width-reduced toy cipher with the same structure, 8 rounds, all FL layers.
    pub fn toy() -> Self {
        let (sbox_long, sbox_short) = toy_boxes();
        CipherParams {
            variant: Variant::Toy,
            word_bits: 4,
            long_bits: 3,
            short_bits: 1,
            sbox_long,
            sbox_short,
            first_round: 1,
            last_round: 8,
            fl_layers: FlLayers::ALL,
        }
    }

    pub fn for_variant(variant: Variant) -> Self {
        match variant {
            Variant::Real => Self::misty1(),
            Variant::Toy => Self::toy(),
        }
    }

    /// Replaces the S-boxes, e.g. to build a deliberately faulty instance.
    pub fn with_sboxes(mut self, long: &[u16], short: &[u16]) -> Result<Self> {
        let long = Sbox::new(long)?;
        let short = Sbox::new(short)?;
        if long.bits() != self.long_bits || short.bits() != self.short_bits {
            return Err(Error::WidthMismatch {
                what: "s-box",
                value: (long.bits() as u64) << 8 | short.bits() as u64,
                bits: self.long_bits,
            });
        }
        self.sbox_long = Arc::new(long);
        self.sbox_short = Arc::new(short);
        Ok(self)
    }

    /// Restricts the cipher to rounds `first..=last` and the given FL layers.
    pub fn with_rounds(mut self, first: u8, last: u8, fl_layers: FlLayers) -> Result<Self> {
        if !(1..=8).contains(&first) || !(1..=8).contains(&last) || first > last {
            return Err(Error::InvalidRounds(format!("rounds {first}..={last}")));
        }
        for layer in fl_layers.indices() {
            let owner = fl_layer_round(layer);
            if owner < first || owner > last {
                return Err(Error::InvalidRounds(format!(
                    "FL layer {layer} belongs to round {owner}, outside {first}..={last}"
                )));
            }
        }
        self.first_round = first;
        self.last_round = last;
        self.fl_layers = fl_layers;
        Ok(self)
    }

    /// Rounds 2..=8 with FL layers 3..=10.
    pub fn seven_round_with_fl(variant: Variant) -> Self {
        let layers = FlLayers::from_indices(3..=10).unwrap();
        Self::for_variant(variant).with_rounds(2, 8, layers).unwrap()
    }

    /// Rounds 2..=8 without FL layers.
    pub fn seven_round_no_fl(variant: Variant) -> Self {
        Self::for_variant(variant)
            .with_rounds(2, 8, FlLayers::NONE)
            .unwrap()
    }

    #[inline]
    pub fn half_bits(&self) -> u32 {
        2 * self.word_bits
    }

    #[inline]
    pub fn block_bits(&self) -> u32 {
        4 * self.word_bits
    }

    #[inline]
    pub fn word_mask(&self) -> u32 {
        ones(self.word_bits) as u32
    }

    #[inline]
    pub fn half_mask(&self) -> u32 {
        ones(self.half_bits()) as u32
    }

    #[inline]
    pub fn long_mask(&self) -> u32 {
        ones(self.long_bits) as u32
    }

    #[inline]
    pub fn short_mask(&self) -> u32 {
        ones(self.short_bits) as u32
    }

    pub fn rounds(&self) -> std::ops::RangeInclusive<u8> {
        self.first_round..=self.last_round
    }

    pub(crate) fn check_word(&self, what: &'static str, value: u32) -> Result<()> {
        check_width(what, value as u64, self.word_bits)
    }

    pub(crate) fn check_half(&self, what: &'static str, value: u32) -> Result<()> {
        check_width(what, value as u64, self.half_bits())
    }
}

pub(crate) fn check_width(what: &'static str, value: u64, bits: u32) -> Result<()> {
    if value > ones(bits) {
        Err(Error::WidthMismatch { what, value, bits })
    } else {
        Ok(())
    }
}
