//! Bit-indexing helpers.
//!
//! Every mask, word and key in this crate uses MSB-first indexing: bit `0` of a
//! `w`-bit value is its most significant bit, so `z[i..j]` selects the bits
//! `i` through `j-1` counting from the top. Integers are stored in the usual
//! machine order; only indexing is flipped.

/// All-ones value of the given width.
#[inline]
pub const fn ones(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// Single-bit value with MSB-first `index` set inside a `width`-bit word.
#[inline]
pub const fn msb(width: u32, index: u32) -> u64 {
    1u64 << (width - 1 - index)
}

/// Extracts `len` bits starting at MSB-first position `start` of a `width`-bit value.
#[inline]
pub const fn field(value: u64, width: u32, start: u32, len: u32) -> u64 {
    (value >> (width - start - len)) & ones(len)
}

/// Reads bit `index` (MSB-first) of a `width`-bit value.
#[inline]
pub const fn bit(value: u64, width: u32, index: u32) -> u64 {
    (value >> (width - 1 - index)) & 1
}

/// XOR of all bits.
#[inline]
pub const fn parity(x: u64) -> u32 {
    x.count_ones() & 1
}

/// Scalar product `mask · value` over GF(2).
#[inline]
pub const fn dot(mask: u64, value: u64) -> u32 {
    parity(mask & value)
}

/// Same as [`dot`] for 128-bit operands.
#[inline]
pub const fn dot128(mask: u128, value: u128) -> u32 {
    (mask & value).count_ones() & 1
}

/// Renders the set MSB-first positions of a `width`-bit value as compact
/// ranges, e.g. `[0-6]` or `[0,3,9-15]`.
pub fn positions(value: u64, width: u32) -> String {
    let set: Vec<u32> = (0..width).filter(|&i| bit(value, width, i) == 1).collect();
    let mut parts = Vec::new();
    let mut i = 0;
    while i < set.len() {
        let mut j = i;
        while j + 1 < set.len() && set[j + 1] == set[j] + 1 {
            j += 1;
        }
        if j == i {
            parts.push(set[i].to_string());
        } else {
            parts.push(format!("{}-{}", set[i], set[j]));
        }
        i = j + 1;
    }
    format!("[{}]", parts.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn msb_first_indexing() {
        assert_eq!(msb(16, 0), 0x8000);
        assert_eq!(msb(16, 15), 0x0001);
        assert_eq!(field(0x1234, 16, 0, 4), 0x1);
        assert_eq!(field(0x1234, 16, 12, 4), 0x4);
        assert_eq!(field(0xfe00, 16, 0, 7), 0x7f);
        assert_eq!(bit(0x8000, 16, 0), 1);
    }

    #[test]
    fn position_ranges() {
        assert_eq!(positions(0xfe00, 16), "[0-6]");
        assert_eq!(positions(0x8001, 16), "[0,15]");
        assert_eq!(positions(0, 8), "[]");
    }
}
