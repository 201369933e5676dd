//! S-box tables.
//!
//! S7 and S9 are transcribed from RFC 2994 and are pinned by the RFC test vectors in
//! `data/misty1_rfc2994.txt`. The toy boxes are power maps chosen so the
//! reduced cipher keeps the same bijective structure.

use std::sync::Arc;

use crate::error::{Error, Result};

/// MISTY1 S7 (RFC 2994).
pub const S7: [u16; 128] = [
    27, 50, 51, 90, 59, 16, 23, 84, 91, 26, 114, 115, 107, 44, 102, 73,
    31, 36, 19, 108, 55, 46, 63, 74, 93, 15, 64, 86, 37, 81, 28, 4,
    11, 70, 32, 13, 123, 53, 68, 66, 43, 30, 65, 20, 75, 121, 21, 111,
    14, 85, 9, 54, 116, 12, 103, 83, 40, 10, 126, 56, 2, 7, 96, 41,
    25, 18, 101, 47, 48, 57, 8, 104, 95, 120, 42, 76, 100, 69, 117, 61,
    89, 72, 3, 87, 124, 79, 98, 60, 29, 33, 94, 39, 106, 112, 77, 58,
    1, 109, 110, 99, 24, 119, 35, 5, 38, 118, 0, 49, 45, 122, 127, 97,
    80, 34, 17, 6, 71, 22, 82, 78, 113, 62, 105, 67, 52, 92, 88, 125,
];

/// MISTY1 S9 (RFC 2994).
pub const S9: [u16; 512] = [
    451, 203, 339, 415, 483, 233, 251, 53, 385, 185, 279, 491, 307, 9, 45, 211,
    199, 330, 55, 126, 235, 356, 403, 472, 163, 286, 85, 44, 29, 418, 355, 280,
    331, 338, 466, 15, 43, 48, 314, 229, 273, 312, 398, 99, 227, 200, 500, 27,
    1, 157, 248, 416, 365, 499, 28, 326, 125, 209, 130, 490, 387, 301, 244, 414,
    467, 221, 482, 296, 480, 236, 89, 145, 17, 303, 38, 220, 176, 396, 271, 503,
    231, 364, 182, 249, 216, 337, 257, 332, 259, 184, 340, 299, 430, 23, 113, 12,
    71, 88, 127, 420, 308, 297, 132, 349, 413, 434, 419, 72, 124, 81, 458, 35,
    317, 423, 357, 59, 66, 218, 402, 206, 193, 107, 159, 497, 300, 388, 250, 406,
    481, 361, 381, 49, 384, 266, 148, 474, 390, 318, 284, 96, 373, 463, 103, 281,
    101, 104, 153, 336, 8, 7, 380, 183, 36, 25, 222, 295, 219, 228, 425, 82,
    265, 144, 412, 449, 40, 435, 309, 362, 374, 223, 485, 392, 197, 366, 478, 433,
    195, 479, 54, 238, 494, 240, 147, 73, 154, 438, 105, 129, 293, 11, 94, 180,
    329, 455, 372, 62, 315, 439, 142, 454, 174, 16, 149, 495, 78, 242, 509, 133,
    253, 246, 160, 367, 131, 138, 342, 155, 316, 263, 359, 152, 464, 489, 3, 510,
    189, 290, 137, 210, 399, 18, 51, 106, 322, 237, 368, 283, 226, 335, 344, 305,
    327, 93, 275, 461, 121, 353, 421, 377, 158, 436, 204, 34, 306, 26, 232, 4,
    391, 493, 407, 57, 447, 471, 39, 395, 198, 156, 208, 334, 108, 52, 498, 110,
    202, 37, 186, 401, 254, 19, 262, 47, 429, 370, 475, 192, 267, 470, 245, 492,
    269, 118, 276, 427, 117, 268, 484, 345, 84, 287, 75, 196, 446, 247, 41, 164,
    14, 496, 119, 77, 378, 134, 139, 179, 369, 191, 270, 260, 151, 347, 352, 360,
    215, 187, 102, 462, 252, 146, 453, 111, 22, 74, 161, 313, 175, 241, 400, 10,
    426, 323, 379, 86, 397, 358, 212, 507, 333, 404, 410, 135, 504, 291, 167, 440,
    321, 60, 505, 320, 42, 341, 282, 417, 408, 213, 294, 431, 97, 302, 343, 476,
    114, 394, 170, 150, 277, 239, 69, 123, 141, 325, 83, 95, 376, 178, 46, 32,
    469, 63, 457, 487, 428, 68, 56, 20, 177, 363, 171, 181, 90, 386, 456, 468,
    24, 375, 100, 207, 109, 256, 409, 304, 346, 5, 288, 443, 445, 224, 79, 214,
    319, 452, 298, 21, 6, 255, 411, 166, 67, 136, 80, 351, 488, 289, 115, 382,
    188, 194, 201, 371, 393, 501, 116, 460, 486, 424, 405, 31, 65, 13, 442, 50,
    61, 465, 128, 168, 87, 441, 354, 328, 217, 261, 98, 122, 33, 511, 274, 264,
    448, 169, 285, 432, 422, 205, 243, 92, 258, 91, 473, 324, 502, 173, 165, 58,
    459, 310, 383, 70, 225, 30, 477, 230, 311, 506, 389, 140, 143, 64, 437, 190,
    120, 0, 172, 272, 350, 292, 2, 444, 162, 234, 112, 508, 278, 348, 76, 450,
];

/// A bijective lookup table together with its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sbox {
    bits: u32,
    forward: Vec<u16>,
    inverse: Vec<u16>,
}

impl Sbox {
    /// Builds an S-box from a forward table, rejecting non-permutations.
    pub fn new(table: &[u16]) -> Result<Self> {
        let len = table.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(Error::SboxNotBijective { len });
        }
        let mut inverse = vec![u16::MAX; len];
        for (x, &y) in table.iter().enumerate() {
            let y = y as usize;
            if y >= len || inverse[y] != u16::MAX {
                return Err(Error::SboxNotBijective { len });
            }
            inverse[y] = x as u16;
        }
        Ok(Sbox {
            bits: len.trailing_zeros(),
            forward: table.to_vec(),
            inverse,
        })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.forward[x as usize] as u32
    }

    #[inline]
    pub fn invert(&self, y: u32) -> u32 {
        self.inverse[y as usize] as u32
    }

    pub fn table(&self) -> &[u16] {
        &self.forward
    }
}

/// Forward table of `x -> x^e` over GF(2^n) with the given reduction polynomial
/// (including the leading term, e.g. `0b1011` for `x^3 + x + 1`).
pub fn power_map(n: u32, poly: u32, e: u32) -> Vec<u16> {
    let mul = |a: u32, b: u32| -> u32 {
        let (mut a, mut b, mut acc) = (a, b, 0u32);
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a >> n & 1 == 1 {
                a ^= poly;
            }
        }
        acc
    };
    (0..1u32 << n)
        .map(|x| {
            let mut r = 1u32;
            for _ in 0..e {
                r = mul(r, x);
            }
            if x == 0 {
                0
            } else {
                r as u16
            }
        })
        .collect()
}

pub(crate) fn misty_boxes() -> (Arc<Sbox>, Arc<Sbox>) {
    (
        Arc::new(Sbox::new(&S9).expect("S9 is a permutation")),
        Arc::new(Sbox::new(&S7).expect("S7 is a permutation")),
    )
}

/// Toy boxes: cube map over GF(2^3) (modulus x^3 + x + 1) for the long half,
/// identity for the one-bit short half.
pub(crate) fn toy_boxes() -> (Arc<Sbox>, Arc<Sbox>) {
    let long = power_map(3, 0b1011, 3);
    (
        Arc::new(Sbox::new(&long).expect("cube map is bijective on GF(8)")),
        Arc::new(Sbox::new(&[0, 1]).expect("identity")),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_ddt(t: &[u16]) -> usize {
        let n = t.len();
        let mut best = 0;
        for a in 1..n {
            let mut cnt = vec![0usize; n];
            for x in 0..n {
                cnt[(t[x] ^ t[x ^ a]) as usize] += 1;
            }
            best = best.max(*cnt.iter().max().unwrap());
        }
        best
    }

    fn algebraic_degree(t: &[u16], out_bit: u32) -> u32 {
        let n = t.len();
        let mut anf: Vec<u8> = t.iter().map(|&y| (y >> out_bit & 1) as u8).collect();
        let mut step = 1;
        while step < n {
            for x in 0..n {
                if x & step != 0 {
                    anf[x] ^= anf[x ^ step];
                }
            }
            step <<= 1;
        }
        (0..n).filter(|&x| anf[x] == 1).map(|x| x.count_ones()).max().unwrap_or(0)
    }

    #[test]
    fn misty_tables_are_apn_permutations() {
        assert!(Sbox::new(&S7).is_ok());
        assert!(Sbox::new(&S9).is_ok());
        assert_eq!(max_ddt(&S7), 2);
        assert_eq!(max_ddt(&S9), 2);
    }

    #[test]
    fn misty_table_degrees() {
        for b in 0..7 {
            assert_eq!(algebraic_degree(&S7, b), 3);
        }
        for b in 0..9 {
            assert_eq!(algebraic_degree(&S9, b), 2);
        }
    }

    #[test]
    fn toy_power_map_is_cube() {
        let t = power_map(3, 0b1011, 3);
        assert!(Sbox::new(&t).is_ok());
        // 2 = x, x^3 = x + 1 = 3
        assert_eq!(t[2], 3);
        assert_eq!(t[1], 1);
    }

    #[test]
    fn rejects_non_permutation() {
        assert!(matches!(
            Sbox::new(&[0, 0, 1, 2]),
            Err(Error::SboxNotBijective { len: 4 })
        ));
        let inv = Sbox::new(&S7).unwrap();
        for x in 0..128 {
            assert_eq!(inv.invert(inv.apply(x)), x);
        }
    }
}
