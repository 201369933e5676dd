//! Rounds 2..=8 without FL layers: one FO round on each side of the
//! distinguisher `(β, 0) -> (0, β)` over rounds 3..=7.
//!
//! The data-dependent parity is `β·top(R1l ⊕ L1r ⊕ L8l ⊕ R8r)` plus four FI
//! contributions: `FI(L1l ⊕ K2)`, `FI(L1r ⊕ K4)` from round 2 and
//! `FI(R8l ⊕ K8)`, `FI(R8r ⊕ K2)` from round 8. When the support covers the
//! whole word, the long-branch bits of `KI_{2,1}, KI_{2,2}, KI_{8,1}, KI_{8,2}`
//! (`K'7, K'3, K'5, K'1`) enter nonlinearly and are guessed with the FO keys.

use super::keys::{range_name, FragmentSpec, KeyGuess};
use super::layout::{Fields, StageLayout};
use super::StageSpec;
use crate::bits::dot;
use crate::cipher::{ciphertext_state, plaintext_state, CipherParams, FoKey};
use crate::distinguisher::Support;
use crate::error::Result;

fn width(p: &CipherParams, support: Support) -> u32 {
    support.width(p)
}

/// Top `u` bits of `FI(x, klo)`.
#[inline]
fn fi_top(p: &CipherParams, x: u32, klo: u32, u: u32) -> u64 {
    (p.fi(x, klo) >> (p.word_bits - u)) as u64
}

pub(super) fn stage0(p: &CipherParams, support: Support) -> StageLayout {
    let w = p.word_bits;
    StageLayout::new(&[("L1r", w), ("L1l", w), ("R8l", w), ("R8r", w), ("lin", width(p, support))])
}

pub(super) fn initial(p: &CipherParams, support: Support, pt: u64, ct: u64) -> Fields {
    let (w, wm) = (p.word_bits, p.word_mask());
    let u = width(p, support);
    let (l1, r1) = plaintext_state(p, pt);
    let (l8, r8) = ciphertext_state(p, ct);
    let lin = ((r1 >> w) ^ (l1 & wm) ^ (l8 >> w) ^ (r8 & wm)) >> (w - u);
    [(l1 & wm) as u64, (l1 >> w) as u64, (r8 >> w) as u64, (r8 & wm) as u64, lin as u64, 0, 0, 0]
}

fn key_lo(k: &[u64], i: usize) -> u32 {
    k.get(i).copied().unwrap_or(0) as u32
}

fn fold1_for(p: &CipherParams, f: &Fields, k: &[u64], u: u32) -> Fields {
    let [l1r, l1l, r8l, r8r, lin, ..] = *f;
    let k2 = k[0] as u32;
    let acc = lin ^ fi_top(p, l1l as u32 ^ k2, key_lo(k, 1), u) ^ fi_top(p, r8r as u32 ^ k2, key_lo(k, 2), u);
    [l1r, r8l, acc, 0, 0, 0, 0, 0]
}

fn fold2_for(p: &CipherParams, f: &Fields, k: &[u64], u: u32) -> Fields {
    let [l1r, r8l, acc, ..] = *f;
    [r8l, acc ^ fi_top(p, l1r as u32 ^ k[0] as u32, key_lo(k, 1), u), 0, 0, 0, 0, 0, 0]
}

fn fold3_for(p: &CipherParams, f: &Fields, k: &[u64], u: u32) -> Fields {
    let [r8l, acc, ..] = *f;
    [acc ^ fi_top(p, r8l as u32 ^ k[0] as u32, key_lo(k, 1), u), 0, 0, 0, 0, 0, 0, 0]
}

fn fold1_narrow(p: &CipherParams, f: &Fields, k: &[u64]) -> Fields {
    fold1_for(p, f, k, p.short_bits)
}
fn fold2_narrow(p: &CipherParams, f: &Fields, k: &[u64]) -> Fields {
    fold2_for(p, f, k, p.short_bits)
}
fn fold3_narrow(p: &CipherParams, f: &Fields, k: &[u64]) -> Fields {
    fold3_for(p, f, k, p.short_bits)
}
fn fold1_wide(p: &CipherParams, f: &Fields, k: &[u64]) -> Fields {
    fold1_for(p, f, k, p.word_bits)
}
fn fold2_wide(p: &CipherParams, f: &Fields, k: &[u64]) -> Fields {
    fold2_for(p, f, k, p.word_bits)
}
fn fold3_wide(p: &CipherParams, f: &Fields, k: &[u64]) -> Fields {
    fold3_for(p, f, k, p.word_bits)
}

pub(super) fn ki_lo_name(word: &str, p: &CipherParams) -> String {
    range_name(word, p.short_bits, p.long_bits)
}

pub(super) fn stages(p: &CipherParams, support: Support) -> Vec<StageSpec> {
    let (w, l) = (p.word_bits, p.long_bits);
    let u = width(p, support);
    let s0 = stage0(p, support);
    let s1 = StageLayout::new(&[("L1r", w), ("R8l", w), ("acc", u)]);
    let s2 = StageLayout::new(&[("R8l", w), ("acc", u)]);
    let s3 = StageLayout::new(&[("acc", u)]);
    let f = |n: &str, b: u32| FragmentSpec::new(n, b);
    let lo = |word: &str| f(&ki_lo_name(word, p), l);
    let (k1, k2, k3) = match support {
        Support::Narrow => (vec![f("K2", w)], vec![f("K4", w)], vec![f("K8", w)]),
        Support::Wide => (
            vec![f("K2", w), lo("K'7"), lo("K'1")],
            vec![f("K4", w), lo("K'3")],
            vec![f("K8", w), lo("K'5")],
        ),
    };
    let maps: [super::StageMap; 3] = match support {
        Support::Narrow => [fold1_narrow, fold2_narrow, fold3_narrow],
        Support::Wide => [fold1_wide, fold2_wide, fold3_wide],
    };
    vec![
        StageSpec::new(2, s0, s1.clone(), k1, maps[0]),
        StageSpec::new(3, s1, s2.clone(), k2, maps[1]),
        StageSpec::new(4, s2, s3, k3, maps[2]),
    ]
}

pub(super) struct OracleKeys {
    pub fo2: FoKey,
    pub fo8: FoKey,
}

impl OracleKeys {
    pub fn from_guess(p: &CipherParams, support: Support, g: &KeyGuess) -> Result<Self> {
        let v = |n: &str| g.get(n).map(|x| x as u32);
        let lo = |n: &str| -> Result<u32> {
            match support {
                Support::Narrow => Ok(0),
                Support::Wide => v(&ki_lo_name(n, p)),
            }
        };
        let (k2, k4, k8) = (v("K2")?, v("K4")?, v("K8")?);
        Ok(OracleKeys {
            fo2: FoKey { ko: [k2, k4, 0, 0], ki: [lo("K'7")?, lo("K'3")?, 0] },
            fo8: FoKey { ko: [k8, k2, 0, 0], ki: [lo("K'5")?, lo("K'1")?, 0] },
        })
    }
}

pub(super) fn oracle_z(p: &CipherParams, support: Support, keys: &OracleKeys, pt: u64, ct: u64) -> usize {
    let (l1, r1) = plaintext_state(p, pt);
    let (l8, r8) = ciphertext_state(p, ct);
    let l2 = p.fo(l1, &keys.fo2) ^ r1;
    let r7 = l8 ^ p.fo(r8, &keys.fo8);
    let u = width(p, support);
    let mut z = 0usize;
    for i in 0..u {
        let beta = support.place(p, 1 << (u - 1 - i)) as u64;
        z = z << 1 | (dot(beta, l2 as u64) ^ dot(beta, r7 as u64)) as usize;
    }
    z
}
