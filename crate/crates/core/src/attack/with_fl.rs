//! Rounds 2..=8 with FL layers 3..=10: one FO round in front of the
//! distinguisher, FL_9/FL_10 and one FO round behind it.
//!
//! Stage formulas are derived from the cipher equations; key terms that only
//! XOR a constant into `z` (for instance `KO_{2,4}`, `KI_{2,2}[0-6]`) are
//! dropped, which relabels counter cells but leaves `T` unchanged.

use super::keys::{range_name, FragmentSpec};
use super::layout::{Fields, StageLayout};
use super::{fi_short, StageSpec};
use crate::cipher::{ciphertext_state, plaintext_state, CipherParams, FlKey, FoKey};
use crate::mask::fl_bar_chain;
use crate::bits::dot;
use crate::distinguisher::{InvolvedSubkeys, Support};
use crate::error::Result;

use super::keys::KeyGuess;

pub(super) fn stage0(p: &CipherParams) -> StageLayout {
    let (w, s) = (p.word_bits, p.short_bits);
    StageLayout::new(&[
        ("L1l", w),
        ("L1r", w),
        ("R1l_s", s),
        ("R1r_s", s),
        ("R8l", w),
        ("R8r", w),
        ("L8l_s", s),
        ("L8r_s", s),
    ])
}

pub(super) fn initial(p: &CipherParams, pt: u64, ct: u64) -> Fields {
    let (w, l) = (p.word_bits, p.long_bits);
    let wm = p.word_mask();
    let (l1, r1) = plaintext_state(p, pt);
    let (l8, r8) = ciphertext_state(p, ct);
    let top = |v: u32| (v >> l) as u64;
    [
        (l1 >> w) as u64,
        (l1 & wm) as u64,
        top(r1 >> w),
        top(r1 & wm),
        (r8 >> w) as u64,
        (r8 & wm) as u64,
        top(l8 >> w),
        top(l8 & wm),
    ]
}

fn fold1(p: &CipherParams, f: &Fields, k: &[u64]) -> Fields {
    let (k2, kp7, k1) = (k[0] as u32, k[1] as u32, k[2] as u32);
    let l = p.long_bits;
    let [l1l, l1r, r1l_s, r1r_s, r8l, r8r, l8l_s, l8r_s] = f.map(|v| v as u32);
    let xi3 = p.fi(l1l ^ k2, kp7) ^ l1r;
    let y3 = r1l_s ^ (xi3 >> l);
    let y4 = r1r_s ^ (xi3 >> l) ^ fi_short(p, xi3 ^ k1);
    let l7l = r8l ^ (r8r | k1);
    let l7r = r8r ^ (l7l & kp7);
    let y6 = l8l_s ^ (l7r >> l) ^ fi_short(p, l7r ^ k2);
    [l1r, l8r_s, y3, y4, l7l, y6, 0, 0].map(u64::from)
}

fn fold2(_p: &CipherParams, f: &Fields, k: &[u64]) -> Fields {
    let [l1r, l8r_s, y3, y4, l7l, y6, ..] = *f;
    [l1r, y3, y4, l7l, y6 ^ (l8r_s | k[0]), 0, 0, 0]
}

fn fold3(p: &CipherParams, f: &Fields, k: &[u64]) -> Fields {
    let [l1r, y3, y4, l7l, y5, ..] = *f;
    let s = p.short_bits;
    let sm = p.short_mask() as u64;
    let t = p.sbox_long.apply(((l7l >> s) ^ k[0]) as u32) as u64 & sm;
    [l1r, y3, y4, l7l & sm, y5 ^ t, 0, 0, 0]
}

fn fold4(p: &CipherParams, f: &Fields, k: &[u64]) -> Fields {
    let [l1r, y3, y4, l7l_lo, acc, ..] = *f;
    let u = l7l_lo ^ k[0];
    let b = acc ^ u ^ p.sbox_short.apply(u as u32) as u64;
    [l1r, y3, y4, b, 0, 0, 0, 0]
}

fn fold5(p: &CipherParams, f: &Fields, k: &[u64]) -> Fields {
    let [l1r, y3, y4, b, ..] = *f;
    let s = p.short_bits;
    let sm = p.short_mask() as u64;
    let t = p.sbox_long.apply(((l1r >> s) ^ k[0]) as u32) as u64 & sm;
    [l1r & sm, y3 ^ t, y4 ^ t, b, 0, 0, 0, 0]
}

fn fold6(p: &CipherParams, f: &Fields, k: &[u64]) -> Fields {
    let [l1r_lo, y3, y4, b, ..] = *f;
    let u = l1r_lo ^ k[0];
    let t = u ^ p.sbox_short.apply(u as u32) as u64;
    [y3 ^ t, y4 ^ t, b, 0, 0, 0, 0, 0]
}

pub(super) fn stages(p: &CipherParams) -> Vec<StageSpec> {
    let (w, l, s) = (p.word_bits, p.long_bits, p.short_bits);
    let s0 = stage0(p);
    let s1 = StageLayout::new(&[("L1r", w), ("L8r_s", s), ("y3", s), ("y4", s), ("L7l", w), ("y6", s)]);
    let s2 = StageLayout::new(&[("L1r", w), ("y3", s), ("y4", s), ("L7l", w), ("y5", s)]);
    let s3 = StageLayout::new(&[("L1r", w), ("y3", s), ("y4", s), ("L7l_lo", s), ("acc", s)]);
    let s4 = StageLayout::new(&[("L1r", w), ("y3", s), ("y4", s), ("B", s)]);
    let s5 = StageLayout::new(&[("L1r_lo", s), ("y3", s), ("y4", s), ("B", s)]);
    let s6 = StageLayout::new(&[("A_l", s), ("A_r", s), ("B", s)]);
    let f = |n: &str, b: u32| FragmentSpec::new(n, b);
    vec![
        StageSpec::new(2, s0, s1.clone(), vec![f("K2", w), f("K'7", w), f("K1", w)], fold1),
        StageSpec::new(3, s1, s2.clone(), vec![f(&range_name("K'3", 0, s), s)], fold2),
        StageSpec::new(4, s2, s3.clone(), vec![f(&range_name("K8", 0, l), l)], fold3),
        StageSpec::new(5, s3, s4.clone(), vec![f(&range_name("K8", l, s), s)], fold4),
        StageSpec::new(6, s4, s5.clone(), vec![f(&range_name("K4", 0, l), l)], fold5),
        StageSpec::new(7, s5, s6, vec![f(&range_name("K4", l, s), s)], fold6),
    ]
}

/// The fragment guessed after the last fold (`K'3[7-15]` for MISTY1).
pub(super) fn final_fragments(p: &CipherParams) -> Vec<FragmentSpec> {
    vec![FragmentSpec::new(range_name("K'3", p.short_bits, p.long_bits), p.long_bits)]
}

/// Assembles full words `K8`, `K4`, `K'3` from their guessed pieces.
pub(super) fn assemble(p: &CipherParams, g: &KeyGuess) -> Result<KeyGuess> {
    let (w, l, s) = (p.word_bits, p.long_bits, p.short_bits);
    let k8 = g.get(&range_name("K8", 0, l))? << s | g.get(&range_name("K8", l, s))?;
    let k4 = g.get(&range_name("K4", 0, l))? << s | g.get(&range_name("K4", l, s))?;
    let kp3 = g.get(&range_name("K'3", 0, s))? << l | g.get(&range_name("K'3", s, l))?;
    g.clone()
        .with(FragmentSpec::new("K8", w), k8)?
        .with(FragmentSpec::new("K4", w), k4)?
        .with(FragmentSpec::new("K'3", w), kp3)
}

/// Round keys the direct oracle uses: guessed words where they matter, zero
/// for the words that only shift `z` by a constant.
pub(super) struct OracleKeys {
    pub fo2: FoKey,
    pub fo8: FoKey,
    pub fl9: FlKey,
    pub fl10: FlKey,
    pub kl3: FlKey,
    pub kl5: FlKey,
    pub kl7: FlKey,
}

impl OracleKeys {
    pub fn from_guess(g: &KeyGuess) -> Result<Self> {
        let v = |n: &str| g.get(n).map(|x| x as u32);
        let (k1, k2, k3, k4, k8) = (v("K1")?, v("K2")?, v("K3")?, v("K4")?, v("K8")?);
        let (kp1, kp2, kp3, kp7, kp8) = (v("K'1")?, v("K'2")?, v("K'3")?, v("K'7")?, v("K'8")?);
        Ok(OracleKeys {
            fo2: FoKey { ko: [k2, k4, k1, 0], ki: [kp7, 0, 0] },
            fo8: FoKey { ko: [k8, k2, 0, 0], ki: [0, 0, 0] },
            fl9: FlKey { kl1: 0, kl2: kp3 },
            fl10: FlKey { kl1: kp7, kl2: k1 },
            kl3: FlKey { kl1: k2, kl2: kp8 },
            kl5: FlKey { kl1: k3, kl2: kp1 },
            kl7: FlKey { kl1: k4, kl2: kp2 },
        })
    }
}

/// `z` for one pair straight from FO/FL and the FL̄ chain.
pub(super) fn oracle_z(p: &CipherParams, keys: &OracleKeys, pt: u64, ct: u64) -> usize {
    let (l1, r1) = plaintext_state(p, pt);
    let (l8, r8) = ciphertext_state(p, ct);
    let l2 = p.fo(l1, &keys.fo2) ^ r1;
    let l7 = p.fl_inv(r8, &keys.fl10);
    let r7 = p.fl_inv(l8, &keys.fl9) ^ p.fo(l7, &keys.fo8);
    let s = p.short_bits;
    let mut z = 0usize;
    for i in 0..s {
        let beta = Support::Narrow.place(p, 1 << (s - 1 - i));
        let alpha = fl_bar_chain(p, beta, &keys.kl3, &keys.kl5, &keys.kl7);
        let bit = dot(alpha as u64, l2 as u64) ^ dot(beta as u64, r7 as u64);
        z = z << 1 | bit as usize;
    }
    z
}

/// The T1 index for fragment values in guessing order, without building a
/// `KeyGuess`. Used on the exhaustive path.
pub(super) fn involved_from_values(p: &CipherParams, v: &[u64]) -> InvolvedSubkeys {
    let (l, s) = (p.long_bits, p.short_bits);
    let w = |x: u64| x as u32;
    let (k2, k1) = (w(v[0]), w(v[2]));
    let k8 = w(v[4] << s | v[5]);
    let k4 = w(v[6] << s | v[7]);
    let kp3 = w(v[3] << l | v[8]);
    let k3 = p.fi_inv(kp3, k4);
    InvolvedSubkeys {
        k2: k2 >> l,
        k3: k3 >> l,
        k4: k4 >> l,
        kp8: p.fi(k8, k1) >> l,
        kp1: p.fi(k1, k2) >> l,
        kp2: p.fi(k2, k3) >> l,
    }
}
