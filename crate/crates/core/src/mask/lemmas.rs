//! Exhaustive and sampled checks of the mask-propagation rules.
//!
//! Each check returns a [`Verdict`] with the first counterexample found.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{correlation_wht, fl_bar};
use crate::bits::{dot, field, ones, positions};
use crate::cipher::{CipherParams, FlKey, FoKey};
use crate::report::Verdict;

const MODULE: &str = "mask-calculus";

/// The four elementary operations whose mask propagation is characterised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lemma1Op {
    /// `(x1, x2) -> x1 ⊕ x2`
    Xor,
    /// `x -> (x, x)`
    Branch,
    /// `x -> x ∨ M`
    Or,
    /// `x -> x ∧ M`
    And,
}

impl Lemma1Op {
    pub const ALL: [Lemma1Op; 4] = [Lemma1Op::Xor, Lemma1Op::Branch, Lemma1Op::Or, Lemma1Op::And];

    fn uses_m(self) -> bool {
        matches!(self, Lemma1Op::Or | Lemma1Op::And)
    }
}

/// Checks that the nonzero-correlation support of `op` at `width` bits with
/// constant `m` is exactly the predicted one. With `inject_fault` the OR rule
/// is deliberately replaced by the AND rule, which must then fail.
pub fn check_lemma1(width: u32, op: Lemma1Op, m: u64, inject_fault: bool) -> Verdict {
    let w = width;
    let wm = ones(w);
    let mut v = Verdict::new(MODULE, "check_lemma1", json!({ "width": w, "op": op, "m": m, "inject_fault": inject_fault }));
    let (in_bits, out_bits) = match op {
        Lemma1Op::Xor => (2 * w, w),
        Lemma1Op::Branch => (w, 2 * w),
        Lemma1Op::Or | Lemma1Op::And => (w, w),
    };
    let f = |x: u64| -> u64 {
        match op {
            Lemma1Op::Xor => (x >> w) ^ (x & wm),
            Lemma1Op::Branch => x << w | x,
            Lemma1Op::Or => x | m,
            Lemma1Op::And => x & m,
        }
    };
    let predicted = |alpha: u64, beta: u64| -> bool {
        match op {
            Lemma1Op::Xor => alpha >> w == beta && alpha & wm == beta,
            Lemma1Op::Branch => alpha == (beta >> w) ^ (beta & wm),
            Lemma1Op::Or if inject_fault => alpha == m & beta,
            Lemma1Op::Or => alpha == !m & beta & wm,
            Lemma1Op::And => alpha == m & beta,
        }
    };
    let bad = (0..1u64 << out_bits).into_par_iter().find_map_first(|beta| {
        let spectrum = correlation_wht(in_bits, f, beta).expect("lemma widths are small");
        spectrum.iter().enumerate().find_map(|(alpha, &c)| {
            ((c != 0) != predicted(alpha as u64, beta)).then_some((alpha, beta, c))
        })
    });
    if let Some((alpha, beta, c)) = bad {
        v.fail(json!({ "alpha": alpha, "beta": beta, "numerator": c, "log2_domain": in_bits }));
    }
    v
}

/// Runs [`check_lemma1`] for every operation, every width in `widths` and,
/// for OR/AND, every constant `M`. One verdict per (width, operation).
pub fn lemma1_suite(widths: impl IntoIterator<Item = u32>, inject_fault: bool) -> Vec<Verdict> {
    let mut out = Vec::new();
    for w in widths {
        for op in Lemma1Op::ALL {
            let ms: Vec<u64> = if op.uses_m() { (0..1u64 << w).collect() } else { vec![0] };
            let mut agg = Verdict::new(MODULE, "check_lemma1", json!({ "width": w, "op": op, "all_m": op.uses_m(), "inject_fault": inject_fault }));
            for m in ms {
                let v = check_lemma1(w, op, m, inject_fault);
                if !v.pass {
                    let mut ce = v.counterexample.unwrap();
                    ce["m"] = json!(m);
                    agg.fail(ce);
                    break;
                }
            }
            out.push(agg);
        }
    }
    out
}

/// At any width: for random `(β, β', KL)` the parity
/// `(β, β')·FL(x) ⊕ FL̄(β, β')·x` is constant over sampled `x`.
pub fn check_lemma2_sampled(params: &CipherParams, trials: usize, samples: usize, seed: u64) -> Verdict {
    let mut v = Verdict::new(MODULE, "check_lemma2", json!({ "variant": params.variant, "mode": "sampled", "trials": trials, "samples": samples }))
        .seed(seed);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (hm, wm) = (params.half_mask(), params.word_mask());
    for _ in 0..trials {
        let out = rng.random::<u32>() & hm;
        let key = FlKey { kl1: rng.random::<u32>() & wm, kl2: rng.random::<u32>() & wm };
        let inp = fl_bar(params, out, &key);
        let parity = |x: u32| dot(out as u64, params.fl(x, &key) as u64) ^ dot(inp as u64, x as u64);
        let x0 = rng.random::<u32>() & hm;
        let reference = parity(x0);
        for _ in 0..samples {
            let x = rng.random::<u32>() & hm;
            if parity(x) != reference {
                v.fail(json!({ "out_mask": out, "kl1": key.kl1, "kl2": key.kl2, "x": x }));
                return v;
            }
        }
    }
    v
}

/// Exhaustive at small width: for every key and output mask, the matched input
/// mask has correlation ±1 and every other input mask correlation exactly 0.
pub fn check_lemma2_exhaustive(params: &CipherParams) -> Verdict {
    let mut v = Verdict::new(MODULE, "check_lemma2", json!({ "variant": params.variant, "mode": "exhaustive" }));
    let h = params.half_bits();
    if h > 12 {
        v.fail(json!({ "error": "half-block too wide for exhaustive FL check" }));
        return v;
    }
    let wm = params.word_mask();
    let full = 1i64 << h;
    let bad = (0..=wm).into_par_iter().find_map_first(|kl1| {
        for kl2 in 0..=wm {
            let key = FlKey { kl1, kl2 };
            for out in 0..1u32 << h {
                let spectrum = correlation_wht(h, |x| params.fl(x as u32, &key) as u64, out as u64).unwrap();
                let matched = fl_bar(params, out, &key) as usize;
                for (alpha, &c) in spectrum.iter().enumerate() {
                    let ok = if alpha == matched { c.abs() == full } else { c == 0 };
                    if !ok {
                        return Some(json!({ "kl1": kl1, "kl2": kl2, "out_mask": out, "alpha": alpha, "numerator": c }));
                    }
                }
            }
        }
        None
    });
    if let Some(ce) = bad {
        v.fail(ce);
    }
    v
}

/// FI is a bijection for `ki`, and the zero output mask only correlates with
/// the zero input mask.
pub fn check_lemma3(params: &CipherParams, ki: u32) -> Verdict {
    let mut v = Verdict::new(MODULE, "check_lemma3", json!({ "variant": params.variant, "ki": ki }));
    let w = params.word_bits;
    let mut seen = vec![false; 1 << w];
    for x in 0..1u32 << w {
        let y = params.fi(x, ki) as usize;
        if seen[y] {
            v.fail(json!({ "collision_output": y }));
            return v;
        }
        seen[y] = true;
    }
    let spectrum = correlation_wht(w, |x| params.fi(x as u32, ki) as u64, 0).unwrap();
    if spectrum[0] != 1 << w {
        v.fail(json!({ "alpha": 0, "numerator": spectrum[0] }));
    }
    if let Some(alpha) = (1..spectrum.len()).find(|&a| spectrum[a] != 0) {
        v.fail(json!({ "alpha": alpha, "numerator": spectrum[alpha] }));
    }
    v
}

/// Checks `β·FI(x, KI) ⊕ β_s·KI[start .. start+s]` is constant over all KI
/// for each sampled `x`, with `β` supported on the top `s` output bits.
fn observation1_holds(params: &CipherParams, beta_s: u32, xs: &[u32], key_start: u32) -> Option<(u32, u32)> {
    let (w, s, l) = (params.word_bits, params.short_bits, params.long_bits);
    let beta = (beta_s << l) as u64;
    xs.iter().find_map(|&x| {
        let residual = |ki: u32| dot(beta, params.fi(x, ki) as u64) ^ dot(beta_s as u64, field(ki as u64, w, key_start, s));
        let r0 = residual(0);
        (1..1u32 << w).find(|&ki| residual(ki) != r0).map(|ki| (x, ki))
    })
}

/// Key-bit positions that influence `β·FI(x, KI)` for some sampled `x` and KI.
fn observation1_positions(params: &CipherParams, beta_s: u32, xs: &[u32]) -> u64 {
    let (w, l) = (params.word_bits, params.long_bits);
    let beta = (beta_s << l) as u64;
    let mut found = 0u64;
    for j in 0..w {
        let flip = 1u32 << (w - 1 - j);
        let depends = xs.iter().any(|&x| {
            (0..1u32 << w).any(|ki| dot(beta, params.fi(x, ki) as u64) != dot(beta, params.fi(x, ki ^ flip) as u64))
        });
        if depends {
            found |= 1 << (w - 1 - j);
        }
    }
    found
}

/// For every nonzero short-side mask `β_s`, checks the FI output parity splits
/// into a KI-independent term and `β_s·KI[0..s]`. Also reports the key bits
/// found to matter and whether the alternative `KI[l-s..l]` reading holds.
pub fn check_observation1(params: &CipherParams, samples: usize, seed: u64) -> Verdict {
    let (w, s, l) = (params.word_bits, params.short_bits, params.long_bits);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let xs: Vec<u32> = (0..samples).map(|_| rng.random::<u32>() & params.word_mask()).collect();
    let mut v = Verdict::new(MODULE, "check_observation1", json!({ "variant": params.variant, "samples": samples })).seed(seed);
    let betas: Vec<u32> = (1..1u32 << s).collect();
    let failures: Vec<_> = betas
        .par_iter()
        .filter_map(|&b| observation1_holds(params, b, &xs, 0).map(|(x, ki)| (b, x, ki)))
        .collect();
    if let Some(&(b, x, ki)) = failures.first() {
        v.fail(json!({ "beta": b, "x": x, "ki": ki }));
    }
    let alt_start = l - s;
    let alternative_holds = alt_start != 0 && betas.par_iter().all(|&b| observation1_holds(params, b, &xs, alt_start).is_none());
    let full = ones(s) as u32;
    let identified = observation1_positions(params, full, &xs);
    v.details(json!({
        "designated_key_bits": positions(ones(s) << (w - s), w),
        "identified_key_bits": positions(identified, w),
        "alternative_key_bits": positions(ones(s) << (w - l), w),
        "alternative_holds": alternative_holds,
    }))
}

/// Outcome of one [`observation2_case`] run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Observation2Case {
    /// Residual with `β·(KI2 ⊕ KO4) ⊕ β'·(KI2 ⊕ KI3)` removed is constant.
    pub derived_holds: bool,
    /// Residual with `β·(KI3 ⊕ KI2 ⊕ KO4) ⊕ β·KI2` removed is constant.
    pub literal_holds: bool,
}

/// Enumerates the top `s` bits of `KI_2`, `KI_3` and `KO_4` for one input and
/// one base key, with masks `β || 0` and `β' || 0` on the two FO output words.
pub fn observation2_case(params: &CipherParams, beta_s: u32, betap_s: u32, x: u32, base: &FoKey) -> Observation2Case {
    let (w, s, l) = (params.word_bits, params.short_bits, params.long_bits);
    let low = params.long_mask();
    let mask = ((beta_s << l) << w | (betap_s << l)) as u64;
    let top = |k: u32| k >> l;
    let mut derived = None;
    let mut literal = None;
    let (mut derived_holds, mut literal_holds) = (true, true);
    for bits in 0..1u32 << (3 * s) {
        let (a, b, c) = (bits >> (2 * s), bits >> s & params.short_mask(), bits & params.short_mask());
        let mut key = *base;
        key.ki[1] = a << l | (base.ki[1] & low);
        key.ki[2] = b << l | (base.ki[2] & low);
        key.ko[3] = c << l | (base.ko[3] & low);
        let par = dot(mask, params.fo(x, &key) as u64);
        let (ki2, ki3, ko4) = (top(key.ki[1]), top(key.ki[2]), top(key.ko[3]));
        let d = par ^ dot(beta_s as u64, (ki2 ^ ko4) as u64) ^ dot(betap_s as u64, (ki2 ^ ki3) as u64);
        let lit = par ^ dot(beta_s as u64, (ki3 ^ ki2 ^ ko4) as u64) ^ dot(beta_s as u64, ki2 as u64);
        derived_holds &= *derived.get_or_insert(d) == d;
        literal_holds &= *literal.get_or_insert(lit) == lit;
    }
    Observation2Case { derived_holds, literal_holds }
}

/// Observation 2 over `pairs` random mask pairs and `samples` inputs each,
/// with random base keys. Passes when the derived decomposition always holds;
/// the literal formula's behaviour is reported alongside.
pub fn check_observation2(params: &CipherParams, pairs: usize, samples: usize, seed: u64) -> Verdict {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut v = Verdict::new(MODULE, "check_observation2", json!({ "variant": params.variant, "mask_pairs": pairs, "samples": samples })).seed(seed);
    let (sm, wm, hm) = (params.short_mask(), params.word_mask(), params.half_mask());
    let mut cases = Vec::new();
    for i in 0..pairs {
        // Always include a single-bit β with β' = 0 and an equal pair.
        let (b, bp) = match i {
            0 => (1 << (params.short_bits - 1), 0),
            1 => (sm, sm),
            _ => loop {
                let (b, bp) = (rng.random::<u32>() & sm, rng.random::<u32>() & sm);
                if b | bp != 0 {
                    break (b, bp);
                }
            },
        };
        for _ in 0..samples {
            let x = rng.random::<u32>() & hm;
            let base = FoKey {
                ko: std::array::from_fn(|_| rng.random::<u32>() & wm),
                ki: std::array::from_fn(|_| rng.random::<u32>() & wm),
            };
            cases.push((b, bp, x, base));
        }
    }
    let results: Vec<_> = cases
        .par_iter()
        .map(|&(b, bp, x, base)| (b, bp, x, observation2_case(params, b, bp, x, &base)))
        .collect();
    let mut literal_fail_unequal = 0usize;
    let mut literal_fail_equal = 0usize;
    for &(b, bp, x, r) in &results {
        if !r.derived_holds {
            v.fail(json!({ "beta": b, "beta_prime": bp, "x": x }));
        }
        if !r.literal_holds {
            if b == bp {
                literal_fail_equal += 1;
            } else {
                literal_fail_unequal += 1;
            }
        }
    }
    let unequal = results.iter().filter(|r| r.0 != r.1).count();
    v.details(json!({
        "derived_term": "beta.(KI2 ^ KO4) ^ beta'.(KI2 ^ KI3)",
        "literal_term": "beta.(KI3 ^ KI2 ^ KO4) ^ beta.KI2",
        "literal_failures_with_beta_ne_beta_prime": literal_fail_unequal,
        "cases_with_beta_ne_beta_prime": unequal,
        "literal_failures_with_beta_eq_beta_prime": literal_fail_equal,
    }))
}

/// Everything above; Lemma 1 over `widths`, the rest at default sizes.
pub fn lemma_suite(
    params_real: &CipherParams,
    params_toy: &CipherParams,
    widths: impl IntoIterator<Item = u32>,
    seed: u64,
    inject_fault: bool,
) -> Vec<Verdict> {
    let mut out = lemma1_suite(widths, inject_fault);
    out.push(check_lemma2_sampled(params_real, 64, 1 << 12, seed));
    out.push(check_lemma2_exhaustive(params_toy));
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x4c33);
    for _ in 0..8 {
        out.push(check_lemma3(params_real, rng.random::<u32>() & params_real.word_mask()));
    }
    for ki in 0..=params_toy.word_mask() {
        out.push(check_lemma3(params_toy, ki));
    }
    out.push(check_observation1(params_real, 8, seed));
    out.push(check_observation1(params_toy, 8, seed));
    out.push(check_observation2(params_real, 3, 8, seed));
    out.push(check_observation2(params_toy, 4, 16, seed));
    out
}
