//! Exact (full codebook) and sampled correlation of the approximations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::{build_zc_family_no_fl, build_zc_family_with_fl, Family, ZcApprox};
use crate::bits::{dot, ones};
use crate::cipher::{fl_layer_round, Cipher, CipherParams, FlKey, FlLayers, MasterKey, SubkeySchedule};
use crate::error::{Error, Result};
use crate::mask::Correlation;
use crate::report::Verdict;

const MODULE: &str = "zc-distinguisher";

/// The cipher restricted to the approximation's rounds: FL layers inside the
/// span are kept for the with-FL family, none for the other.
pub fn span_cipher(params: &CipherParams, approx: &ZcApprox, key: &MasterKey) -> Result<Cipher> {
    let (a, b) = approx.span;
    let layers = match approx.family {
        Family::WithFl => FlLayers::from_indices((1..=10).filter(|&l| (a..=b).contains(&fl_layer_round(l))))?,
        Family::NoFl => FlLayers::NONE,
    };
    Cipher::new(params.clone().with_rounds(a, b, layers)?, key)
}

/// All state transitions `(L, R) -> (L', R')` of a cipher on a 16-bit block,
/// packed as `L || R`.
#[derive(Debug, Clone)]
pub struct Codebook {
    half_bits: u32,
    outputs: Vec<u32>,
}

impl Codebook {
    pub fn new(cipher: &Cipher) -> Result<Self> {
        let p = cipher.params();
        let n = p.block_bits();
        if n > 16 {
            return Err(Error::ExactVerificationInfeasible(n));
        }
        let h = p.half_bits();
        let hm = p.half_mask();
        let outputs = (0..1u32 << n)
            .into_par_iter()
            .map(|x| {
                let (l, r) = cipher.encrypt_state(x >> h, x & hm);
                l << h | r
            })
            .collect();
        Ok(Codebook { half_bits: h, outputs })
    }

    /// Exact correlation of `α·in ⊕ β·out` over the whole codebook.
    pub fn correlation(&self, approx: &ZcApprox) -> Correlation {
        let h = self.half_bits;
        let alpha = (approx.input_mask.0 << h | approx.input_mask.1) as u64;
        let beta = (approx.output_mask.0 << h | approx.output_mask.1) as u64;
        let numerator = self
            .outputs
            .iter()
            .enumerate()
            .map(|(x, &y)| 1 - 2 * (dot(alpha, x as u64) ^ dot(beta, y as u64)) as i64)
            .sum();
        Correlation::Exact { numerator, log2_domain: 2 * h }
    }
}

/// Exact correlation of one approximation under one key (toy only).
pub fn exact_correlation(params: &CipherParams, approx: &ZcApprox, key: &MasterKey) -> Result<Correlation> {
    Ok(Codebook::new(&span_cipher(params, approx, key)?)?.correlation(approx))
}

/// Largest `|numerator|` of the exact correlation over the given keys.
pub fn verify_zero_correlation_exact(params: &CipherParams, approx: &ZcApprox, keys: &[MasterKey]) -> Result<i64> {
    if params.block_bits() > 16 {
        return Err(Error::ExactVerificationInfeasible(params.block_bits()));
    }
    let mut worst = 0;
    for k in keys {
        worst = worst.max(exact_correlation(params, approx, k)?.numerator().abs());
    }
    Ok(worst)
}

/// Sampled correlation from `samples` uniform input states.
pub fn estimate_correlation(
    params: &CipherParams,
    approx: &ZcApprox,
    key: &MasterKey,
    samples: u64,
    seed: u64,
) -> Result<Correlation> {
    if samples < 1 << 16 {
        return Err(Error::InvalidParameter(format!("{samples} samples; at least 2^16 required")));
    }
    let cipher = span_cipher(params, approx, key)?;
    let h = params.half_bits();
    let hm = params.half_mask();
    let alpha = (approx.input_mask.0 as u64) << h | approx.input_mask.1 as u64;
    let beta = (approx.output_mask.0 as u64) << h | approx.output_mask.1 as u64;
    let chunks = 64u64;
    let per = samples.div_ceil(chunks);
    let numerator: i64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let todo = per.min(samples.saturating_sub(c * per));
            let mut acc = 0i64;
            for _ in 0..todo {
                let x = rng.random::<u64>() & ones(2 * h);
                let (l, r) = cipher.encrypt_state((x >> h) as u32, x as u32 & hm);
                let y = (l as u64) << h | r as u64;
                acc += 1 - 2 * (dot(alpha, x) ^ dot(beta, y)) as i64;
            }
            acc
        })
        .sum();
    Ok(Correlation::Sampled { numerator, samples })
}

#[derive(Debug, Clone, Serialize)]
pub struct ToyExactSummary {
    pub keys: usize,
    pub betas_per_key: usize,
    pub with_fl_max_abs_numerator: i64,
    pub no_fl_max_abs_numerator: i64,
    pub wrong_subkey_nonzero: usize,
    pub wrong_subkey_trials: usize,
    pub wrong_subkey_max_abs_correlation: f64,
}

fn random_nonzero(rng: &mut ChaCha20Rng, mask: u32) -> u32 {
    loop {
        let v = rng.random::<u32>() & mask;
        if v != 0 {
            return v;
        }
    }
}

/// Exact zero-correlation check of both families on the toy cipher: for each
/// of `n_keys` random keys, `n_betas` random nonzero `β` per family. The
/// with-FL chain uses the key's own FL subkeys; a chain built from unrelated
/// FL subkeys serves as the negative control.
pub fn toy_exact_suite(params: &CipherParams, n_betas: usize, n_keys: usize, seed: u64) -> Result<(Vec<Verdict>, ToyExactSummary)> {
    if params.block_bits() > 16 {
        return Err(Error::ExactVerificationInfeasible(params.block_bits()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let hm = params.half_mask();
    let wm = params.word_mask();
    let jobs: Vec<_> = (0..n_keys)
        .map(|i| {
            let key = MasterKey::random(params, &mut rng);
            let betas: Vec<u32> = (0..n_betas).map(|_| random_nonzero(&mut rng, hm)).collect();
            let wrong: Vec<FlKey> = (0..3).map(|_| FlKey { kl1: rng.random::<u32>() & wm, kl2: rng.random::<u32>() & wm }).collect();
            (i, key, betas, wrong)
        })
        .collect();
    type Outcome = (i64, i64, Option<(usize, u32, i64)>, Option<(usize, u32, i64)>, usize, i64);
    let results: Vec<Outcome> = jobs
        .par_iter()
        .map(|(i, key, betas, wrong)| -> Result<Outcome> {
            let sched = SubkeySchedule::new(params, key);
            let (kl3, kl5, kl7) = (sched.fl_key(3), sched.fl_key(5), sched.fl_key(7));
            let probe = build_zc_family_with_fl(params, 1, &kl3, &kl5, &kl7)?;
            let book_fl = Codebook::new(&span_cipher(params, &probe, key)?)?;
            let start = (*i % 3) as u8 + 1;
            let probe = build_zc_family_no_fl(params, 1, start)?;
            let book_nofl = Codebook::new(&span_cipher(params, &probe, key)?)?;
            let (mut max_fl, mut max_nofl, mut bad_fl, mut bad_nofl) = (0i64, 0i64, None, None);
            let (mut nonzero, mut max_wrong) = (0usize, 0i64);
            for &b in betas {
                let c = book_fl.correlation(&build_zc_family_with_fl(params, b, &kl3, &kl5, &kl7)?).numerator();
                if c != 0 && bad_fl.is_none() {
                    bad_fl = Some((*i, b, c));
                }
                max_fl = max_fl.max(c.abs());
                let c = book_nofl.correlation(&build_zc_family_no_fl(params, b, start)?).numerator();
                if c != 0 && bad_nofl.is_none() {
                    bad_nofl = Some((*i, b, c));
                }
                max_nofl = max_nofl.max(c.abs());
                let w = build_zc_family_with_fl(params, b, &wrong[0], &wrong[1], &wrong[2])?;
                let c = book_fl.correlation(&w).numerator();
                if c != 0 {
                    nonzero += 1;
                }
                max_wrong = max_wrong.max(c.abs());
            }
            Ok((max_fl, max_nofl, bad_fl, bad_nofl, nonzero, max_wrong))
        })
        .collect::<Result<_>>()?;
    let summary = ToyExactSummary {
        keys: n_keys,
        betas_per_key: n_betas,
        with_fl_max_abs_numerator: results.iter().map(|r| r.0).max().unwrap_or(0),
        no_fl_max_abs_numerator: results.iter().map(|r| r.1).max().unwrap_or(0),
        wrong_subkey_nonzero: results.iter().map(|r| r.4).sum(),
        wrong_subkey_trials: n_keys * n_betas,
        wrong_subkey_max_abs_correlation: results.iter().map(|r| r.5).max().unwrap_or(0) as f64 / 65536.0,
    };
    let params_json = json!({ "keys": n_keys, "betas_per_key": n_betas });
    let mut fl = Verdict::new(MODULE, "verify_zero_correlation_exact", json!({ "family": "with-fl", "cfg": params_json })).seed(seed);
    if let Some((i, b, c)) = results.iter().find_map(|r| r.2) {
        fl.fail(json!({ "key_index": i, "beta": b, "numerator": c }));
    }
    let mut nofl = Verdict::new(MODULE, "verify_zero_correlation_exact", json!({ "family": "no-fl", "cfg": params_json })).seed(seed);
    if let Some((i, b, c)) = results.iter().find_map(|r| r.3) {
        nofl.fail(json!({ "key_index": i, "beta": b, "numerator": c }));
    }
    let mut control = Verdict::new(MODULE, "wrong_subkey_control", params_json.clone()).seed(seed).details(json!({
        "nonzero": summary.wrong_subkey_nonzero,
        "trials": summary.wrong_subkey_trials,
        "max_abs_correlation": summary.wrong_subkey_max_abs_correlation,
    }));
    if summary.wrong_subkey_nonzero == 0 {
        control.fail(json!({ "reason": "wrong FL subkeys never produced a nonzero correlation" }));
    }
    Ok((vec![fl, nofl, control], summary))
}

/// Sampled correlation of `pairs` random (key, β, start round) instances of
/// the no-FL family at full width. Passes when every estimate is within four
/// standard errors (`4/√samples`) of zero.
pub fn real_sampled_suite(params: &CipherParams, pairs: usize, samples: u64, seed: u64) -> Result<Verdict> {
    let bound = 4.0 / (samples as f64).sqrt();
    let mut v = Verdict::new(MODULE, "estimate_correlation", json!({ "family": "no-fl", "pairs": pairs, "samples": samples }))
        .seed(seed);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for i in 0..pairs {
        let key = MasterKey::random(params, &mut rng);
        let beta = random_nonzero(&mut rng, params.half_mask());
        let start = (i % 3) as u8 + 1;
        let approx = build_zc_family_no_fl(params, beta, start)?;
        let c = estimate_correlation(params, &approx, &key, samples, seed.wrapping_add(i as u64))?.value();
        if c.abs() > bound {
            v.fail(json!({ "key": key.to_hex(params), "beta": beta, "start_round": start, "correlation": c }));
        }
        rows.push(json!({ "beta": beta, "start_round": start, "correlation": c }));
    }
    Ok(v.details(json!({ "bound": bound, "estimates": rows })))
}
