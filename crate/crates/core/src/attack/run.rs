//! End-to-end attack driver: pairs, guess enumeration, filtration.

use std::collections::{BTreeMap, HashSet};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::cost::{cost_model_with, default_betas, CostLedger};
use super::{Attack, AttackVariant, KeyGuess, StageState};
use crate::cipher::{Cipher, MasterKey};
use crate::error::{Error, Result};
use crate::stats::{chi_sq_statistic, moments, required_samples, survives, DistinguisherParams, MomentSet};

/// Largest number of pairs generated in memory.
pub const MAX_PAIRS_LOG2: u32 = 26;

#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    /// Every value of every guessed fragment.
    Exhaustive { max_guess_bits: u32 },
    /// The right guess plus `wrong` uniformly random guesses.
    Sampled { wrong: usize },
    /// Caller-supplied guesses.
    Listed(Vec<KeyGuess>),
}

#[derive(Debug, Clone)]
pub struct AttackConfig {
    pub variant: AttackVariant,
    /// Defaults to the distinguisher's requirement, capped at the codebook.
    pub n_pairs: Option<u64>,
    pub beta0_log2: f64,
    pub beta1_log2: f64,
    pub seed: u64,
    pub strategy: Strategy,
    /// Drawn from the seed when absent and no pairs are supplied.
    pub key: Option<MasterKey>,
    pub pairs: Option<Vec<(u64, u64)>>,
    /// Evaluated guesses cross-checked against the direct oracle.
    pub oracle_checks: usize,
}

impl AttackConfig {
    pub fn new(variant: AttackVariant, seed: u64) -> Self {
        let (beta0_log2, beta1_log2) = default_betas(variant);
        AttackConfig {
            variant,
            n_pairs: None,
            beta0_log2,
            beta1_log2,
            seed,
            strategy: Strategy::Sampled { wrong: 7 },
            key: None,
            pairs: None,
            oracle_checks: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GuessOutcome {
    pub key_fragments_hex: BTreeMap<String, String>,
    pub t: f64,
    pub survived: bool,
    pub right: bool,
    /// `V[z]` for listed and sampled guesses; omitted in exhaustive runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counters: Option<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleCheck {
    pub checked: usize,
    pub mismatches: usize,
    pub pass: bool,
}

/// The final brute-force step, counted rather than performed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchSummary {
    pub remaining_key_bits: u32,
    pub log2_trial_encryptions: Option<f64>,
    /// The right guess survived and the true key reproduces a known pair.
    pub right_key_recovered: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttackReport {
    pub variant: AttackVariant,
    #[serde(rename = "N")]
    pub n: u64,
    pub seed: u64,
    pub m: u32,
    pub beta0_log2: f64,
    pub beta1_log2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub key_hex: Option<String>,
    pub tau: f64,
    pub moments: MomentSet,
    pub guesses_evaluated: u64,
    /// Every evaluated guess, or only survivors and the right guess for
    /// exhaustive runs.
    pub guesses: Vec<GuessOutcome>,
    pub survivors: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub right_key: Option<GuessOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub right_key_rank: Option<u64>,
    pub oracle: OracleCheck,
    pub exhaustive_search: SearchSummary,
    pub cost_ledger: CostLedger,
}

impl AttackReport {
    /// Fraction of evaluated wrong guesses that survived.
    pub fn wrong_survival_rate(&self) -> f64 {
        let right = self.right_key.as_ref().map_or(0, |r| r.survived as u64);
        let wrong_total = self.guesses_evaluated - self.right_key.is_some() as u64;
        if wrong_total == 0 {
            return 0.0;
        }
        (self.survivors - right) as f64 / wrong_total as f64
    }
}

/// `n` known pairs with distinct plaintexts under `key`.
pub fn generate_pairs(variant: AttackVariant, key: &MasterKey, n: u64, seed: u64) -> Result<Vec<(u64, u64)>> {
    let params = variant.params();
    let bits = params.block_bits();
    if n > 1u64 << bits.min(63) || n > 1u64 << MAX_PAIRS_LOG2 {
        return Err(Error::Infeasible {
            reason: format!("{n} pairs for a {bits}-bit block at desk scale"),
            log2_cost: (n as f64).log2(),
        });
    }
    let cipher = Cipher::new(params, key)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let pts: Vec<u64> = if bits <= 24 {
        index::sample(&mut rng, 1usize << bits, n as usize).into_iter().map(|i| i as u64).collect()
    } else {
        let mask = crate::bits::ones(bits);
        let mut seen = HashSet::with_capacity(n as usize);
        let mut v = Vec::with_capacity(n as usize);
        while v.len() < n as usize {
            let pt = rng.random::<u64>() & mask;
            if seen.insert(pt) {
                v.push(pt);
            }
        }
        v
    };
    Ok(pts.into_par_iter().map(|pt| (pt, cipher.encrypt(pt))).collect())
}

/// Hex lines `PT CT`; blank lines and `#` comments are skipped.
pub fn parse_pairs(text: &str) -> Result<Vec<(u64, u64)>> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let mut hex = |what: &str| -> Result<u64> {
            let tok = it.next().ok_or_else(|| Error::Parse(format!("line {}: missing {what}", no + 1)))?;
            let tok = tok.trim_start_matches("0x");
            u64::from_str_radix(tok, 16).map_err(|e| Error::Parse(format!("line {}: {what} `{tok}`: {e}", no + 1)))
        };
        let pt = hex("plaintext")?;
        let ct = hex("ciphertext")?;
        if it.next().is_some() {
            return Err(Error::Parse(format!("line {}: trailing data", no + 1)));
        }
        out.push((pt, ct));
    }
    Ok(out)
}

/// Binary records: 8-byte big-endian plaintext then ciphertext.
pub fn parse_pairs_binary(bytes: &[u8]) -> Result<Vec<(u64, u64)>> {
    if bytes.len() % 16 != 0 {
        return Err(Error::Parse(format!("{} bytes is not a whole number of 16-byte records", bytes.len())));
    }
    Ok(bytes
        .chunks_exact(16)
        .map(|c| {
            let word = |b: &[u8]| u64::from_be_bytes(b.try_into().expect("8 bytes"));
            (word(&c[..8]), word(&c[8..]))
        })
        .collect())
}

fn outcome(guess: &KeyGuess, t: f64, tau: f64, right: bool, counters: Option<Vec<u64>>) -> GuessOutcome {
    GuessOutcome { key_fragments_hex: guess.to_hex(), t, survived: survives(t, tau), right, counters }
}

fn random_guess(attack: &Attack, rng: &mut ChaCha8Rng) -> KeyGuess {
    let mut g = KeyGuess::default();
    for spec in attack.fragment_specs() {
        let v = rng.random::<u64>() & crate::bits::ones(spec.bits);
        g.push(spec, v).expect("masked");
    }
    g
}

pub fn run_attack(config: &AttackConfig) -> Result<AttackReport> {
    let attack = Attack::new(config.variant);
    let p = &attack.params;
    let bits = p.block_bits();
    let dp = DistinguisherParams::new(bits, attack.m, config.beta0_log2, config.beta1_log2)?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let key = match (&config.key, &config.pairs) {
        (Some(k), _) => Some(MasterKey::new(p, k.0)?),
        (None, None) => Some(MasterKey::random(p, &mut rng)),
        (None, Some(_)) => None,
    };
    let pairs = match &config.pairs {
        Some(pairs) => pairs.clone(),
        None => {
            let n = match config.n_pairs {
                Some(n) => n,
                None => {
                    let need = required_samples(&dp).ceil().min((bits as f64).exp2());
                    if need > (MAX_PAIRS_LOG2 as f64).exp2() {
                        let ledger = cost_model_with(config.variant, config.beta0_log2, config.beta1_log2)?;
                        return Err(Error::Infeasible {
                            reason: format!("full-scale attack needs 2^{:.2} pairs; pass an explicit pair count", need.log2()),
                            log2_cost: ledger.total_log2,
                        });
                    }
                    need as u64
                }
            };
            generate_pairs(config.variant, key.as_ref().expect("key drawn"), n, config.seed)?
        }
    };
    for &(pt, ct) in &pairs {
        crate::cipher::check_width("plaintext", pt, bits)?;
        crate::cipher::check_width("ciphertext", ct, bits)?;
    }
    let n = pairs.len() as u64;
    let ms = moments(&dp, n as f64)?;
    let tau = ms.tau;
    let initial = attack.build_initial_counters(&pairs)?;
    let right = key.as_ref().map(|k| attack.right_guess(k));

    rng.set_stream(2);
    let mut guesses_out = Vec::new();
    let evaluated;
    let mut survivors = 0u64;
    let mut right_outcome = None;
    let mut rank = None;
    let oracle;

    match &config.strategy {
        Strategy::Exhaustive { max_guess_bits } => {
            let g = attack.guessed_bits();
            if g > *max_guess_bits {
                return Err(Error::Infeasible {
                    reason: format!("exhaustive enumeration of {g} guessed key bits"),
                    log2_cost: g as f64 + (n.max(1) as f64).log2(),
                });
            }
            let right_t = match &right {
                Some(r) => Some((r, chi_sq_statistic(&attack.evaluate(&initial, r)?)?)),
                None => None,
            };
            let sweep = exhaustive_sweep(&attack, &initial, tau, right_t)?;
            evaluated = sweep.evaluated;
            survivors = sweep.survivors.len() as u64;
            if let Some((r, t)) = right_t {
                right_outcome = Some(outcome(r, t, tau, true, None));
                rank = Some(sweep.below_right + 1);
            }
            guesses_out = sweep.survivors;
            if let Some(r) = right_outcome.as_ref().filter(|r| !r.survived) {
                guesses_out.push(r.clone());
            }
            let checks: Vec<KeyGuess> = right
                .iter()
                .cloned()
                .chain((0..config.oracle_checks).map(|_| random_guess(&attack, &mut rng)))
                .take(config.oracle_checks)
                .collect();
            oracle = oracle_check(&attack, &initial, &pairs, &checks)?;
        }
        Strategy::Sampled { .. } | Strategy::Listed(_) => {
            let list: Vec<(KeyGuess, bool)> = match &config.strategy {
                Strategy::Sampled { wrong } => {
                    let mut v: Vec<(KeyGuess, bool)> = right.iter().map(|r| (r.clone(), true)).collect();
                    while v.len() < wrong + right.is_some() as usize {
                        let g = random_guess(&attack, &mut rng);
                        if right.as_ref() != Some(&g) {
                            v.push((g, false));
                        }
                    }
                    v
                }
                Strategy::Listed(list) => list.iter().map(|g| (g.clone(), right.as_ref() == Some(g))).collect(),
                Strategy::Exhaustive { .. } => unreachable!(),
            };
            let results: Vec<(f64, Vec<u64>)> = list
                .par_iter()
                .map(|(g, _)| {
                    let v = attack.evaluate(&initial, g)?;
                    Ok((chi_sq_statistic(&v)?, v.counts))
                })
                .collect::<Result<_>>()?;
            let checks: Vec<KeyGuess> = list.iter().take(config.oracle_checks).map(|(g, _)| g.clone()).collect();
            oracle = oracle_check(&attack, &initial, &pairs, &checks)?;
            evaluated = list.len() as u64;
            for ((g, is_right), (t, counts)) in list.iter().zip(results) {
                let o = outcome(g, t, tau, *is_right, Some(counts));
                survivors += o.survived as u64;
                if *is_right {
                    right_outcome = Some(o.clone());
                }
                guesses_out.push(o);
            }
            if let Some(r) = &right_outcome {
                rank = Some(guesses_out.iter().filter(|o| o.t < r.t).count() as u64 + 1);
            }
        }
    }

    let guessed = attack.guessed_bits();
    let remaining = 8 * p.word_bits - guessed;
    let right_key_recovered = match (&key, &right_outcome) {
        (Some(k), Some(r)) => {
            let (pt, ct) = pairs[0];
            Some(r.survived && Cipher::new(p.clone(), k)?.encrypt(pt) == ct)
        }
        _ => None,
    };
    let exhaustive_search = SearchSummary {
        remaining_key_bits: remaining,
        log2_trial_encryptions: (survivors > 0).then(|| (survivors as f64).log2() + remaining as f64),
        right_key_recovered,
    };

    Ok(AttackReport {
        variant: config.variant,
        n,
        seed: config.seed,
        m: attack.m,
        beta0_log2: config.beta0_log2,
        beta1_log2: config.beta1_log2,
        key_hex: key.as_ref().map(|k| k.to_hex(p)),
        tau,
        moments: ms,
        guesses_evaluated: evaluated,
        guesses: guesses_out,
        survivors,
        right_key: right_outcome,
        right_key_rank: rank,
        oracle,
        exhaustive_search,
        cost_ledger: cost_model_with(config.variant, config.beta0_log2, config.beta1_log2)?,
    })
}

fn oracle_check(attack: &Attack, initial: &StageState, pairs: &[(u64, u64)], guesses: &[KeyGuess]) -> Result<OracleCheck> {
    let mut mismatches = 0;
    for g in guesses {
        if attack.evaluate(initial, g)? != attack.naive_parity_oracle(pairs, g)? {
            mismatches += 1;
        }
    }
    Ok(OracleCheck { checked: guesses.len(), mismatches, pass: mismatches == 0 })
}

struct Sweep {
    evaluated: u64,
    survivors: Vec<GuessOutcome>,
    below_right: u64,
}

/// Depth-first enumeration sharing each partial fold across the guesses
/// below it. The top level runs in parallel.
fn exhaustive_sweep(attack: &Attack, initial: &StageState, tau: f64, right: Option<(&KeyGuess, f64)>) -> Result<Sweep> {
    let specs = attack.fragment_specs();
    let right_vals: Option<Vec<u64>> =
        right.map(|(r, _)| specs.iter().map(|s| r.get(&s.name)).collect::<Result<_>>()).transpose()?;
    let ctx = SweepCtx { attack, tau, right_t: right.map(|r| r.1) };
    let first = &attack.stages()[0];
    let widths: Vec<u32> = first.fragments.iter().map(|f| f.bits).collect();
    let parts: Vec<SweepAcc> = (0..1u64 << first.fragment_bits())
        .into_par_iter()
        .map(|packed| {
            let vals = unpack_values(packed, &widths);
            let mut acc = SweepAcc::default();
            let state = attack.partial_sum_fold(initial, &vals)?;
            let mut prefix = vals;
            ctx.descend(&state, 1, &mut prefix, &mut acc)?;
            Ok(acc)
        })
        .collect::<Result<_>>()?;

    let mut sweep = Sweep { evaluated: 0, survivors: Vec::new(), below_right: 0 };
    for acc in parts {
        sweep.evaluated += acc.evaluated;
        sweep.below_right += acc.below_right;
        for (vals, t) in acc.survivors {
            let is_right = right_vals.as_deref() == Some(&vals[..]);
            sweep.survivors.push(outcome(&to_guess(&specs, &vals), t, tau, is_right, None));
        }
    }
    Ok(sweep)
}

#[derive(Default)]
struct SweepAcc {
    evaluated: u64,
    survivors: Vec<(Vec<u64>, f64)>,
    below_right: u64,
}

struct SweepCtx<'a> {
    attack: &'a Attack,
    tau: f64,
    right_t: Option<f64>,
}

impl SweepCtx<'_> {
    fn descend(&self, state: &StageState, stage: usize, prefix: &mut Vec<u64>, acc: &mut SweepAcc) -> Result<()> {
        let attack = self.attack;
        if let Some(spec) = attack.stages().get(stage) {
            let widths: Vec<u32> = spec.fragments.iter().map(|f| f.bits).collect();
            for packed in 0..1u64 << spec.fragment_bits() {
                let vals = unpack_values(packed, &widths);
                let next = attack.partial_sum_fold(state, &vals)?;
                let len = prefix.len();
                prefix.extend(&vals);
                self.descend(&next, stage + 1, prefix, acc)?;
                prefix.truncate(len);
            }
            return Ok(());
        }
        let widths: Vec<u32> = attack.final_fragments().iter().map(|f| f.bits).collect();
        let total: u32 = widths.iter().sum();
        for packed in 0..1u64 << total {
            let len = prefix.len();
            prefix.extend(unpack_values(packed, &widths));
            let entries = attack.entries_for_values(prefix);
            let t = chi_sq_statistic(&attack.finalize_with_entries(state, &entries))?;
            acc.evaluated += 1;
            if self.right_t.is_some_and(|r| t < r) {
                acc.below_right += 1;
            }
            if survives(t, self.tau) {
                acc.survivors.push((prefix.clone(), t));
            }
            prefix.truncate(len);
        }
        Ok(())
    }
}

fn unpack_values(mut packed: u64, widths: &[u32]) -> Vec<u64> {
    let mut out = vec![0; widths.len()];
    for (i, &w) in widths.iter().enumerate().rev() {
        out[i] = packed & crate::bits::ones(w);
        packed >>= w;
    }
    out
}

fn to_guess(specs: &[super::FragmentSpec], vals: &[u64]) -> KeyGuess {
    let mut g = KeyGuess::default();
    for (s, &v) in specs.iter().zip(vals) {
        g.push(s.clone(), v).expect("enumerated in range");
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_file_round_trip() {
        let text = "# pairs\n0123456789abcdef 0x0011223344556677\n\n ffffffffffffffff 0 # last\n";
        assert_eq!(parse_pairs(text).unwrap(), vec![(0x0123456789abcdef, 0x0011223344556677), (u64::MAX, 0)]);
        assert!(parse_pairs("12").is_err());
        assert!(parse_pairs("12 34 56").is_err());
        assert!(parse_pairs("zz 34").is_err());
        let mut bin = Vec::new();
        bin.extend(1u64.to_be_bytes());
        bin.extend(2u64.to_be_bytes());
        assert_eq!(parse_pairs_binary(&bin).unwrap(), vec![(1, 2)]);
        assert!(parse_pairs_binary(&bin[..5]).is_err());
    }

    #[test]
    fn generated_plaintexts_are_distinct() {
        for v in [AttackVariant::ToyNoFl, AttackVariant::NoFl] {
            let p = v.params();
            let key = MasterKey::random(&p, &mut ChaCha8Rng::seed_from_u64(3));
            let pairs = generate_pairs(v, &key, 1000, 9).unwrap();
            let set: HashSet<u64> = pairs.iter().map(|p| p.0).collect();
            assert_eq!(set.len(), 1000);
        }
        let key = MasterKey([0; 8]);
        assert!(generate_pairs(AttackVariant::ToyNoFl, &key, 1 << 17, 0).is_err());
    }

    #[test]
    fn full_scale_request_is_refused_with_cost() {
        let c = AttackConfig::new(AttackVariant::WithFl, 1);
        match run_attack(&c) {
            Err(Error::Infeasible { log2_cost, .. }) => assert!((log2_cost - 119.5).abs() < 0.3),
            other => panic!("{other:?}"),
        }
    }
}
