//! Self-checks of a cipher configuration, as verdicts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde_json::json;

use super::vectors::{check, parse, RFC2994};
use super::{Cipher, CipherParams, MasterKey, SubkeySchedule, Variant};
use crate::report::Verdict;

const MODULE: &str = "cipher-core";

/// `K'_1..K'_8` for the RFC 2994 key `00112233..eeff`.
const RFC_K_PRIME: [u32; 8] = [0xcf51, 0x8e7f, 0x5e29, 0x673a, 0xcdbc, 0x07d6, 0xbf35, 0x5e11];

/// Known-answer vectors, encrypt/decrypt round trips, and key-schedule
/// consistency. `vectors` replaces the embedded RFC 2994 records.
pub fn cipher_suite(real: &CipherParams, toy: &CipherParams, vectors: Option<&str>, toy_only: bool, seed: u64) -> Vec<Verdict> {
    let mut out = Vec::new();
    if !toy_only {
        out.push(known_answers(real, vectors.unwrap_or(RFC2994)));
        out.push(rfc_key_schedule(real));
        out.push(round_trips(real, 32, 1 << 10, seed));
        out.push(schedule_relations(real, 64, seed));
    }
    out.push(round_trips(toy, 32, 1 << 10, seed));
    out.push(schedule_relations(toy, 64, seed));
    out.push(toy_codebook_is_permutation(toy, 16, seed));
    out
}

fn known_answers(p: &CipherParams, text: &str) -> Verdict {
    let mut v = Verdict::new(MODULE, "known_answer_vectors", json!({ "variant": p.variant }));
    match parse(p, text).and_then(|vs| check(p, &vs)) {
        Ok(results) if results.is_empty() => v.fail(json!({ "error": "no vectors" })),
        Ok(results) => {
            for r in results.iter().filter(|r| !r.pass) {
                v.fail(json!(r));
            }
            v = v.details(json!({ "vectors": results }));
        }
        Err(e) => v.fail(json!({ "error": e.to_string() })),
    }
    v
}

fn rfc_key_schedule(p: &CipherParams) -> Verdict {
    let mut v = Verdict::new(MODULE, "rfc_key_schedule", json!({ "variant": p.variant }));
    match MasterKey::from_hex(p, "00112233445566778899aabbccddeeff") {
        Ok(key) => {
            let s = SubkeySchedule::new(p, &key);
            let got: Vec<u32> = (1..=8).map(|i| s.k_prime(i)).collect();
            if got != RFC_K_PRIME {
                v.fail(json!({ "k_prime": got, "expected": RFC_K_PRIME }));
            }
        }
        Err(e) => v.fail(json!({ "error": e.to_string() })),
    }
    v
}

fn round_trips(p: &CipherParams, keys: usize, blocks: usize, seed: u64) -> Verdict {
    let mut v = Verdict::new(MODULE, "round_trip", json!({ "variant": p.variant, "keys": keys, "blocks": blocks })).seed(seed);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mask = crate::bits::ones(p.block_bits());
    for _ in 0..keys {
        let key = MasterKey::random(p, &mut rng);
        let c = match Cipher::new(p.clone(), &key) {
            Ok(c) => c,
            Err(e) => {
                v.fail(json!({ "error": e.to_string() }));
                return v;
            }
        };
        for _ in 0..blocks {
            let x = rng.random::<u64>() & mask;
            if c.decrypt(c.encrypt(x)) != x {
                v.fail(json!({ "key": key.to_hex(p), "block": x }));
                return v;
            }
        }
    }
    v
}

/// `K'_i = FI(K_i, K_{i+1})` and the round-key selection, recomputed from the
/// raw key words.
fn schedule_relations(p: &CipherParams, keys: usize, seed: u64) -> Verdict {
    let mut v = Verdict::new(MODULE, "key_schedule", json!({ "variant": p.variant, "keys": keys })).seed(seed);
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x6b73);
    for _ in 0..keys {
        let key = MasterKey::random(p, &mut rng);
        let s = SubkeySchedule::new(p, &key);
        let k = |i: usize| key.0[(i - 1) % 8];
        let kp = |i: usize| p.fi(k(i), k(i + 1));
        let ok = (1..=8).all(|i| {
            s.ko(i) == [k(i), k(i + 2), k(i + 7), k(i + 4)] && s.ki(i) == [kp(i + 5), kp(i + 1), kp(i + 3)]
        }) && (1..=5).all(|j| s.kl(2 * j - 1) == [k(j), kp(j + 6)] && s.kl(2 * j) == [kp(j + 2), k(j + 4)]);
        if !ok {
            v.fail(json!({ "key": key.to_hex(p) }));
            break;
        }
    }
    v
}

fn toy_codebook_is_permutation(p: &CipherParams, keys: usize, seed: u64) -> Verdict {
    let mut v = Verdict::new(MODULE, "codebook_permutation", json!({ "variant": p.variant, "keys": keys })).seed(seed);
    if p.variant != Variant::Toy {
        v.fail(json!({ "error": "full codebook only for the toy cipher" }));
        return v;
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x7065);
    for _ in 0..keys {
        let key = MasterKey::random(p, &mut rng);
        let c = Cipher::new(p.clone(), &key).expect("toy key fits");
        let mut seen = vec![false; 1 << p.block_bits()];
        for x in 0..1u64 << p.block_bits() {
            let y = c.encrypt(x) as usize;
            if std::mem::replace(&mut seen[y], true) {
                v.fail(json!({ "key": key.to_hex(p), "collision": y }));
                return v;
            }
        }
    }
    v
}
