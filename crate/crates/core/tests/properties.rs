use proptest::prelude::*;

use misty_zc_core::attack::{generate_pairs, Attack, AttackVariant, KeyGuess, StageLayout};
use misty_zc_core::bits::{dot, ones};
use misty_zc_core::distinguisher::{build_zc_family_with_fl, Support};
use misty_zc_core::mask::fl_bar_chain;
use misty_zc_core::stats::{chi_sq_statistic, CounterVector};
use misty_zc_core::{Cipher, CipherParams, FlKey, MasterKey};

fn params(real: bool) -> CipherParams {
    if real {
        CipherParams::misty1()
    } else {
        CipherParams::toy()
    }
}

fn key_for(p: &CipherParams, words: [u32; 8]) -> MasterKey {
    MasterKey(words.map(|w| w & p.word_mask()))
}

fn fl_key(p: &CipherParams, a: u32, b: u32) -> FlKey {
    FlKey { kl1: a & p.word_mask(), kl2: b & p.word_mask() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn encrypt_then_decrypt(real: bool, words: [u32; 8], block: u64) {
        let p = params(real);
        let c = Cipher::new(p.clone(), &key_for(&p, words)).unwrap();
        let block = block & ones(p.block_bits());
        prop_assert_eq!(c.decrypt(c.encrypt(block)), block);
    }

    #[test]
    fn fi_and_fl_invert(real: bool, x: u32, k: u32, k2: u32) {
        let p = params(real);
        let (x, k) = (x & p.word_mask(), k & p.word_mask());
        prop_assert_eq!(p.fi_inv(p.fi(x, k), k), x);
        let key = fl_key(&p, k, k2);
        let h = x | (k2 & p.word_mask()) << p.word_bits;
        prop_assert_eq!(p.fl_inv(p.fl(h, &key), &key), h);
    }

    #[test]
    fn fl_mask_pair_is_affine(real: bool, beta: u32, a: u32, b: u32, xs in prop::collection::vec(any::<u32>(), 8)) {
        let p = params(real);
        let key = fl_key(&p, a, b);
        let out = beta & p.half_mask();
        let inp = misty_zc_core::mask::fl_bar(&p, out, &key);
        let parity = |x: u32| dot(out as u64, p.fl(x, &key) as u64) ^ dot(inp as u64, x as u64);
        let first = parity(xs[0] & p.half_mask());
        for x in xs {
            prop_assert_eq!(parity(x & p.half_mask()), first);
        }
    }

    #[test]
    fn chain_is_linear(real: bool, b1: u32, b2: u32, ks: [u32; 6]) {
        let p = params(real);
        let (k3, k5, k7) = (fl_key(&p, ks[0], ks[1]), fl_key(&p, ks[2], ks[3]), fl_key(&p, ks[4], ks[5]));
        let c = |b: u32| fl_bar_chain(&p, b & p.half_mask(), &k3, &k5, &k7);
        prop_assert_eq!(c(b1 ^ b2), c(b1) ^ c(b2));
    }

    #[test]
    fn chain_bit_locality(real: bool, beta: u32, j in 0u32..16, ks: [u32; 6]) {
        let p = params(real);
        let w = p.word_bits;
        let j = j % w;
        let (k3, k5, k7) = (fl_key(&p, ks[0], ks[1]), fl_key(&p, ks[2], ks[3]), fl_key(&p, ks[4], ks[5]));
        let c = |b: u32| fl_bar_chain(&p, b, &k3, &k5, &k7);
        let beta = (beta & p.word_mask()) << w;
        let e = 1u32 << (w - 1 - j) << w;
        let diff = c(beta) ^ c(beta ^ e);
        prop_assert_eq!(diff & !(e | e >> w), 0);
    }

    #[test]
    fn narrow_beta_keeps_narrow_alpha(real: bool, v: u32, ks: [u32; 6]) {
        let p = params(real);
        let v = (v & p.short_mask()).max(1);
        let beta = Support::Narrow.place(&p, v);
        let (k3, k5, k7) = (fl_key(&p, ks[0], ks[1]), fl_key(&p, ks[2], ks[3]), fl_key(&p, ks[4], ks[5]));
        let a = build_zc_family_with_fl(&p, beta, &k3, &k5, &k7).unwrap();
        let outside = p.long_mask();
        prop_assert_eq!(a.input_mask.0 & outside, 0);
        prop_assert_eq!(a.input_mask.1 & outside, 0);
    }

    #[test]
    fn statistic_is_nonnegative_and_zero_when_uniform(counts in prop::collection::vec(0u64..1000, 8), k in 1u64..100) {
        let v = CounterVector::from_counts(counts).unwrap();
        if v.total() > 0 {
            prop_assert!(chi_sq_statistic(&v).unwrap() >= 0.0);
        }
        let flat = CounterVector::from_counts(vec![k; 8]).unwrap();
        prop_assert_eq!(chi_sq_statistic(&flat).unwrap(), 0.0);
    }

    #[test]
    fn layout_pack_round_trip(widths in prop::collection::vec(1u32..17, 1..8), raw in prop::collection::vec(any::<u64>(), 8)) {
        let names: Vec<String> = (0..widths.len()).map(|i| format!("f{i}")).collect();
        let fields: Vec<(&str, u32)> = names.iter().map(String::as_str).zip(widths.iter().copied()).collect();
        let l = StageLayout::new(&fields);
        let vals: Vec<u64> = widths.iter().zip(&raw).map(|(&w, &r)| r & ((1 << w) - 1)).collect();
        prop_assert_eq!(&l.unpack(l.pack(&vals))[..vals.len()], &vals[..]);
    }
}

fn guess_from(a: &Attack, raw: &[u64]) -> KeyGuess {
    let mut g = KeyGuess::default();
    for (spec, &r) in a.fragment_specs().into_iter().zip(raw.iter().cycle()) {
        let bits = spec.bits;
        g.push(spec, r & ((1 << bits) - 1)).unwrap();
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn folds_conserve_mass_and_match_oracle(
        variant in prop::sample::select(AttackVariant::ALL.to_vec()),
        words: [u32; 8],
        seed: u64,
        n in 1u64..600,
        raw in prop::collection::vec(any::<u64>(), 12),
    ) {
        let a = Attack::new(variant);
        let key = key_for(&a.params, words);
        let pairs = generate_pairs(variant, &key, n, seed).unwrap();
        let g = guess_from(&a, &raw);
        let mut state = a.build_initial_counters(&pairs).unwrap();
        prop_assert_eq!(state.total_mass(), n);
        prop_assert!(state.populated() as u64 <= n);
        for spec in a.stages() {
            let k: Vec<u64> = spec.fragments.iter().map(|f| g.get(&f.name).unwrap()).collect();
            state = a.partial_sum_fold(&state, &k).unwrap();
            prop_assert_eq!(state.total_mass(), n);
        }
        let v = a.finalize_counters(&state, &g).unwrap();
        prop_assert_eq!(v.total(), n);
        prop_assert_eq!(v, a.naive_parity_oracle(&pairs, &g).unwrap());
    }
}
