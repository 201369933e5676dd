//! Five-round zero-correlation linear approximations of MISTY1.
//!
//! Masks act on the state `(L, R)`: the input mask on the state entering the
//! first round of the span, the output mask on the state leaving the last.
//! With FL layers the span is rounds 3..=7 (layers 3..=8 inside), and the
//! approximation is `(FL̄_3∘FL̄_5∘FL̄_7(β), 0) -> (0, β)`. Without FL layers
//! it is `(β, 0) -> (0, β)` over rounds `r..=r+4`.

mod basis;
mod verify;

pub use basis::{BasisMaskSet, BasisTableT1, InvolvedSubkeys, Support};
pub use verify::{
    estimate_correlation, exact_correlation, real_sampled_suite, span_cipher, toy_exact_suite, verify_zero_correlation_exact, Codebook,
    ToyExactSummary,
};

use serde::{Deserialize, Serialize};

use crate::bits::positions;
use crate::cipher::{CipherParams, FlKey};
use crate::error::{Error, Result};
use crate::mask::fl_bar_chain;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    WithFl,
    NoFl,
}

/// A named group of key bits an approximation depends on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubkeyBits {
    pub name: String,
    pub positions: String,
    pub value: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZcApprox {
    pub family: Family,
    /// Mask on `(L, R)` entering round `span.0`.
    pub input_mask: (u32, u32),
    /// Mask on `(L, R)` leaving round `span.1`.
    pub output_mask: (u32, u32),
    pub span: (u8, u8),
    pub key_dependent: bool,
    pub involved_subkey_bits: Vec<SubkeyBits>,
}

fn check_beta(params: &CipherParams, beta: u32) -> Result<()> {
    if beta == 0 {
        return Err(Error::ZeroMask);
    }
    params.check_half("beta", beta)
}

/// With-FL family for an arbitrary half-block `β` and explicit FL keys.
pub fn build_zc_family_with_fl(
    params: &CipherParams,
    beta: u32,
    kl3: &FlKey,
    kl5: &FlKey,
    kl7: &FlKey,
) -> Result<ZcApprox> {
    check_beta(params, beta)?;
    let w = params.word_bits;
    let bits = |name: &str, v: u32| SubkeyBits { name: name.into(), positions: positions(params.word_mask() as u64, w), value: v };
    Ok(ZcApprox {
        family: Family::WithFl,
        input_mask: (fl_bar_chain(params, beta, kl3, kl5, kl7), 0),
        output_mask: (0, beta),
        span: (3, 7),
        key_dependent: true,
        involved_subkey_bits: vec![
            bits("KL3,1", kl3.kl1),
            bits("KL3,2", kl3.kl2),
            bits("KL5,1", kl5.kl1),
            bits("KL5,2", kl5.kl2),
            bits("KL7,1", kl7.kl1),
            bits("KL7,2", kl7.kl2),
        ],
    })
}

/// With-FL family restricted to `β = β_s || 0` on the short side of the left
/// word, indexed by the involved key bits only.
pub fn build_zc_family_with_fl_narrow(params: &CipherParams, beta_s: u32, keys: &InvolvedSubkeys) -> Result<ZcApprox> {
    if beta_s == 0 {
        return Err(Error::ZeroMask);
    }
    crate::cipher::check_width("beta", beta_s as u64, params.short_bits)?;
    let (kl3, kl5, kl7) = keys.fl_keys(params);
    let beta = Support::Narrow.place(params, beta_s);
    let mut a = build_zc_family_with_fl(params, beta, &kl3, &kl5, &kl7)?;
    a.involved_subkey_bits = keys.describe(params);
    Ok(a)
}

/// Key-independent family `(β, 0) -> (0, β)` over rounds `start..=start+4`.
pub fn build_zc_family_no_fl(params: &CipherParams, beta: u32, start_round: u8) -> Result<ZcApprox> {
    check_beta(params, beta)?;
    if !(1..=3).contains(&start_round) {
        return Err(Error::InvalidRounds(format!("span must start in 1..=3, got {start_round}")));
    }
    Ok(ZcApprox {
        family: Family::NoFl,
        input_mask: (beta, 0),
        output_mask: (0, beta),
        span: (start_round, start_round + 4),
        key_dependent: false,
        involved_subkey_bits: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mask::fl_mask_backpropagate;

    #[test]
    fn zero_beta_rejected() {
        let p = CipherParams::toy();
        assert_eq!(build_zc_family_no_fl(&p, 0, 3), Err(Error::ZeroMask));
        let k = InvolvedSubkeys::default();
        assert_eq!(build_zc_family_with_fl_narrow(&p, 0, &k), Err(Error::ZeroMask));
        assert!(build_zc_family_no_fl(&p, 1, 4).is_err());
    }

    #[test]
    fn zero_keys_give_trivial_chain() {
        let p = CipherParams::misty1();
        let a = build_zc_family_with_fl_narrow(&p, 0x40, &InvolvedSubkeys::default()).unwrap();
        let mut m = (0x40u32 << 9, 0u32);
        for _ in 0..3 {
            m = fl_mask_backpropagate(m.0, m.1, 0, 0, 0xffff);
        }
        assert_eq!(a.input_mask.0, m.0 << 16 | m.1);
        assert_eq!(a.output_mask, (0, 0x40 << 25));
    }

    #[test]
    fn narrow_shape_is_preserved() {
        let p = CipherParams::misty1();
        for idx in [0u64, 1, 0x3ff_ffff_ffff, 0x123_4567_89ab] {
            let keys = InvolvedSubkeys::from_index(&p, idx);
            for b in 1..128 {
                let a = build_zc_family_with_fl_narrow(&p, b, &keys).unwrap();
                assert_eq!(a.input_mask.0 & 0x01ff_01ff, 0);
                assert_eq!(a.input_mask.1, 0);
            }
        }
    }
}
