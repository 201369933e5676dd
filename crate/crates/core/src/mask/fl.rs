//! Mask back-propagation through FL.
//!
//! FL is affine in its input for a fixed key, so every output mask pair
//! `(β, β')` has exactly one input mask pair with nonzero correlation.

use crate::cipher::{CipherParams, FlKey};

/// Input mask `(α, α')` matched to output mask `(β, β')` of FL under `kl`.
/// Words are `mask`-wide.
#[inline]
pub fn fl_mask_backpropagate(beta: u32, beta_p: u32, kl1: u32, kl2: u32, mask: u32) -> (u32, u32) {
    let alpha_p = (!kl2 & beta & mask) ^ beta_p;
    let alpha = (kl1 & alpha_p) ^ beta;
    (alpha, alpha_p)
}

/// The same map on a packed half-block mask `β || β'`.
#[inline]
pub fn fl_bar(params: &CipherParams, out_mask: u32, kl: &FlKey) -> u32 {
    let w = params.word_bits;
    let wm = params.word_mask();
    let (a, ap) = fl_mask_backpropagate(out_mask >> w, out_mask & wm, kl.kl1, kl.kl2, wm);
    a << w | ap
}

/// `FL̄_3 ∘ FL̄_5 ∘ FL̄_7` applied to a half-block mask: `FL̄_7` acts first.
pub fn fl_bar_chain(params: &CipherParams, beta: u32, kl3: &FlKey, kl5: &FlKey, kl7: &FlKey) -> u32 {
    fl_bar(params, fl_bar(params, fl_bar(params, beta, kl7), kl5), kl3)
}
