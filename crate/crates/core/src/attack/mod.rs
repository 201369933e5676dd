//! Partial-sum key recovery on seven rounds (2..=8) of MISTY1, with and
//! without FL layers, plus the width-reduced toy counterparts.

pub mod cost;
mod keys;
mod layout;
mod no_fl;
mod run;
mod with_fl;

pub use keys::{derive_dependent_subkeys, range_name, FragmentSpec, KeyGuess};
pub use layout::{Field, Fields, StageLayout, StageState, MAX_FIELDS};
pub use run::{
    generate_pairs, parse_pairs, parse_pairs_binary, run_attack, AttackConfig, AttackReport, GuessOutcome, OracleCheck, SearchSummary, Strategy,
};

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cipher::{CipherParams, MasterKey, SubkeySchedule, Variant};
use crate::distinguisher::{BasisTableT1, InvolvedSubkeys, Support};
use crate::error::{Error, Result};
use crate::stats::CounterVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackVariant {
    WithFl,
    NoFl,
    ToyWithFl,
    ToyNoFl,
}

impl AttackVariant {
    pub const ALL: [AttackVariant; 4] =
        [AttackVariant::WithFl, AttackVariant::NoFl, AttackVariant::ToyWithFl, AttackVariant::ToyNoFl];

    pub fn has_fl(self) -> bool {
        matches!(self, AttackVariant::WithFl | AttackVariant::ToyWithFl)
    }

    pub fn cipher_variant(self) -> Variant {
        match self {
            AttackVariant::WithFl | AttackVariant::NoFl => Variant::Real,
            AttackVariant::ToyWithFl | AttackVariant::ToyNoFl => Variant::Toy,
        }
    }

    /// The toy no-FL attack uses the whole left word as mask support so that
    /// the distinguisher has dimension 4 rather than 1.
    pub fn support(self) -> Support {
        match self {
            AttackVariant::ToyNoFl => Support::Wide,
            _ => Support::Narrow,
        }
    }

    pub fn params(self) -> CipherParams {
        if self.has_fl() {
            CipherParams::seven_round_with_fl(self.cipher_variant())
        } else {
            CipherParams::seven_round_no_fl(self.cipher_variant())
        }
    }
}

impl fmt::Display for AttackVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttackVariant::WithFl => "with-fl",
            AttackVariant::NoFl => "no-fl",
            AttackVariant::ToyWithFl => "toy-with-fl",
            AttackVariant::ToyNoFl => "toy-no-fl",
        })
    }
}

impl FromStr for AttackVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AttackVariant::ALL
            .into_iter()
            .find(|v| v.to_string() == s)
            .ok_or_else(|| Error::Parse(format!("unknown attack variant `{s}`")))
    }
}

/// Maps one source cell's fields to target fields under a key fragment.
pub type StageMap = fn(&CipherParams, &Fields, &[u64]) -> Fields;

/// One partial-sum fold: guess `fragments`, map every populated cell of
/// `from` to a cell of `to`, add counts.
#[derive(Clone)]
pub struct StageSpec {
    /// Attack step that performs the fold.
    pub step: usize,
    pub from: StageLayout,
    pub to: StageLayout,
    pub fragments: Vec<FragmentSpec>,
    map: StageMap,
}

impl fmt::Debug for StageSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StageSpec")
            .field("step", &self.step)
            .field("from_bits", &self.from.total_bits())
            .field("to_bits", &self.to.total_bits())
            .field("fragments", &self.fragments)
            .finish()
    }
}

impl StageSpec {
    fn new(step: usize, from: StageLayout, to: StageLayout, fragments: Vec<FragmentSpec>, map: StageMap) -> Self {
        StageSpec { step, from, to, fragments, map }
    }

    pub fn fragment_bits(&self) -> u32 {
        self.fragments.iter().map(|f| f.bits).sum()
    }
}

/// Top `short_bits` of `FI(x, 0)`: the key-independent part of the short
/// output branch.
#[inline]
pub(crate) fn fi_short(p: &CipherParams, x: u32) -> u32 {
    p.fi(x, 0) >> p.long_bits
}

/// A configured attack: cipher, stage pipeline, and distinguisher basis.
#[derive(Debug)]
pub struct Attack {
    pub variant: AttackVariant,
    pub params: CipherParams,
    pub support: Support,
    /// Dimension of the distinguisher.
    pub m: u32,
    stages: Vec<StageSpec>,
    final_fragments: Vec<FragmentSpec>,
    t1: Option<BasisTableT1>,
}

impl Attack {
    pub fn new(variant: AttackVariant) -> Self {
        let params = variant.params();
        let support = variant.support();
        let (stages, final_fragments, t1) = if variant.has_fl() {
            (with_fl::stages(&params), with_fl::final_fragments(&params), Some(BasisTableT1::new(&params)))
        } else {
            (no_fl::stages(&params, support), Vec::new(), None)
        };
        Attack { variant, m: support.width(&params), params, support, stages, final_fragments, t1 }
    }

    pub fn stages(&self) -> &[StageSpec] {
        &self.stages
    }

    /// Fragments guessed after the last fold, before finalisation.
    pub fn final_fragments(&self) -> &[FragmentSpec] {
        &self.final_fragments
    }

    /// Every guessed fragment in guessing order.
    pub fn fragment_specs(&self) -> Vec<FragmentSpec> {
        self.stages.iter().flat_map(|s| s.fragments.iter().cloned()).chain(self.final_fragments.iter().cloned()).collect()
    }

    pub fn guessed_bits(&self) -> u32 {
        self.fragment_specs().iter().map(|f| f.bits).sum()
    }

    pub fn stage0_layout(&self) -> &StageLayout {
        &self.stages[0].from
    }

    /// Counter-space widths from stage 0 to the last stage.
    pub fn stage_widths(&self) -> Vec<u32> {
        std::iter::once(self.stages[0].from.total_bits()).chain(self.stages.iter().map(|s| s.to.total_bits())).collect()
    }

    pub fn initial_fields(&self, pt: u64, ct: u64) -> Fields {
        if self.variant.has_fl() {
            with_fl::initial(&self.params, pt, ct)
        } else {
            no_fl::initial(&self.params, self.support, pt, ct)
        }
    }

    /// Stage-0 counters. Plaintexts must be distinct.
    pub fn build_initial_counters(&self, pairs: &[(u64, u64)]) -> Result<StageState> {
        let mut pts: Vec<u64> = pairs.iter().map(|p| p.0).collect();
        pts.sort_unstable();
        if let Some(w) = pts.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicatePair(w[0]));
        }
        let layout = self.stage0_layout().clone();
        let n = layout.fields.len();
        let items: Vec<(u128, u64)> = pairs
            .iter()
            .map(|&(pt, ct)| (layout.pack(&self.initial_fields(pt, ct)[..n]), 1))
            .collect();
        Ok(StageState::collect(0, layout, items))
    }

    /// Applies fold `state.stage` with the given fragment values.
    pub fn partial_sum_fold(&self, state: &StageState, key: &[u64]) -> Result<StageState> {
        let spec = self
            .stages
            .get(state.stage)
            .ok_or_else(|| Error::LayoutMismatch(format!("no fold after stage {}", state.stage)))?;
        if spec.from != state.layout {
            return Err(Error::LayoutMismatch(format!("state layout does not match stage {}", state.stage)));
        }
        if key.len() != spec.fragments.len() {
            return Err(Error::LayoutMismatch(format!("{} key values for {} fragments", key.len(), spec.fragments.len())));
        }
        for (f, &v) in spec.fragments.iter().zip(key) {
            if v > crate::bits::ones(f.bits) {
                return Err(Error::WidthMismatch { what: "key fragment", value: v, bits: f.bits });
            }
        }
        Ok(self.fold_unchecked(state, spec, key))
    }

    fn fold_unchecked(&self, state: &StageState, spec: &StageSpec, key: &[u64]) -> StageState {
        let items = state.cells.iter().map(|&(cell, count)| {
            let out = (spec.map)(&self.params, &spec.from.unpack(cell), key);
            (spec.to.pack(&out[..spec.to.fields.len()]), count)
        });
        StageState::collect(state.stage + 1, spec.to.clone(), items)
    }

    /// Fills in words implied by the guessed fragments (with-FL: `K8`, `K4`,
    /// `K'3`, then `K'8`, `K3`, `K'2`, `K'1`).
    pub fn complete_guess(&self, guess: &KeyGuess) -> Result<KeyGuess> {
        if self.variant.has_fl() {
            derive_dependent_subkeys(&self.params, &with_fl::assemble(&self.params, guess)?)
        } else {
            Ok(guess.clone())
        }
    }

    /// Basis entries for a completed guess. With FL: `(m_i || α1_i || α2_i)`
    /// from the T1 table. Without: `m_i`.
    fn basis_entries(&self, complete: &KeyGuess) -> Result<Vec<u64>> {
        match &self.t1 {
            Some(t1) => {
                let l = self.params.long_bits;
                let top = |n: &str| complete.get(n).map(|v| (v >> l) as u32);
                let keys = InvolvedSubkeys {
                    k2: top("K2")?,
                    k3: top("K3")?,
                    k4: top("K4")?,
                    kp8: top("K'8")?,
                    kp1: top("K'1")?,
                    kp2: top("K'2")?,
                };
                Ok(t1.get(keys.to_index(&self.params)).to_vec())
            }
            None => Ok((0..self.m).map(|i| 1u64 << (self.m - 1 - i)).collect()),
        }
    }

    /// Basis entries from fragment values in `fragment_specs` order.
    pub(crate) fn entries_for_values(&self, values: &[u64]) -> Vec<u64> {
        match &self.t1 {
            Some(t1) => t1.get(with_fl::involved_from_values(&self.params, values).to_index(&self.params)).to_vec(),
            None => (0..self.m).map(|i| 1u64 << (self.m - 1 - i)).collect(),
        }
    }

    /// Final-stage counters to `V[z]`; `z[i]` is the parity of basis entry `i`
    /// with the packed final state.
    pub fn finalize_counters(&self, state: &StageState, guess: &KeyGuess) -> Result<CounterVector> {
        if state.stage != self.stages.len() {
            return Err(Error::LayoutMismatch(format!("stage {} is not final", state.stage)));
        }
        let entries = self.basis_entries(&self.complete_guess(guess)?)?;
        Ok(self.finalize_with_entries(state, &entries))
    }

    pub(crate) fn finalize_with_entries(&self, state: &StageState, entries: &[u64]) -> CounterVector {
        let mut v = CounterVector::zeros(self.m);
        let fl = self.variant.has_fl();
        let s = self.params.short_bits;
        for &(cell, count) in &state.cells {
            // With FL the final layout is (A_l, A_r, B) and entries are (m, α1, α2).
            let data = if fl {
                let f = state.layout.unpack(cell);
                f[2] << (2 * s) | f[0] << s | f[1]
            } else {
                cell as u64
            };
            let z = entries.iter().fold(0usize, |z, &e| z << 1 | crate::bits::dot(e, data) as usize);
            v.add(z, count);
        }
        v
    }

    /// Runs every fold for a full guess.
    pub fn evaluate(&self, initial: &StageState, guess: &KeyGuess) -> Result<CounterVector> {
        let mut state = initial.clone();
        for spec in &self.stages {
            let key: Vec<u64> = spec.fragments.iter().map(|f| guess.get(&f.name)).collect::<Result<_>>()?;
            state = self.partial_sum_fold(&state, &key)?;
        }
        self.finalize_counters(&state, guess)
    }

    /// `V[z]` computed pair by pair from FO/FL and the mask chain, no staging.
    pub fn naive_parity_oracle(&self, pairs: &[(u64, u64)], guess: &KeyGuess) -> Result<CounterVector> {
        let complete = self.complete_guess(guess)?;
        let z: Vec<usize> = if self.variant.has_fl() {
            let keys = with_fl::OracleKeys::from_guess(&complete)?;
            pairs.par_iter().map(|&(pt, ct)| with_fl::oracle_z(&self.params, &keys, pt, ct)).collect()
        } else {
            let keys = no_fl::OracleKeys::from_guess(&self.params, self.support, &complete)?;
            pairs.par_iter().map(|&(pt, ct)| no_fl::oracle_z(&self.params, self.support, &keys, pt, ct)).collect()
        };
        let mut v = CounterVector::zeros(self.m);
        for z in z {
            v.add(z, 1);
        }
        Ok(v)
    }

    /// The guess a key holder would make: every fragment at its true value.
    pub fn right_guess(&self, key: &MasterKey) -> KeyGuess {
        let p = &self.params;
        let s = SubkeySchedule::new(p, key);
        let (l, sb) = (p.long_bits, p.short_bits);
        let hi = |v: u32| (v >> sb) as u64;
        let lo = |v: u32| (v & p.short_mask()) as u64;
        let klo = |v: u32| (v & p.long_mask()) as u64;
        let mut g = KeyGuess::default();
        for spec in self.fragment_specs() {
            let v = match spec.name.as_str() {
                "K1" => s.k(1) as u64,
                "K2" => s.k(2) as u64,
                "K4" => s.k(4) as u64,
                "K8" => s.k(8) as u64,
                "K'7" => s.k_prime(7) as u64,
                n if n == range_name("K'3", 0, sb) => (s.k_prime(3) >> l) as u64,
                n if n == range_name("K'3", sb, l) && self.variant.has_fl() => klo(s.k_prime(3)),
                n if n == range_name("K8", 0, l) => hi(s.k(8)),
                n if n == range_name("K8", l, sb) => lo(s.k(8)),
                n if n == range_name("K4", 0, l) => hi(s.k(4)),
                n if n == range_name("K4", l, sb) => lo(s.k(4)),
                n if n == no_fl::ki_lo_name("K'7", p) => klo(s.k_prime(7)),
                n if n == no_fl::ki_lo_name("K'1", p) => klo(s.k_prime(1)),
                n if n == no_fl::ki_lo_name("K'3", p) => klo(s.k_prime(3)),
                n if n == no_fl::ki_lo_name("K'5", p) => klo(s.k_prime(5)),
                n => unreachable!("unknown fragment {n}"),
            };
            g.push(spec, v).expect("fragment fits");
        }
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_widths_match_the_attack_descriptions() {
        assert_eq!(Attack::new(AttackVariant::WithFl).stage_widths(), vec![92, 60, 53, 44, 37, 28, 21]);
        assert_eq!(Attack::new(AttackVariant::NoFl).stage_widths(), vec![71, 39, 23, 7]);
        assert_eq!(Attack::new(AttackVariant::WithFl).guessed_bits(), 96);
        assert_eq!(Attack::new(AttackVariant::NoFl).guessed_bits(), 48);
        assert_eq!(Attack::new(AttackVariant::ToyNoFl).guessed_bits(), 24);
        assert_eq!(Attack::new(AttackVariant::ToyNoFl).m, 4);
    }

    #[test]
    fn guessed_bits_before_key_schedule_step() {
        let a = Attack::new(AttackVariant::WithFl);
        let staged: u32 = a.stages().iter().map(|s| s.fragment_bits()).sum();
        assert_eq!(staged, 87);
    }

    #[test]
    fn variant_names_round_trip() {
        for v in AttackVariant::ALL {
            assert_eq!(v.to_string().parse::<AttackVariant>().unwrap(), v);
        }
        assert!("nope".parse::<AttackVariant>().is_err());
    }
}

#[cfg(test)]
mod equivalence {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn random_guess(a: &Attack, rng: &mut ChaCha8Rng) -> KeyGuess {
        let mut g = KeyGuess::default();
        for spec in a.fragment_specs() {
            let v = rng.random::<u64>() & crate::bits::ones(spec.bits);
            g.push(spec, v).unwrap();
        }
        g
    }

    #[test]
    fn staged_counters_equal_direct_oracle() {
        for v in AttackVariant::ALL {
            let a = Attack::new(v);
            let mut rng = ChaCha8Rng::seed_from_u64(v as u64);
            let key = MasterKey::random(&a.params, &mut rng);
            let pairs = generate_pairs(v, &key, 1 << 12, 5).unwrap();
            let init = a.build_initial_counters(&pairs).unwrap();
            assert_eq!(init.total_mass(), 1 << 12);
            let mut guesses = vec![a.right_guess(&key)];
            guesses.extend((0..3).map(|_| random_guess(&a, &mut rng)));
            for g in &guesses {
                let staged = a.evaluate(&init, g).unwrap();
                assert_eq!(staged, a.naive_parity_oracle(&pairs, g).unwrap(), "{v}");
                assert_eq!(staged.total(), 1 << 12);
            }
        }
    }

    #[test]
    fn fast_basis_path_matches_guess_path() {
        for v in AttackVariant::ALL {
            let a = Attack::new(v);
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            for _ in 0..16 {
                let g = random_guess(&a, &mut rng);
                let vals: Vec<u64> = a.fragment_specs().iter().map(|f| g.get(&f.name).unwrap()).collect();
                let slow = a.basis_entries(&a.complete_guess(&g).unwrap()).unwrap();
                assert_eq!(a.entries_for_values(&vals), slow, "{v}");
            }
        }
    }

    #[test]
    fn duplicate_plaintexts_rejected() {
        let a = Attack::new(AttackVariant::ToyNoFl);
        assert_eq!(a.build_initial_counters(&[(5, 1), (5, 1)]), Err(Error::DuplicatePair(5)));
    }

    #[test]
    fn fold_rejects_wrong_layout_and_widths() {
        let a = Attack::new(AttackVariant::NoFl);
        let init = a.build_initial_counters(&[(1, 2)]).unwrap();
        assert!(matches!(a.partial_sum_fold(&init, &[1 << 16]), Err(Error::WidthMismatch { .. })));
        assert!(matches!(a.partial_sum_fold(&init, &[]), Err(Error::LayoutMismatch(_))));
        let next = a.partial_sum_fold(&init, &[7]).unwrap();
        let mut bogus = next.clone();
        bogus.stage = 0;
        assert!(matches!(a.partial_sum_fold(&bogus, &[7]), Err(Error::LayoutMismatch(_))));
        assert!(a.finalize_counters(&next, &a.right_guess(&MasterKey([0; 8]))).is_err());
    }
}
