//! Basis masks of the multidimensional distinguishers and the lazily
//! materialised table of subkey-dependent basis entries.

use std::collections::HashMap;
use std::io::Write;
use std::sync::Arc;

use parking_lot::Mutex;
use serde::{Deserialize, Serialize};

use super::{build_zc_family_with_fl_narrow, Family, SubkeyBits};
use crate::bits::{ones, positions};
use crate::cipher::{CipherParams, FlKey, SubkeySchedule};
use crate::error::{Error, Result};

/// Where the `β` support sits inside the left word of a half-block mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Support {
    /// The `short_bits` most significant bits (`β[0-6]` for MISTY1).
    Narrow,
    /// The whole word.
    Wide,
}

impl Support {
    pub fn width(self, params: &CipherParams) -> u32 {
        match self {
            Support::Narrow => params.short_bits,
            Support::Wide => params.word_bits,
        }
    }

    /// Half-block mask `β || 0` with `β` carrying `v` on this support.
    pub fn place(self, params: &CipherParams, v: u32) -> u32 {
        let word = match self {
            Support::Narrow => v << params.long_bits,
            Support::Wide => v,
        };
        word << params.word_bits
    }
}

/// Top `short_bits` of the six key words the narrow with-FL chain depends on:
/// `KL_3 = (K_2, K'_8)`, `KL_5 = (K_3, K'_1)`, `KL_7 = (K_4, K'_2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct InvolvedSubkeys {
    pub k2: u32,
    pub k3: u32,
    pub k4: u32,
    pub kp8: u32,
    pub kp1: u32,
    pub kp2: u32,
}

impl InvolvedSubkeys {
    pub const NAMES: [&'static str; 6] = ["K2", "K3", "K4", "K'8", "K'1", "K'2"];

    pub fn index_bits(params: &CipherParams) -> u32 {
        6 * params.short_bits
    }

    fn words(&self) -> [u32; 6] {
        [self.k2, self.k3, self.k4, self.kp8, self.kp1, self.kp2]
    }

    /// Unpacks `K_2 || K_3 || K_4 || K'_8 || K'_1 || K'_2`, MSB first.
    pub fn from_index(params: &CipherParams, index: u64) -> Self {
        let s = params.short_bits;
        let f = |i: u32| (index >> (s * (5 - i)) & ones(s)) as u32;
        InvolvedSubkeys { k2: f(0), k3: f(1), k4: f(2), kp8: f(3), kp1: f(4), kp2: f(5) }
    }

    pub fn to_index(&self, params: &CipherParams) -> u64 {
        self.words().iter().fold(0u64, |acc, &w| acc << params.short_bits | w as u64)
    }

    pub fn from_schedule(params: &CipherParams, s: &SubkeySchedule) -> Self {
        let top = |v: u32| v >> params.long_bits;
        InvolvedSubkeys {
            k2: top(s.k(2)),
            k3: top(s.k(3)),
            k4: top(s.k(4)),
            kp8: top(s.k_prime(8)),
            kp1: top(s.k_prime(1)),
            kp2: top(s.k_prime(2)),
        }
    }

    /// FL keys for layers 3, 5, 7 with only the involved bits populated.
    pub fn fl_keys(&self, params: &CipherParams) -> (FlKey, FlKey, FlKey) {
        let p = |v: u32| v << params.long_bits;
        (
            FlKey { kl1: p(self.k2), kl2: p(self.kp8) },
            FlKey { kl1: p(self.k3), kl2: p(self.kp1) },
            FlKey { kl1: p(self.k4), kl2: p(self.kp2) },
        )
    }

    pub fn describe(&self, params: &CipherParams) -> Vec<SubkeyBits> {
        let pos = positions(ones(params.short_bits) << params.long_bits, params.word_bits);
        Self::NAMES
            .iter()
            .zip(self.words())
            .map(|(n, v)| SubkeyBits { name: n.to_string(), positions: pos.clone(), value: v })
            .collect()
    }
}

/// `m` unit masks `m_0 .. m_{m-1}` (MSB-first unit vectors) on a support.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisMaskSet {
    pub family: Family,
    pub support: Support,
    pub m: u32,
    pub unit_masks: Vec<u32>,
}

impl BasisMaskSet {
    pub fn new(params: &CipherParams, family: Family, support: Support) -> Result<Self> {
        if family == Family::WithFl && support != Support::Narrow {
            return Err(Error::InvalidParameter("the with-FL basis is defined on the narrow support".into()));
        }
        let m = support.width(params);
        Ok(BasisMaskSet { family, support, m, unit_masks: (0..m).map(|i| 1 << (m - 1 - i)).collect() })
    }

    /// Output masks `β_i` on the right half, as half-block masks.
    pub fn betas(&self, params: &CipherParams) -> Vec<u32> {
        self.unit_masks.iter().map(|&u| self.support.place(params, u)).collect()
    }

    /// Entries `z_i = (m_i || m_i)` of the key-independent family.
    pub fn no_fl_entries(&self) -> Vec<u64> {
        self.unit_masks.iter().map(|&u| (u as u64) << self.m | u as u64).collect()
    }
}

/// Entries `z_i = (m_i || (α_1)_i || (α_2)_i)` for one involved-key value, each
/// part `short_bits` wide.
pub fn t1_entries(params: &CipherParams, keys: &InvolvedSubkeys) -> Vec<u64> {
    let (s, l, w) = (params.short_bits, params.long_bits, params.word_bits);
    (0..s)
        .map(|i| {
            let m_i = 1u32 << (s - 1 - i);
            let a = build_zc_family_with_fl_narrow(params, m_i, keys).expect("unit mask is nonzero");
            let alpha = a.input_mask.0;
            let a1 = alpha >> w >> l;
            let a2 = (alpha & params.word_mask()) >> l;
            ((m_i as u64) << (2 * s)) | (a1 as u64) << s | a2 as u64
        })
        .collect()
}

/// Lookup table from the `6·short_bits`-bit involved-key index to the basis
/// entries. Entries are computed on first use and memoised.
#[derive(Debug)]
pub struct BasisTableT1 {
    params: CipherParams,
    memo: Mutex<HashMap<u64, Arc<[u64]>>>,
}

impl BasisTableT1 {
    pub fn new(params: &CipherParams) -> Self {
        BasisTableT1 { params: params.clone(), memo: Mutex::new(HashMap::new()) }
    }

    /// Eagerly fills the table for the given indices.
    pub fn build(params: &CipherParams, indices: impl IntoIterator<Item = u64>) -> Self {
        let t = Self::new(params);
        for i in indices {
            t.get(i);
        }
        t
    }

    pub fn get(&self, index: u64) -> Arc<[u64]> {
        if let Some(e) = self.memo.lock().get(&index) {
            return e.clone();
        }
        let entry: Arc<[u64]> = t1_entries(&self.params, &InvolvedSubkeys::from_index(&self.params, index)).into();
        self.memo.lock().entry(index).or_insert(entry).clone()
    }

    pub fn len(&self) -> usize {
        self.memo.lock().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Writes `subkey, z0, .., z{m-1}` rows in hex for the given indices.
    pub fn export_csv<W: Write>(&self, out: W, indices: impl IntoIterator<Item = u64>) -> Result<()> {
        let m = self.params.short_bits as usize;
        let key_digits = InvolvedSubkeys::index_bits(&self.params).div_ceil(4) as usize;
        let z_digits = (3 * self.params.short_bits).div_ceil(4) as usize;
        let mut wtr = csv::Writer::from_writer(out);
        let mut header = vec!["subkey".to_string()];
        header.extend((0..m).map(|i| format!("z{i}")));
        wtr.write_record(&header).map_err(|e| Error::Parse(e.to_string()))?;
        for idx in indices {
            let mut row = vec![format!("{idx:0key_digits$x}")];
            row.extend(self.get(idx).iter().map(|z| format!("{z:0z_digits$x}")));
            wtr.write_record(&row).map_err(|e| Error::Parse(e.to_string()))?;
        }
        wtr.flush().map_err(|e| Error::Parse(e.to_string()))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cipher::MasterKey;
    use crate::mask::fl_bar_chain;

    #[test]
    fn index_round_trip() {
        let p = CipherParams::misty1();
        for idx in [0u64, 1, 0x2aa_aaaa_aaaa, ones(42)] {
            assert_eq!(InvolvedSubkeys::from_index(&p, idx).to_index(&p), idx);
        }
        let k = InvolvedSubkeys::from_index(&p, 0x7f << 35);
        assert_eq!(k.k2, 0x7f);
        assert_eq!(k.kp2, 0);
    }

    #[test]
    fn zero_entry_is_trivial_chain() {
        let p = CipherParams::misty1();
        let t = BasisTableT1::new(&p);
        let e = t.get(0);
        // With zero keys each FL̄ maps (β, β') to (β, β ⊕ β'): three times gives (β, β).
        for (i, z) in e.iter().enumerate() {
            let m = 1u64 << (6 - i);
            assert_eq!(*z, m << 14 | m << 7 | m);
        }
    }

    #[test]
    fn toy_table_matches_direct_chain() {
        let p = CipherParams::toy();
        let bits = InvolvedSubkeys::index_bits(&p);
        let t = BasisTableT1::build(&p, 0..1 << bits);
        assert_eq!(t.len(), 64);
        let s = SubkeySchedule::new(&p, &MasterKey([3, 9, 12, 5, 1, 14, 7, 10]));
        let keys = InvolvedSubkeys::from_schedule(&p, &s);
        let entry = t.get(keys.to_index(&p));
        let beta = Support::Narrow.place(&p, 1);
        let alpha = fl_bar_chain(&p, beta, &s.fl_key(3), &s.fl_key(5), &s.fl_key(7));
        assert_eq!(entry[0], 1 << 2 | ((alpha >> 7) as u64 & 1) << 1 | (alpha >> 3) as u64 & 1);
    }

    #[test]
    fn csv_export() {
        let p = CipherParams::misty1();
        let t = BasisTableT1::new(&p);
        let mut buf = Vec::new();
        t.export_csv(&mut buf, [0u64, 5]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "subkey,z0,z1,z2,z3,z4,z5,z6");
        assert!(lines.next().unwrap().starts_with("00000000000,"));
        assert_eq!(lines.count(), 1);
    }

    #[test]
    fn basis_masks_are_independent_units() {
        let p = CipherParams::misty1();
        let b = BasisMaskSet::new(&p, Family::NoFl, Support::Narrow).unwrap();
        assert_eq!(b.m, 7);
        assert_eq!(b.unit_masks, vec![64, 32, 16, 8, 4, 2, 1]);
        assert_eq!(b.betas(&p)[0], 1 << 31);
        assert_eq!(b.no_fl_entries()[6], 1 << 7 | 1);
        assert!(BasisMaskSet::new(&p, Family::WithFl, Support::Wide).is_err());
        let t = BasisMaskSet::new(&CipherParams::toy(), Family::NoFl, Support::Wide).unwrap();
        assert_eq!(t.betas(&CipherParams::toy()), vec![0x80, 0x40, 0x20, 0x10]);
    }
}
