//! Packed counter states for the partial-sum stages.

use serde::Serialize;

use crate::bits::ones;
use crate::error::{Error, Result};

/// Upper bound on fields per stage.
pub const MAX_FIELDS: usize = 8;

/// Unpacked field values of one cell, in layout order.
pub type Fields = [u64; MAX_FIELDS];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Field {
    pub name: String,
    pub bits: u32,
}

/// Ordered `(name, width)` list; the first field is the most significant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageLayout {
    pub fields: Vec<Field>,
}

impl StageLayout {
    pub fn new(fields: &[(&str, u32)]) -> Self {
        assert!(fields.len() <= MAX_FIELDS);
        StageLayout { fields: fields.iter().map(|&(n, b)| Field { name: n.to_string(), bits: b }).collect() }
    }

    pub fn total_bits(&self) -> u32 {
        self.fields.iter().map(|f| f.bits).sum()
    }

    #[inline]
    pub fn pack(&self, values: &[u64]) -> u128 {
        let mut acc = 0u128;
        for (f, &v) in self.fields.iter().zip(values) {
            debug_assert!(v <= ones(f.bits), "{} = {v:#x} exceeds {} bits", f.name, f.bits);
            acc = acc << f.bits | v as u128;
        }
        acc
    }

    #[inline]
    pub fn unpack(&self, mut packed: u128) -> Fields {
        let mut out = [0u64; MAX_FIELDS];
        for (i, f) in self.fields.iter().enumerate().rev() {
            out[i] = (packed & ((1u128 << f.bits) - 1)) as u64;
            packed >>= f.bits;
        }
        out
    }

    pub fn check(&self, values: &[u64]) -> Result<()> {
        if values.len() != self.fields.len() {
            return Err(Error::LayoutMismatch(format!("{} values for {} fields", values.len(), self.fields.len())));
        }
        for (f, &v) in self.fields.iter().zip(values) {
            if v > ones(f.bits) {
                return Err(Error::LayoutMismatch(format!("{} = {v:#x} exceeds {} bits", f.name, f.bits)));
            }
        }
        Ok(())
    }
}

/// Sparse counters over a layout: distinct packed cells in ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageState {
    pub stage: usize,
    pub layout: StageLayout,
    pub cells: Vec<(u128, u64)>,
}

/// Largest layout counted densely during aggregation.
const DENSE_LIMIT_BITS: u32 = 20;

impl StageState {
    pub fn empty(stage: usize, layout: StageLayout) -> Self {
        StageState { stage, layout, cells: Vec::new() }
    }

    /// Aggregates `(cell, count)` items into a canonical sorted state.
    pub fn collect(stage: usize, layout: StageLayout, items: impl IntoIterator<Item = (u128, u64)>) -> Self {
        let cells = if layout.total_bits() <= DENSE_LIMIT_BITS {
            let mut dense = vec![0u64; 1 << layout.total_bits()];
            for (k, c) in items {
                dense[k as usize] += c;
            }
            dense.into_iter().enumerate().filter(|&(_, c)| c != 0).map(|(k, c)| (k as u128, c)).collect()
        } else {
            let mut v: Vec<(u128, u64)> = items.into_iter().collect();
            v.sort_unstable_by_key(|&(k, _)| k);
            let mut out: Vec<(u128, u64)> = Vec::with_capacity(v.len());
            for (k, c) in v {
                match out.last_mut() {
                    Some(last) if last.0 == k => last.1 += c,
                    _ => out.push((k, c)),
                }
            }
            out.retain(|&(_, c)| c != 0);
            out
        };
        StageState { stage, layout, cells }
    }

    pub fn total_mass(&self) -> u64 {
        self.cells.iter().map(|&(_, c)| c).sum()
    }

    pub fn populated(&self) -> usize {
        self.cells.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pack_round_trip() {
        let l = StageLayout::new(&[("a", 16), ("b", 7), ("c", 16), ("d", 7)]);
        assert_eq!(l.total_bits(), 46);
        let v = [0xbeef, 0x55, 0x1234, 0x7f];
        let p = l.pack(&v);
        assert_eq!(&l.unpack(p)[..4], &v);
        assert!(l.check(&[0x1_0000, 0, 0, 0]).is_err());
        assert!(l.check(&[0, 0]).is_err());
    }

    #[test]
    fn collect_merges_duplicates() {
        for bits in [8, 40] {
            let l = StageLayout::new(&[("x", bits)]);
            let s = StageState::collect(0, l, [(3u128, 1u64), (1, 2), (3, 4), (2, 0)]);
            assert_eq!(s.cells, vec![(1, 2), (3, 5)]);
            assert_eq!(s.total_mass(), 7);
        }
    }
}
