//! Zero-correlation linear cryptanalysis of MISTY1.
//!
//! The crate contains a bit-exact MISTY1 with configurable round ranges and FL
//! placement, a 16-bit toy cipher of the same shape, mask-propagation checks,
//! the zero-correlation distinguisher families, the chi-squared statistic and
//! both partial-sum key-recovery attacks on seven rounds.

pub mod attack;
pub mod bits;
pub mod cipher;
pub mod distinguisher;
pub mod error;
pub mod mask;
pub mod report;
pub mod stats;

pub use cipher::{Cipher, CipherParams, FlKey, FlLayers, FoKey, MasterKey, RoundKeys, SubkeySchedule, Variant};
pub use error::{Error, Result};
