//! Bit-level codec for frequency-offset permutation index modulation.
//!
//! A payload of `combination_bits + permutation_bits + constellation_bits`
//! bits per pulse is mapped onto (a) which offsets are drawn from the pool,
//! (b) how they are arranged over the transmit antennas and (c) one QAM
//! symbol per antenna. The combination codebook is the lexicographically
//! first `2^combination_bits` subsets; arrangements use the factorial number
//! system.

pub mod combinatorics;
pub mod frame;
pub mod qam;
pub mod rates;

pub use combinatorics::{
    combination_rank, combination_unrank, permutation_rank, permutation_unrank,
};
pub use frame::{FopimFrame, FrameEstimate, ImCodec, OffsetEstimate};
pub use qam::QamConstellation;
pub use rates::{bits_per_pulse, RateScheme};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("rank {rank} out of range for {space} of size {size}")]
    RankOutOfRange {
        rank: u64,
        space: &'static str,
        size: u64,
    },
    #[error("subset must be sorted ascending with distinct elements")]
    SubsetNotSorted,
    #[error("subset element {element} outside pool of size {pool}")]
    ElementOutOfPool { element: usize, pool: usize },
    #[error("subset length {got} does not match expected {expected}")]
    SubsetLength { got: usize, expected: usize },
    #[error("input is not a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error("bit string length {got} does not match frame length {expected}")]
    BitLength { got: usize, expected: usize },
    #[error("bit group length {got} does not match symbol size {expected}")]
    GroupLength { got: usize, expected: usize },
    #[error("QAM order {0} is not a power of two of at least 2")]
    BadOrder(usize),
    #[error("scheme parameters invalid: {0}")]
    BadScheme(String),
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
}

/// Interpret a bit slice as an unsigned integer, most significant bit first.
pub fn bits_to_u64(bits: &[bool]) -> u64 {
    debug_assert!(bits.len() <= 64);
    bits.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b))
}

/// Expand an unsigned integer into `len` bits, most significant bit first.
pub fn u64_to_bits(value: u64, len: usize) -> Vec<bool> {
    debug_assert!(len == 64 || value >> len == 0);
    (0..len).map(|i| (value >> (len - 1 - i)) & 1 == 1).collect()
}
