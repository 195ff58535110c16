//! Frame encoding and decoding: bits to offset selection, arrangement and
//! symbols, and back from a detected estimate.

use num_complex::Complex64;
use rand::Rng;

use crate::config::{BitBudget, SystemConfig};

use super::combinatorics::{
    combination_rank, combination_unrank, permutation_rank, permutation_unrank,
};
use super::qam::QamConstellation;
use super::{bits_to_u64, u64_to_bits, CodecError};

/// One pulse worth of transmitted content.
#[derive(Debug, Clone, PartialEq)]
pub struct FopimFrame {
    /// Combination rank u of the sorted offset set.
    pub combination_rank: u64,
    /// Permutation rank v of the arrangement.
    pub permutation_rank: u64,
    /// Offset pool index per antenna; all distinct.
    pub offsets: Vec<usize>,
    /// QAM point per antenna.
    pub symbols: Vec<Complex64>,
    /// Constellation label per antenna.
    pub symbol_labels: Vec<usize>,
    /// The source bit string.
    pub bits: Vec<bool>,
}

/// Detected content of one offset slot: which pool index was found, which
/// antenna carried it and which constellation label was decided for it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OffsetEstimate {
    pub offset: usize,
    pub antenna: usize,
    pub symbol_label: usize,
}

/// The detector's view of one frame, one entry per detected offset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameEstimate {
    pub entries: Vec<OffsetEstimate>,
}

/// Frame codec bound to one system configuration.
#[derive(Debug, Clone)]
pub struct ImCodec {
    antennas: usize,
    pool: usize,
    budget: BitBudget,
    constellation: QamConstellation,
}

impl ImCodec {
    pub fn new(cfg: &SystemConfig) -> Result<Self, CodecError> {
        cfg.validate()?;
        Ok(ImCodec {
            antennas: cfg.tx_antennas,
            pool: cfg.pool_size,
            budget: cfg.bit_budget(),
            constellation: QamConstellation::new(cfg.qam_order)?,
        })
    }

    pub fn budget(&self) -> BitBudget {
        self.budget
    }

    pub fn constellation(&self) -> &QamConstellation {
        &self.constellation
    }

    pub fn frame_bits(&self) -> usize {
        self.budget.total_bits()
    }

    pub fn random_bits<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<bool> {
        (0..self.frame_bits()).map(|_| rng.random()).collect()
    }

    /// Antenna indices ordered so that position i holds the antenna carrying
    /// the i-th largest offset.
    fn antennas_by_descending_offset(offsets: &[usize]) -> Vec<usize> {
        let mut order: Vec<usize> = (0..offsets.len()).collect();
        order.sort_by_key(|&a| std::cmp::Reverse(offsets[a]));
        order
    }

    pub fn encode(&self, bits: &[bool]) -> Result<FopimFrame, CodecError> {
        if bits.len() != self.frame_bits() {
            return Err(CodecError::BitLength {
                got: bits.len(),
                expected: self.frame_bits(),
            });
        }
        let n = self.antennas;
        let kc = self.budget.combination_bits;
        let kp = self.budget.permutation_bits;

        let combination = bits_to_u64(&bits[..kc]);
        let permutation = bits_to_u64(&bits[kc..kc + kp]);
        let sorted = combination_unrank(combination, self.pool, n)?;
        let perm = permutation_unrank(permutation, n)?;
        let offsets: Vec<usize> = (0..n).map(|antenna| sorted[perm[antenna]]).collect();

        // The i-th symbol group rides the antenna holding the i-th largest
        // offset.
        let bps = self.constellation.bits_per_symbol();
        let order = Self::antennas_by_descending_offset(&offsets);
        let mut symbol_labels = vec![0usize; n];
        let mut symbols = vec![Complex64::default(); n];
        for (group_index, &antenna) in order.iter().enumerate() {
            let start = self.budget.index_bits() + group_index * bps;
            let label = bits_to_u64(&bits[start..start + bps]) as usize;
            symbol_labels[antenna] = label;
            symbols[antenna] = self.constellation.point(label);
        }

        Ok(FopimFrame {
            combination_rank: combination,
            permutation_rank: permutation,
            offsets,
            symbols,
            symbol_labels,
            bits: bits.to_vec(),
        })
    }

    /// Recover the bit string from a detected estimate. Invalid index
    /// content (combination or permutation rank outside the codebook, or an
    /// antenna collision) falls back to all-zero index bits; constellation
    /// bits are always demapped from the detected labels.
    pub fn decode(&self, estimate: &FrameEstimate) -> Vec<bool> {
        let n = self.antennas;
        let kc = self.budget.combination_bits;
        let kp = self.budget.permutation_bits;

        let mut sorted: Vec<usize> = estimate.entries.iter().map(|e| e.offset).collect();
        sorted.sort_unstable();
        let distinct = sorted.windows(2).all(|w| w[0] < w[1]);

        let mut index_bits: Option<Vec<bool>> = None;
        if distinct && estimate.entries.len() == n {
            if let Ok(combination) = combination_rank(&sorted, self.pool) {
                if combination < (1u64 << kc) {
                    // Arrangement: antenna a carried sorted[perm[a]].
                    let mut perm = vec![usize::MAX; n];
                    let mut valid = true;
                    for entry in &estimate.entries {
                        let slot = sorted.binary_search(&entry.offset).unwrap();
                        if entry.antenna >= n || perm[entry.antenna] != usize::MAX {
                            valid = false;
                            break;
                        }
                        perm[entry.antenna] = slot;
                    }
                    if valid {
                        if let Ok(permutation) = permutation_rank(&perm) {
                            if permutation < (1u64 << kp) {
                                let mut bits = u64_to_bits(combination, kc);
                                bits.extend(u64_to_bits(permutation, kp));
                                index_bits = Some(bits);
                            }
                        }
                    }
                }
            }
        }
        let mut bits = index_bits.unwrap_or_else(|| vec![false; kc + kp]);

        // Symbol on the i-th largest detected offset demaps to group i.
        let mut by_offset_desc = estimate.entries.clone();
        by_offset_desc.sort_by_key(|e| std::cmp::Reverse(e.offset));
        let label_mask = self.constellation.order() - 1;
        for entry in &by_offset_desc {
            bits.extend(self.constellation.label_bits(entry.symbol_label & label_mask));
        }
        // Pad if the estimate was short; decoding stays total.
        bits.resize(self.frame_bits(), false);
        bits
    }

    /// The exact estimate a perfect detector would produce for `frame`.
    pub fn exact_estimate(&self, frame: &FopimFrame) -> FrameEstimate {
        FrameEstimate {
            entries: (0..self.antennas)
                .map(|antenna| OffsetEstimate {
                    offset: frame.offsets[antenna],
                    antenna,
                    symbol_label: frame.symbol_labels[antenna],
                })
                .collect(),
        }
    }
}
