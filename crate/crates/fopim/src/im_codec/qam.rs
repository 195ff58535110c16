//! Rectangular QAM with independent Gray labeling per PAM axis and unit
//! average symbol energy.

use num_complex::Complex64;

use super::{bits_to_u64, u64_to_bits, CodecError};

pub fn gray_encode(x: usize) -> usize {
    x ^ (x >> 1)
}

pub fn gray_decode(mut g: usize) -> usize {
    let mut x = 0;
    while g != 0 {
        x ^= g;
        g >>= 1;
    }
    x
}

/// A J = mu x eta rectangular constellation. Labels put the in-phase bits
/// first; each axis carries a binary-reflected Gray code over its PAM levels.
#[derive(Debug, Clone)]
pub struct QamConstellation {
    order: usize,
    i_levels: usize,
    q_levels: usize,
    i_bits: usize,
    q_bits: usize,
    scale: f64,
    points: Vec<Complex64>,
}

impl QamConstellation {
    pub fn new(order: usize) -> Result<Self, CodecError> {
        if order < 2 || !order.is_power_of_two() {
            return Err(CodecError::BadOrder(order));
        }
        let bits = order.trailing_zeros() as usize;
        let i_bits = bits.div_ceil(2);
        let q_bits = bits / 2;
        let i_levels = 1usize << i_bits;
        let q_levels = 1usize << q_bits;
        // Unit average energy over uniformly drawn labels.
        let scale = (3.0 / ((i_levels * i_levels + q_levels * q_levels) as f64 - 2.0)).sqrt();
        let points = (0..order)
            .map(|label| {
                let i_index = gray_decode(label >> q_bits);
                let q_index = gray_decode(label & (q_levels - 1));
                Complex64::new(
                    scale * (2.0 * i_index as f64 - (i_levels as f64 - 1.0)),
                    scale * (2.0 * q_index as f64 - (q_levels as f64 - 1.0)),
                )
            })
            .collect();
        Ok(QamConstellation {
            order,
            i_levels,
            q_levels,
            i_bits,
            q_bits,
            scale,
            points,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.i_bits + self.q_bits
    }

    /// PAM level counts (mu, eta) of the two axes.
    pub fn axis_levels(&self) -> (usize, usize) {
        (self.i_levels, self.q_levels)
    }

    /// Half the minimum distance between neighboring points,
    /// g = sqrt(3 / (mu^2 + eta^2 - 2)).
    pub fn min_distance_param(&self) -> f64 {
        self.scale
    }

    pub fn point(&self, label: usize) -> Complex64 {
        self.points[label]
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn map_bits(&self, group: &[bool]) -> Result<Complex64, CodecError> {
        if group.len() != self.bits_per_symbol() {
            return Err(CodecError::GroupLength {
                got: group.len(),
                expected: self.bits_per_symbol(),
            });
        }
        Ok(self.points[bits_to_u64(group) as usize])
    }

    /// Nearest-point decision, independent per axis.
    pub fn demap_hard(&self, observation: Complex64) -> usize {
        let snap = |value: f64, levels: usize| -> usize {
            let idx = ((value / self.scale + (levels as f64 - 1.0)) / 2.0).round();
            (idx.max(0.0) as usize).min(levels - 1)
        };
        let i_index = snap(observation.re, self.i_levels);
        let q_index = snap(observation.im, self.q_levels);
        (gray_encode(i_index) << self.q_bits) | gray_encode(q_index)
    }

    pub fn label_bits(&self, label: usize) -> Vec<bool> {
        u64_to_bits(label as u64, self.bits_per_symbol())
    }
}
