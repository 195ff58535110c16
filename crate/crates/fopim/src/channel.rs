//! Frequency-selective Rayleigh block-fading channel and synthesis of the
//! matched-filter-bank outputs seen at the communication user.
//!
//! The channel is one L x (N*P) matrix per pulse: block p holds the L x N
//! coefficients of pool offset p, so the column serving antenna n on offset
//! p is column `n + N * p`. Filter p of the bank carries a signal term only
//! when some antenna transmitted offset p; every element also picks up
//! complex Gaussian noise of variance N0 / P.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::config::{SystemConfig, SPEED_OF_LIGHT};
use crate::im_codec::FopimFrame;
use crate::rng::complex_gaussian;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChannelError {
    #[error("offset index {offset} outside pool of size {pool}")]
    OffsetOutOfPool { offset: usize, pool: usize },
}

/// One pulse's channel draw.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// L x (N*P) i.i.d. complex Gaussian coefficients.
    pub gains: DMatrix<Complex64>,
    /// Per-entry variance.
    pub tap_variance: f64,
}

impl ChannelRealization {
    /// Column serving `antenna` when it transmits pool offset `offset`.
    pub fn column_for(&self, antenna: usize, offset: usize, antennas: usize) -> DVector<Complex64> {
        self.gains.column(antenna + antennas * offset).into_owned()
    }
}

/// Matched-filter bank outputs for one pulse: L x P, plus the per-element
/// noise variance that was applied.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBankOutput {
    pub outputs: DMatrix<Complex64>,
    pub noise_variance: f64,
}

/// Draw the block-fading channel for one pulse.
pub fn draw_channel<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> ChannelRealization {
    let rows = cfg.comm_rx_antennas;
    let cols = cfg.tx_antennas * cfg.pool_size;
    let gains = DMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng, cfg.tap_variance));
    ChannelRealization {
        gains,
        tap_variance: cfg.tap_variance,
    }
}

/// Gather the effective L x N channel for a frame: column n is the channel
/// column addressed by antenna n's offset.
pub fn effective_channel(
    channel: &ChannelRealization,
    offsets: &[usize],
    cfg: &SystemConfig,
) -> Result<DMatrix<Complex64>, ChannelError> {
    let n = cfg.tx_antennas;
    let mut out = DMatrix::zeros(cfg.comm_rx_antennas, n);
    for (antenna, &offset) in offsets.iter().enumerate() {
        if offset >= cfg.pool_size {
            return Err(ChannelError::OffsetOutOfPool {
                offset,
                pool: cfg.pool_size,
            });
        }
        out.set_column(antenna, &channel.gains.column(antenna + n * offset));
    }
    Ok(out)
}

/// Deterministic unit-modulus carrier phase picked up between antenna
/// `antenna` and the user when transmitting pool offset `offset`:
/// exp(-j 2 pi (f_c + offset * df) tau_n) with
/// tau_n = (R_C - n d_1 sin(theta_C)) / c.
pub fn comm_phase(antenna: usize, offset: usize, cfg: &SystemConfig) -> Complex64 {
    let tau = (cfg.user_range_m
        - antenna as f64 * cfg.tx_spacing_m * cfg.user_angle_rad.sin())
        / SPEED_OF_LIGHT;
    let angle = -2.0 * std::f64::consts::PI * (cfg.carrier_hz + cfg.offset_hz(offset)) * tau;
    Complex64::from_polar(1.0, angle)
}

/// Synthesize the filter-bank outputs for one frame over one pulse.
pub fn synth_filter_bank<R: Rng + ?Sized>(
    channel: &ChannelRealization,
    frame: &FopimFrame,
    cfg: &SystemConfig,
    rng: &mut R,
    noiseless: bool,
) -> FilterBankOutput {
    let l = cfg.comm_rx_antennas;
    let p = cfg.pool_size;
    let n = cfg.tx_antennas;
    let amplitude = (cfg.total_power / n as f64).sqrt();
    let noise_variance = cfg.filter_noise_variance();

    let mut outputs = DMatrix::<Complex64>::zeros(l, p);
    for (antenna, &offset) in frame.offsets.iter().enumerate() {
        let gain = amplitude * comm_phase(antenna, offset, cfg) * frame.symbols[antenna];
        let column = channel.gains.column(antenna + n * offset);
        for row in 0..l {
            outputs[(row, offset)] = gain * column[row];
        }
    }
    if !noiseless {
        for col in 0..p {
            for row in 0..l {
                outputs[(row, col)] += complex_gaussian(rng, noise_variance);
            }
        }
    }
    FilterBankOutput {
        outputs,
        noise_variance,
    }
}
