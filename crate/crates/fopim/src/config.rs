//! System-wide parameter set shared by the codec, channel, detectors, sensing
//! chain and bound evaluators.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::im_codec::combinatorics::{binomial, factorial, floor_log2};

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("transmit antenna count must be at least 1")]
    NoTransmitAntennas,
    #[error("frequency offset pool size {pool} must exceed transmit antenna count {antennas}")]
    PoolTooSmall { pool: usize, antennas: usize },
    #[error("QAM order {0} must be a power of two of at least 2")]
    BadQamOrder(usize),
    #[error("frequency increment must be positive")]
    BadFrequencyIncrement,
    #[error("receive antenna counts must be at least 1")]
    NoReceiveAntennas,
    #[error("{0} must be positive")]
    NonPositive(&'static str),
}

/// Bit budget implied by a [`SystemConfig`].
///
/// The per-pulse payload splits into index bits (offset combination plus
/// offset permutation) and constellation bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitBudget {
    /// Bits selecting the offset combination out of the pool.
    pub combination_bits: usize,
    /// Bits selecting the arrangement of the chosen offsets over antennas.
    pub permutation_bits: usize,
    /// Bits carried by the QAM symbols.
    pub constellation_bits: usize,
}

impl BitBudget {
    pub fn index_bits(&self) -> usize {
        self.combination_bits + self.permutation_bits
    }

    pub fn total_bits(&self) -> usize {
        self.index_bits() + self.constellation_bits
    }
}

/// All scalar parameters of the simulated link.
///
/// Angles are stored in radians, distances in meters, frequencies in Hz and
/// powers in linear (unitless) scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Transmit antenna count N.
    pub tx_antennas: usize,
    /// Sensing receive antenna count M.
    pub sensing_rx_antennas: usize,
    /// Communication receive antenna count L.
    pub comm_rx_antennas: usize,
    /// Frequency offset pool size P (must exceed `tx_antennas`).
    pub pool_size: usize,
    /// QAM order J.
    pub qam_order: usize,
    /// Frequency increment between pool entries, Hz.
    pub freq_increment_hz: f64,
    /// Carrier frequency, Hz.
    pub carrier_hz: f64,
    /// Total transmit power.
    pub total_power: f64,
    /// Per-entry channel tap variance.
    pub tap_variance: f64,
    /// Total communication noise power N0 (split over the filter bank).
    pub comm_noise_power: f64,
    /// Per-element sensing noise power N1.
    pub sensing_noise_power: f64,
    /// Transmit element spacing, m.
    pub tx_spacing_m: f64,
    /// Sensing receive element spacing, m.
    pub sensing_rx_spacing_m: f64,
    /// Communication user range, m.
    pub user_range_m: f64,
    /// Communication user angle, rad.
    pub user_angle_rad: f64,
    /// Pulses per coherent processing interval.
    pub pulses_per_cpi: usize,
}

impl SystemConfig {
    /// Baseline configuration: unit transmit power, 10 GHz carrier, 2 MHz
    /// frequency increment, half-wavelength element spacing, the user at
    /// (300 m, 60 deg) and a 200-pulse CPI. Noise powers default to their
    /// 0 dB SNR values and are normally overridden per experiment point.
    pub fn new(
        tx_antennas: usize,
        sensing_rx_antennas: usize,
        comm_rx_antennas: usize,
        pool_size: usize,
        qam_order: usize,
    ) -> Self {
        let carrier_hz = 10.0e9;
        let half_wavelength = 0.5 * SPEED_OF_LIGHT / carrier_hz;
        SystemConfig {
            tx_antennas,
            sensing_rx_antennas,
            comm_rx_antennas,
            pool_size,
            qam_order,
            freq_increment_hz: 2.0e6,
            carrier_hz,
            total_power: 1.0,
            tap_variance: 1.0,
            comm_noise_power: 1.0,
            sensing_noise_power: 1.0 / tx_antennas.max(1) as f64,
            tx_spacing_m: half_wavelength,
            sensing_rx_spacing_m: half_wavelength,
            user_range_m: 300.0,
            user_angle_rad: 60f64.to_radians(),
            pulses_per_cpi: 200,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.tx_antennas == 0 {
            return Err(ConfigError::NoTransmitAntennas);
        }
        if self.pool_size <= self.tx_antennas {
            return Err(ConfigError::PoolTooSmall {
                pool: self.pool_size,
                antennas: self.tx_antennas,
            });
        }
        if self.qam_order < 2 || !self.qam_order.is_power_of_two() {
            return Err(ConfigError::BadQamOrder(self.qam_order));
        }
        if self.freq_increment_hz.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(ConfigError::BadFrequencyIncrement);
        }
        if self.sensing_rx_antennas == 0 || self.comm_rx_antennas == 0 {
            return Err(ConfigError::NoReceiveAntennas);
        }
        for (name, v) in [
            ("carrier frequency", self.carrier_hz),
            ("comm noise power", self.comm_noise_power),
            ("sensing noise power", self.sensing_noise_power),
        ] {
            if v.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
                return Err(ConfigError::NonPositive(name));
            }
        }
        // Zero transmit power is a legal degenerate case (pure-noise links).
        if !self.total_power.is_finite() || self.total_power < 0.0 {
            return Err(ConfigError::NonPositive("total power"));
        }
        Ok(())
    }

    /// Carrier wavelength in meters.
    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }

    /// Bits per QAM symbol, log2(J).
    pub fn bits_per_symbol(&self) -> usize {
        self.qam_order.trailing_zeros() as usize
    }

    /// Derived bit budget for one pulse.
    pub fn bit_budget(&self) -> BitBudget {
        let n = self.tx_antennas as u64;
        let combos = binomial(self.pool_size as u64, n);
        BitBudget {
            combination_bits: floor_log2(combos) as usize,
            permutation_bits: floor_log2(factorial(n)) as usize,
            constellation_bits: self.tx_antennas * self.bits_per_symbol(),
        }
    }

    /// Offset value in Hz for a pool index.
    pub fn offset_hz(&self, pool_index: usize) -> f64 {
        pool_index as f64 * self.freq_increment_hz
    }

    /// Per-filter noise variance N0 / P at the communication receiver.
    pub fn filter_noise_variance(&self) -> f64 {
        self.comm_noise_power / self.pool_size as f64
    }

    /// Communication SNR definition: total power over total noise power.
    pub fn with_comm_snr_db(mut self, snr_db: f64) -> Self {
        self.comm_noise_power = self.total_power / 10f64.powf(snr_db / 10.0);
        self
    }

    /// Sensing SNR definition: per-antenna power over per-element noise.
    pub fn with_sensing_snr_db(mut self, snr_db: f64) -> Self {
        self.sensing_noise_power =
            self.total_power / (self.tx_antennas as f64 * 10f64.powf(snr_db / 10.0));
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_matches_hand_computation() {
        // C(7,6)=7 -> 2 bits, 6! = 720 -> 9 bits, 6*log2(4) = 12 bits.
        let cfg = SystemConfig::new(6, 6, 3, 7, 4);
        let b = cfg.bit_budget();
        assert_eq!(b.combination_bits, 2);
        assert_eq!(b.permutation_bits, 9);
        assert_eq!(b.constellation_bits, 12);
        assert_eq!(b.total_bits(), 23);
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        assert!(SystemConfig::new(6, 6, 3, 6, 4).validate().is_err());
        assert!(SystemConfig::new(6, 6, 3, 7, 12).validate().is_err());
        assert!(SystemConfig::new(0, 6, 3, 7, 4).validate().is_err());
        let mut cfg = SystemConfig::new(6, 6, 3, 7, 4);
        cfg.freq_increment_hz = 0.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn snr_setters_follow_definitions() {
        let cfg = SystemConfig::new(6, 6, 3, 7, 4).with_comm_snr_db(10.0);
        assert!((cfg.comm_noise_power - 0.1).abs() < 1e-15);
        let cfg = cfg.with_sensing_snr_db(0.0);
        assert!((cfg.sensing_noise_power - 1.0 / 6.0).abs() < 1e-15);
    }
}
