//! Bits-per-pulse formulas for the compared modulation schemes.

use crate::config::SystemConfig;

use super::combinatorics::{binomial, factorial, floor_log2};
use super::CodecError;

/// Scheme selector for [`bits_per_pulse`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateScheme {
    /// Offset combination + permutation + per-antenna QAM.
    Fopim,
    /// Offset combination + per-antenna QAM (no permutation bits).
    Foim,
    /// Spatial multiplexing only: QAM on every antenna.
    Mimo,
    /// Joint antenna-selection / offset-selection / permutation scheme with
    /// `active` transmitting antennas.
    Frac { active: usize },
    /// Index bits only: offset combination + permutation, one distinct
    /// frequency per antenna, no constellation payload.
    MajorcomStyle,
}

/// Per-pulse bit count of `scheme` under `cfg`.
pub fn bits_per_pulse(scheme: RateScheme, cfg: &SystemConfig) -> Result<u64, CodecError> {
    cfg.validate()?;
    let n = cfg.tx_antennas as u64;
    let p = cfg.pool_size as u64;
    let j_bits = cfg.bits_per_symbol() as u64;
    let combo_bits = u64::from(floor_log2(binomial(p, n)));
    let perm_bits = u64::from(floor_log2(factorial(n)));
    match scheme {
        RateScheme::Fopim => Ok(n * j_bits + combo_bits + perm_bits),
        RateScheme::Foim => Ok(n * j_bits + combo_bits),
        RateScheme::Mimo => Ok(n * j_bits),
        RateScheme::Frac { active } => {
            if active == 0 || active as u64 > n {
                return Err(CodecError::BadScheme(format!(
                    "active antenna count {active} must be in 1..={n}"
                )));
            }
            let n1 = active as u64;
            Ok(u64::from(floor_log2(binomial(n, n1)))
                + u64::from(floor_log2(binomial(p, n1)))
                + u64::from(floor_log2(factorial(n1)))
                + n1 * j_bits)
        }
        RateScheme::MajorcomStyle => Ok(combo_bits + perm_bits),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_rates() {
        let cfg = SystemConfig::new(6, 6, 3, 7, 4);
        assert_eq!(bits_per_pulse(RateScheme::Fopim, &cfg).unwrap(), 23);
        assert_eq!(bits_per_pulse(RateScheme::Mimo, &cfg).unwrap(), 12);
        let cfg8 = SystemConfig::new(6, 6, 3, 7, 8);
        assert_eq!(bits_per_pulse(RateScheme::Foim, &cfg8).unwrap(), 20);
    }

    #[test]
    fn frac_with_all_antennas_active_equals_fopim() {
        for (n, p, j) in [(4usize, 5usize, 4usize), (6, 7, 4), (6, 9, 16), (8, 9, 4)] {
            let cfg = SystemConfig::new(n, n, 3, p, j);
            assert_eq!(
                bits_per_pulse(RateScheme::Frac { active: n }, &cfg).unwrap(),
                bits_per_pulse(RateScheme::Fopim, &cfg).unwrap()
            );
        }
    }

    #[test]
    fn fopim_dominates_foim_and_frac() {
        for n in 2..=8usize {
            for p in (n + 1)..=(n + 3) {
                for j in [4usize, 16] {
                    let cfg = SystemConfig::new(n, n, 3, p, j);
                    let fopim = bits_per_pulse(RateScheme::Fopim, &cfg).unwrap();
                    assert!(fopim >= bits_per_pulse(RateScheme::Foim, &cfg).unwrap());
                    for active in 1..=n {
                        let frac =
                            bits_per_pulse(RateScheme::Frac { active }, &cfg).unwrap();
                        assert!(
                            fopim >= frac,
                            "N={n} P={p} J={j} N1={active}: {fopim} < {frac}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn invalid_active_count_rejected() {
        let cfg = SystemConfig::new(4, 4, 3, 5, 4);
        assert!(bits_per_pulse(RateScheme::Frac { active: 0 }, &cfg).is_err());
        assert!(bits_per_pulse(RateScheme::Frac { active: 5 }, &cfg).is_err());
    }
}
