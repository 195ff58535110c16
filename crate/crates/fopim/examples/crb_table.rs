//! Root estimation bounds versus frequency increment and pool size: range
//! information grows with occupied bandwidth while the angle bound stays
//! put.
//!
//! Run with: cargo run --example crb_table

use fopim::config::SystemConfig;
use fopim::crb;
use fopim::im_codec::ImCodec;
use fopim::rng::trial_rng;
use fopim::sensing::SensingScenario;
use num_complex::Complex64;

fn average_bounds(cfg: &SystemConfig, scenarios: usize, seed: u64) -> (f64, f64) {
    let codec = ImCodec::new(cfg).unwrap();
    let mut range = 0.0;
    let mut angle = 0.0;
    for s in 0..scenarios {
        let mut rng = trial_rng(seed, s as u64, 0);
        let pulse_offsets = (0..cfg.pulses_per_cpi)
            .map(|_| codec.encode(&codec.random_bits(&mut rng)).unwrap().offsets)
            .collect();
        let scenario = SensingScenario {
            target_angle_rad: 15f64.to_radians(),
            target_range_m: 3007.0,
            reflection: Complex64::new(1.0, 0.0),
            coarse_range_m: 3000.0,
            pulse_offsets,
        };
        let result = crb::fim(&scenario, cfg).unwrap();
        range += result.crb_range;
        angle += result.crb_angle;
    }
    (
        (range / scenarios as f64).sqrt(),
        (angle / scenarios as f64).sqrt().to_degrees(),
    )
}

fn main() {
    println!(
        "{:>12} {:>8} {:>18} {:>18}",
        "df_mhz", "pool", "root_crb_range_m", "root_crb_angle_deg"
    );
    for df_mhz in [2.0f64, 4.0, 6.0] {
        let mut cfg = SystemConfig::new(6, 6, 3, 7, 4).with_sensing_snr_db(0.0);
        cfg.freq_increment_hz = df_mhz * 1e6;
        cfg.pulses_per_cpi = 100;
        let (range, angle) = average_bounds(&cfg, 30, 91);
        println!("{df_mhz:>12} {:>8} {range:>18.4e} {angle:>18.4e}", 7);
    }
    for pool in [7usize, 9, 11] {
        let mut cfg = SystemConfig::new(6, 6, 3, pool, 4).with_sensing_snr_db(0.0);
        cfg.pulses_per_cpi = 100;
        let (range, angle) = average_bounds(&cfg, 30, 92);
        println!("{:>12} {pool:>8} {range:>18.4e} {angle:>18.4e}", 2.0);
    }
}
