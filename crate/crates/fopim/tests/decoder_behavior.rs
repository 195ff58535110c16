//! Monte Carlo behavior of the two decoders: diversity ordering, SNR
//! monotonicity and agreement with the independent reference decoder.

mod common;

use fopim::channel::{draw_channel, synth_filter_bank};
use fopim::comm_rx::{ml_decode, mltsd_decode};
use fopim::config::SystemConfig;
use fopim::im_codec::ImCodec;
use fopim::rng::trial_rng;

fn mltsd_ber(cfg: &SystemConfig, frames: u64, seed: u64) -> (f64, f64) {
    let codec = ImCodec::new(cfg).unwrap();
    let bits_per_frame = codec.frame_bits() as f64;
    let mut rng = trial_rng(seed, 0, 0);
    let mut errors = 0u64;
    let mut errors_sq = 0u64;
    for _ in 0..frames {
        let bits = codec.random_bits(&mut rng);
        let frame = codec.encode(&bits).unwrap();
        let channel = draw_channel(cfg, &mut rng);
        let bank = synth_filter_bank(&channel, &frame, cfg, &mut rng, false);
        let outcome = mltsd_decode(&bank, &channel, cfg, &codec);
        let e = outcome
            .bits
            .iter()
            .zip(bits.iter())
            .filter(|(a, b)| a != b)
            .count() as u64;
        errors += e;
        errors_sq += e * e;
    }
    let n = frames as f64;
    let mean = errors as f64 / n;
    let variance = (errors_sq as f64 - n * mean * mean) / (n - 1.0);
    (mean / bits_per_frame, (variance / n).sqrt() / bits_per_frame)
}

#[test]
fn receive_diversity_orders_the_error_rate() {
    // More receive antennas, fewer errors, with clear separation at 10 dB.
    let mut rates = Vec::new();
    for l in [1usize, 3, 6] {
        let cfg = SystemConfig::new(6, 6, l, 7, 4).with_comm_snr_db(10.0);
        rates.push(mltsd_ber(&cfg, 20_000, 600 + l as u64));
    }
    let (r1, s1) = rates[0];
    let (r3, s3) = rates[1];
    let (r6, s6) = rates[2];
    assert!(r6 + 3.0 * (s6 + s3) < r3, "L=6 {r6} vs L=3 {r3}");
    assert!(r3 + 3.0 * (s3 + s1) < r1, "L=3 {r3} vs L=1 {r1}");
}

#[test]
fn error_rate_is_monotone_in_snr() {
    let mut previous = (1.0f64, 0.0f64);
    for (i, snr_db) in [0.0f64, 5.0, 10.0, 15.0, 20.0].into_iter().enumerate() {
        let cfg = SystemConfig::new(6, 6, 3, 7, 4).with_comm_snr_db(snr_db);
        let (rate, se) = mltsd_ber(&cfg, 15_000, 700 + i as u64);
        assert!(
            rate <= previous.0 + 3.0 * (se + previous.1),
            "ber rose from {} to {rate} at {snr_db} dB",
            previous.0
        );
        previous = (rate, se);
    }
}

#[test]
fn exhaustive_decoder_tracks_reference_on_noisy_frames() {
    // Larger configuration than the acceptance spot check; the reference
    // builds every hypothesis from scratch.
    let cfg = SystemConfig::new(3, 3, 2, 4, 4).with_comm_snr_db(9.0);
    let codec = ImCodec::new(&cfg).unwrap();
    let mut rng = trial_rng(701, 0, 0);
    for _ in 0..150 {
        let bits = codec.random_bits(&mut rng);
        let frame = codec.encode(&bits).unwrap();
        let channel = draw_channel(&cfg, &mut rng);
        let bank = synth_filter_bank(&channel, &frame, &cfg, &mut rng, false);
        let outcome = ml_decode(&bank, &channel, &cfg, &codec);
        assert_eq!(outcome.bits, common::reference_ml_bits(&bank, &channel, &cfg));
    }
}

#[test]
fn both_decoders_see_the_same_frames_noiselessly() {
    // At high SNR with noise disabled the decoders agree bit for bit.
    let cfg = SystemConfig::new(4, 4, 2, 5, 4).with_comm_snr_db(10.0);
    let codec = ImCodec::new(&cfg).unwrap();
    let mut rng = trial_rng(702, 0, 0);
    for _ in 0..500 {
        let bits = codec.random_bits(&mut rng);
        let frame = codec.encode(&bits).unwrap();
        let channel = draw_channel(&cfg, &mut rng);
        let bank = synth_filter_bank(&channel, &frame, &cfg, &mut rng, true);
        let two_stage = mltsd_decode(&bank, &channel, &cfg, &codec);
        let exhaustive = ml_decode(&bank, &channel, &cfg, &codec);
        assert_eq!(two_stage.bits, bits);
        assert_eq!(exhaustive.bits, bits);
    }
}
