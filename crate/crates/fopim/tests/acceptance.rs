//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! with the measured numbers.

mod common;

use fopim::channel::{draw_channel, synth_filter_bank};
use fopim::comm_rx::{ml_decode, mltsd_decode};
use fopim::config::SystemConfig;
use fopim::crb;
use fopim::harness::{
    run_ber_experiment, run_bound_validation, run_rate_table, run_rmse_experiment,
    ExperimentKind, ExperimentSpec, MonteCarlo, ResultTable, RunOptions, ScenarioSettings,
    Sweep, SweepAxis,
};
use fopim::im_codec::{bits_per_pulse, ImCodec, RateScheme};
use fopim::rng::trial_rng;
use fopim::sensing::{steering_range, steering_rx, steering_tx, SensingScenario};
use num_complex::Complex64;

fn report(criterion: u32, pass: bool, detail: &str) {
    println!(
        "acceptance criterion {criterion}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

fn options() -> RunOptions {
    RunOptions { workers: 2 }
}

fn metric<'t>(table: &'t ResultTable, name: &str, sweep_value: f64) -> &'t fopim::harness::ResultRow {
    table
        .rows
        .iter()
        .find(|r| r.metric == name && r.sweep_value == sweep_value)
        .unwrap_or_else(|| panic!("missing row {name} at {sweep_value}"))
}

/// Criterion 1: noiseless frames decode exactly under both detectors across
/// the configuration grid.
#[test]
fn criterion_01_noiseless_round_trip() {
    let frames = 10_000u64;
    let mut total_errors = 0u64;
    let mut checked = 0u64;
    for n in [2usize, 4, 6] {
        for j in [4usize, 16] {
            for l in [1usize, 3] {
                let cfg = SystemConfig::new(n, n, l, n + 1, j).with_comm_snr_db(10.0);
                let codec = ImCodec::new(&cfg).unwrap();
                let mut rng = trial_rng(101, (n * 100 + j * 10 + l) as u64, 0);
                for _ in 0..frames {
                    let bits = codec.random_bits(&mut rng);
                    let frame = codec.encode(&bits).unwrap();
                    let channel = draw_channel(&cfg, &mut rng);
                    let bank = synth_filter_bank(&channel, &frame, &cfg, &mut rng, true);
                    let two_stage = mltsd_decode(&bank, &channel, &cfg, &codec);
                    let exhaustive = ml_decode(&bank, &channel, &cfg, &codec);
                    total_errors += two_stage
                        .bits
                        .iter()
                        .zip(bits.iter())
                        .filter(|(a, b)| a != b)
                        .count() as u64;
                    total_errors += exhaustive
                        .bits
                        .iter()
                        .zip(bits.iter())
                        .filter(|(a, b)| a != b)
                        .count() as u64;
                    checked += 1;
                }
            }
        }
    }
    report(
        1,
        total_errors == 0,
        &format!("{checked} noiseless frames x 12 configs x 2 decoders, {total_errors} bit errors"),
    );
}

fn fig3b_spec(values: Vec<f64>, ml_max_frames: u64) -> ExperimentSpec {
    ExperimentSpec {
        kind: ExperimentKind::BerSweep,
        seed: 20824,
        system: SystemConfig::new(6, 6, 3, 7, 4),
        sweep: Sweep {
            axis: SweepAxis::SnrDb,
            values,
        },
        monte_carlo: MonteCarlo {
            // 43500 frames x 23 bits/frame just tops one million bits.
            max_frames: 43_500,
            min_frames: 10_000,
            target_bit_errors: 100,
            ml_max_frames,
            ..MonteCarlo::default()
        },
        scenario: ScenarioSettings::default(),
    }
}

/// Criterion 2: the Monte Carlo BER of the two-stage detector stays below
/// the analytic bound (3 sigma) and tracks it within a factor 10 from 8 dB.
#[test]
fn criterion_02_bound_dominance_and_tightness() {
    let spec = fig3b_spec(vec![0.0, 4.0, 8.0, 12.0, 16.0, 20.0], 0);
    let table = run_ber_experiment(&spec, &options()).unwrap();
    let mut pass = true;
    let mut detail = String::new();
    for &snr_db in &spec.sweep.values {
        let mc = metric(&table, "ber_mltsd", snr_db);
        let bound = metric(&table, "bound_mltsd", snr_db).estimate;
        let dominated = mc.estimate <= bound + 3.0 * mc.stderr;
        let tight = snr_db < 8.0 || mc.estimate / bound >= 0.1;
        pass &= dominated && tight;
        detail.push_str(&format!(
            "[{snr_db} dB: mc {:.3e} <= bound {:.3e}: {dominated}, ratio {:.2}: {tight}] ",
            mc.estimate,
            bound,
            mc.estimate / bound
        ));
    }
    report(2, pass, detail.trim_end());
}

/// Criterion 3: the two-stage detector does not lose to the exhaustive
/// baseline at or above 10 dB (paired comparison, 3 sigma).
#[test]
fn criterion_03_decoder_ordering() {
    let spec = fig3b_spec(vec![12.0, 16.0, 20.0], 2_000);
    let table = run_ber_experiment(&spec, &options()).unwrap();
    let mut pass = true;
    let mut detail = String::new();
    for &snr_db in &spec.sweep.values {
        let diff = metric(&table, "ber_diff_mltsd_minus_ml", snr_db);
        let ok = diff.estimate <= 3.0 * diff.stderr;
        pass &= ok;
        detail.push_str(&format!(
            "[{snr_db} dB: diff {:.3e} vs 3sigma {:.3e} over {} paired frames: {ok}] ",
            diff.estimate,
            3.0 * diff.stderr,
            diff.trials
        ));
    }
    report(3, pass, detail.trim_end());
}

/// Criterion 4: measured hypothesis counts match J*N^2 (two-stage) and
/// 2^floor(log2 N!) * J^N (exhaustive) exactly.
#[test]
fn criterion_04_complexity_counters() {
    let mut pass = true;
    let mut detail = String::new();
    for (n, p, j) in [(2usize, 3usize, 4usize), (3, 4, 4), (4, 5, 16), (6, 7, 4)] {
        let cfg = SystemConfig::new(n, n, 2, p, j).with_comm_snr_db(8.0);
        let codec = ImCodec::new(&cfg).unwrap();
        let mut rng = trial_rng(104, (n * 100 + j) as u64, 0);
        let bits = codec.random_bits(&mut rng);
        let frame = codec.encode(&bits).unwrap();
        let channel = draw_channel(&cfg, &mut rng);
        let bank = synth_filter_bank(&channel, &frame, &cfg, &mut rng, false);
        let two_stage = mltsd_decode(&bank, &channel, &cfg, &codec).hypothesis_count;
        let exhaustive = ml_decode(&bank, &channel, &cfg, &codec).hypothesis_count;
        let want_two = (j * n * n) as u64;
        let want_full =
            (1u64 << cfg.bit_budget().permutation_bits) * (j as u64).pow(n as u32);
        pass &= two_stage == want_two && exhaustive == want_full;
        detail.push_str(&format!(
            "[N={n} P={p} J={j}: mltsd {two_stage}/{want_two}, ml {exhaustive}/{want_full}] "
        ));
    }
    report(4, pass, detail.trim_end());
}

/// Criterion 5: every closed form agrees with its independent Monte Carlo
/// oracle within 1e-3 absolute at five random parameter points.
#[test]
fn criterion_05_closed_form_oracles() {
    let spec = ExperimentSpec::bound_validation(20825);
    let table = run_bound_validation(&spec, &options()).unwrap();
    let mut pass = true;
    let mut worst: (f64, String) = (0.0, String::new());
    for row in table.rows.iter().filter(|r| r.metric.ends_with("_abs_diff")) {
        if row.estimate > worst.0 {
            worst = (
                row.estimate,
                format!("{} at point {}", row.metric, row.sweep_value),
            );
        }
        pass &= row.estimate <= 1e-3;
    }
    report(
        5,
        pass,
        &format!("20 oracle comparisons, worst |diff| {:.2e} ({})", worst.0, worst.1),
    );
}

/// Criterion 6: reference rate values and scheme dominance.
#[test]
fn criterion_06_rate_table() {
    let reference = SystemConfig::new(6, 6, 3, 7, 4);
    let fopim = bits_per_pulse(RateScheme::Fopim, &reference).unwrap();
    let foim8 = bits_per_pulse(RateScheme::Foim, &SystemConfig::new(6, 6, 3, 7, 8)).unwrap();
    let mut pass = fopim == 23 && foim8 == 20;
    let mut detail = format!("fopim(6,7,4)={fopim}, foim(J=8)={foim8}");
    let table = run_rate_table(&ExperimentSpec::preset("fig6a").unwrap()).unwrap();
    for &p in &[7usize, 8, 9, 10, 11, 12] {
        let mut cfg = reference.clone();
        cfg.pool_size = p;
        let fopim_bits = bits_per_pulse(RateScheme::Fopim, &cfg).unwrap();
        for active in 1..=cfg.tx_antennas {
            let frac = bits_per_pulse(RateScheme::Frac { active }, &cfg).unwrap();
            pass &= fopim_bits >= frac;
        }
        let full = bits_per_pulse(RateScheme::Frac { active: cfg.tx_antennas }, &cfg).unwrap();
        pass &= full == fopim_bits;
        let table_row = metric(&table, "bits_fopim", p as f64);
        pass &= table_row.estimate == fopim_bits as f64;
    }
    detail.push_str(", fopim >= frac for all active counts, frac(N1=N) == fopim over P in 7..=12");
    report(6, pass, &detail);
}

fn crb_scenario(cfg: &SystemConfig, pulses: usize, seed: u64) -> SensingScenario {
    let mut rng = trial_rng(seed, 0, 0);
    let codec = ImCodec::new(cfg).unwrap();
    let pulse_offsets = (0..pulses)
        .map(|_| {
            let bits = codec.random_bits(&mut rng);
            codec.encode(&bits).unwrap().offsets
        })
        .collect();
    SensingScenario {
        target_angle_rad: 18.4f64.to_radians(),
        target_range_m: 3011.3,
        reflection: Complex64::from_polar(1.0, 0.7),
        coarse_range_m: 3000.0,
        pulse_offsets,
    }
}

/// Criterion 7: analytic derivatives against central differences, Schur
/// bounds against the full inverse, and exact halving under a doubled CPI.
#[test]
fn criterion_07_derivative_and_crb_checks() {
    let cfg = SystemConfig::new(6, 6, 3, 7, 4).with_sensing_snr_db(0.0);
    let offsets = vec![5usize, 1, 6, 0, 3, 2];
    let angle = 0.31f64;
    let dr = 4.2f64;
    let d = crb::steering_derivatives(angle, dr, &offsets, &cfg);
    let h_angle = 1e-6;
    let h_range = 1e-4;
    let fd_rx = (steering_rx(angle + h_angle, &cfg) - steering_rx(angle - h_angle, &cfg))
        / Complex64::new(2.0 * h_angle, 0.0);
    let fd_tx = (steering_tx(angle + h_angle, &cfg) - steering_tx(angle - h_angle, &cfg))
        / Complex64::new(2.0 * h_angle, 0.0);
    let fd_range = (steering_range(dr + h_range, &offsets, &cfg)
        - steering_range(dr - h_range, &offsets, &cfg))
        / Complex64::new(2.0 * h_range, 0.0);
    let rel_rx = (&d.rx - &fd_rx).norm() / fd_rx.norm();
    let rel_tx = (&d.tx - &fd_tx).norm() / fd_tx.norm();
    let rel_range = (&d.range - &fd_range).norm() / fd_range.norm();
    let derivatives_ok = rel_rx < 1e-6 && rel_tx < 1e-6 && rel_range < 1e-6;

    let scenario = crb_scenario(&cfg, 60, 107);
    let result = crb::fim(&scenario, &cfg).unwrap();
    let inverse = result.fim.try_inverse().unwrap();
    let rel_schur_range = (result.crb_range - inverse[(0, 0)]).abs() / inverse[(0, 0)];
    let rel_schur_angle = (result.crb_angle - inverse[(1, 1)]).abs() / inverse[(1, 1)];
    let two_path_ok = rel_schur_range < 1e-9 && rel_schur_angle < 1e-9;

    let mut doubled = scenario.clone();
    doubled.pulse_offsets.extend(scenario.pulse_offsets.iter().cloned());
    let result2 = crb::fim(&doubled, &cfg).unwrap();
    let halving_range = (result2.crb_range - 0.5 * result.crb_range).abs() / result.crb_range;
    let halving_angle = (result2.crb_angle - 0.5 * result.crb_angle).abs() / result.crb_angle;
    let halving_ok = halving_range <= 1e-12 && halving_angle <= 1e-12;

    report(
        7,
        derivatives_ok && two_path_ok && halving_ok,
        &format!(
            "fd rel ({rel_rx:.1e},{rel_tx:.1e},{rel_range:.1e}) < 1e-6, schur rel ({rel_schur_range:.1e},{rel_schur_angle:.1e}) < 1e-9, halving rel ({halving_range:.1e},{halving_angle:.1e}) <= 1e-12"
        ),
    );
}

fn rmse_spec(tx: usize, pool: usize, values: Vec<f64>, seed: u64) -> ExperimentSpec {
    ExperimentSpec {
        kind: ExperimentKind::RmseVsSnr,
        seed,
        system: SystemConfig::new(tx, tx, 3, pool, 4),
        sweep: Sweep {
            axis: SweepAxis::SnrDb,
            values,
        },
        monte_carlo: MonteCarlo {
            trials: 400,
            chunk: 32,
            ..MonteCarlo::default()
        },
        scenario: ScenarioSettings::default(),
    }
}

/// Criterion 8: sensing reproduction. Angle RMSE within a factor 3 of the
/// root bound; FDA range super-resolution against a flat, meter-level MIMO
/// baseline; angle parity between the two front ends.
#[test]
fn criterion_08_sensing_reproduction() {
    let mut pass = true;
    let mut detail = String::new();

    // Angle efficiency at N = M = 6, P = 7, K = 200.
    let table_a = run_rmse_experiment(&rmse_spec(6, 7, vec![0.0, 10.0], 2088), &options()).unwrap();
    for &snr_db in &[0.0, 10.0] {
        let rmse = metric(&table_a, "rmse_angle_fda_deg", snr_db).estimate;
        let root = metric(&table_a, "root_crb_angle_deg", snr_db).estimate;
        let ratio = rmse / root;
        let ok = (1.0 / 3.0..=3.0).contains(&ratio);
        pass &= ok;
        detail.push_str(&format!("[angle {snr_db} dB: rmse/crb {ratio:.2}: {ok}] "));
    }

    // Range behavior at N = M = 8, P = 9, K = 200.
    let table_b =
        run_rmse_experiment(&rmse_spec(8, 9, vec![0.0, 5.0, 10.0], 2089), &options()).unwrap();
    let fda_range_10 = metric(&table_b, "rmse_range_fda_m", 10.0).estimate;
    let ok_fda = fda_range_10 <= 0.1;
    pass &= ok_fda;
    detail.push_str(&format!("[fda range @10dB {fda_range_10:.2e} m <= 0.1: {ok_fda}] "));
    let mimo_ranges: Vec<f64> = [0.0, 5.0, 10.0]
        .iter()
        .map(|&s| metric(&table_b, "rmse_range_mimo_m", s).estimate)
        .collect();
    let ok_mimo_level = mimo_ranges.iter().all(|&v| v >= 1.0);
    let spread = mimo_ranges.iter().cloned().fold(f64::MIN, f64::max)
        / mimo_ranges.iter().cloned().fold(f64::MAX, f64::min);
    let ok_mimo_flat = spread <= 1.25;
    pass &= ok_mimo_level && ok_mimo_flat;
    detail.push_str(&format!(
        "[mimo range {:?} m >= 1: {ok_mimo_level}, flat max/min {spread:.2} <= 1.25: {ok_mimo_flat}] ",
        mimo_ranges.iter().map(|v| (v * 100.0).round() / 100.0).collect::<Vec<_>>()
    ));
    for &snr_db in &[0.0, 5.0, 10.0] {
        let fda = metric(&table_b, "rmse_angle_fda_deg", snr_db).estimate;
        let mimo = metric(&table_b, "rmse_angle_mimo_deg", snr_db).estimate;
        let ratio = fda / mimo;
        let ok = (0.5..=2.0).contains(&ratio);
        pass &= ok;
        detail.push_str(&format!("[angle parity {snr_db} dB: {ratio:.2}: {ok}] "));
    }
    report(8, pass, detail.trim_end());
}

/// Criterion 9: the range bound tightens with larger frequency increments
/// and larger pools while the angle bound stays put across pools.
#[test]
fn criterion_09_crb_structure() {
    let scenarios = 50usize;
    let pulses = 50usize;
    let average = |cfg: &SystemConfig, seed: u64| -> (f64, f64) {
        let mut range_sum = 0.0;
        let mut angle_sum = 0.0;
        for s in 0..scenarios {
            let scenario = crb_scenario(cfg, pulses, seed + s as u64);
            let result = crb::fim(&scenario, cfg).unwrap();
            range_sum += result.crb_range;
            angle_sum += result.crb_angle;
        }
        (range_sum / scenarios as f64, angle_sum / scenarios as f64)
    };

    let mut pass = true;
    let mut detail = String::new();
    let mut last_range = f64::INFINITY;
    for df_mhz in [2.0f64, 4.0, 6.0] {
        let mut cfg = SystemConfig::new(6, 6, 3, 7, 4).with_sensing_snr_db(0.0);
        cfg.freq_increment_hz = df_mhz * 1e6;
        let (range, _) = average(&cfg, 109);
        let ok = range < last_range;
        pass &= ok;
        detail.push_str(&format!("[df {df_mhz} MHz: crb_range {range:.3e}: {ok}] "));
        last_range = range;
    }
    let mut last_range = f64::INFINITY;
    let mut angles = Vec::new();
    for pool in [7usize, 9, 11] {
        let cfg = SystemConfig::new(6, 6, 3, pool, 4).with_sensing_snr_db(0.0);
        let (range, angle) = average(&cfg, 110);
        let ok = range < last_range;
        pass &= ok;
        angles.push(angle);
        detail.push_str(&format!("[P {pool}: crb_range {range:.3e}: {ok}] "));
        last_range = range;
    }
    let angle_spread = angles.iter().cloned().fold(f64::MIN, f64::max)
        / angles.iter().cloned().fold(f64::MAX, f64::min)
        - 1.0;
    let ok_angle = angle_spread < 0.05;
    pass &= ok_angle;
    detail.push_str(&format!("[angle spread over P {angle_spread:.3}: {ok_angle}]"));
    report(9, pass, &detail);
}

/// Criterion 10: identical seeds give byte-identical CSV output regardless
/// of the worker count.
#[test]
fn criterion_10_reproducibility() {
    let mut ber = fig3b_spec(vec![6.0, 10.0], 300);
    ber.monte_carlo.max_frames = 3_000;
    ber.monte_carlo.min_frames = 1_000;
    let csv_1 = run_ber_experiment(&ber, &RunOptions { workers: 1 })
        .unwrap()
        .to_csv();
    let csv_8 = run_ber_experiment(&ber, &RunOptions { workers: 8 })
        .unwrap()
        .to_csv();
    let ber_ok = csv_1 == csv_8;

    let mut rmse = rmse_spec(6, 7, vec![5.0], 2090);
    rmse.monte_carlo.trials = 48;
    rmse.monte_carlo.chunk = 8;
    rmse.system.pulses_per_cpi = 40;
    let rmse_1 = run_rmse_experiment(&rmse, &RunOptions { workers: 1 })
        .unwrap()
        .to_csv();
    let rmse_8 = run_rmse_experiment(&rmse, &RunOptions { workers: 8 })
        .unwrap()
        .to_csv();
    let rmse_ok = rmse_1 == rmse_8;

    report(
        10,
        ber_ok && rmse_ok,
        &format!(
            "ber csv identical across 1 vs 8 workers: {ber_ok} ({} bytes); rmse csv identical: {rmse_ok} ({} bytes)",
            csv_1.len(),
            rmse_1.len()
        ),
    );
}

/// The reference decoder from `common` agrees with the exhaustive decoder
/// frame by frame on a small configuration (supporting evidence for
/// criteria 1 and 4).
#[test]
fn exhaustive_decoder_matches_independent_reference() {
    let cfg = SystemConfig::new(2, 2, 2, 3, 4).with_comm_snr_db(6.0);
    let codec = ImCodec::new(&cfg).unwrap();
    let mut rng = trial_rng(111, 0, 0);
    let mut agreements = 0usize;
    for _ in 0..400 {
        let bits = codec.random_bits(&mut rng);
        let frame = codec.encode(&bits).unwrap();
        let channel = draw_channel(&cfg, &mut rng);
        let bank = synth_filter_bank(&channel, &frame, &cfg, &mut rng, false);
        let outcome = ml_decode(&bank, &channel, &cfg, &codec);
        let reference = common::reference_ml_bits(&bank, &channel, &cfg);
        assert_eq!(outcome.bits, reference);
        agreements += 1;
    }
    println!("reference decoder agreement on {agreements} noisy frames");
}
