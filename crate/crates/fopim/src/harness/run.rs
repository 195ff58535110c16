//! Experiment runners. Every runner derives one RNG sub-stream per trial
//! from (master seed, point, trial counter) and schedules trials in fixed
//! chunks, so results are identical for any worker count: integer event
//! counts commute, and floating-point reductions happen sequentially in
//! trial order.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::ber_theory;
use crate::channel::{comm_phase, draw_channel, synth_filter_bank};
use crate::comm_rx::{ml_decode, mltsd_decode};
use crate::config::SystemConfig;
use crate::crb;
use crate::im_codec::{bits_per_pulse, ImCodec, QamConstellation, RateScheme};
use crate::rng::{complex_gaussian, trial_rng};
use crate::sensing::{
    estimate_angle, estimate_range, max_range_offset, mimo_baseline, synth_cpi, SearchGrid,
    SensingScenario,
};

use super::experiment::{ExperimentKind, ExperimentSpec, SweepAxis};
use super::output::{ResultRow, ResultTable};
use super::HarnessError;

/// Execution options independent of the experiment definition.
#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub workers: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            workers: std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1),
        }
    }
}

fn build_pool(options: &RunOptions) -> Result<rayon::ThreadPool, HarnessError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(options.workers.max(1))
        .build()
        .map_err(|e| HarnessError::Config(e.to_string()))
}

fn expect_kind(spec: &ExperimentSpec, allowed: &[ExperimentKind]) -> Result<(), HarnessError> {
    if allowed.contains(&spec.kind) {
        Ok(())
    } else {
        Err(HarnessError::Config(format!(
            "experiment kind {:?} does not match this runner",
            spec.kind
        )))
    }
}

// ---------------------------------------------------------------------------
// BER sweep
// ---------------------------------------------------------------------------

#[derive(Default, Clone, Copy)]
struct BerAccumulator {
    frames: u64,
    errors: u64,
    errors_sq: u64,
}

impl BerAccumulator {
    fn push(&mut self, errors: u32) {
        self.frames += 1;
        self.errors += u64::from(errors);
        self.errors_sq += u64::from(errors) * u64::from(errors);
    }

    fn row(&self, metric: &str, sweep_value: f64, frame_bits: usize) -> ResultRow {
        let n = self.frames as f64;
        let bits = frame_bits as f64;
        let mean = self.errors as f64 / n;
        let variance = if self.frames > 1 {
            (self.errors_sq as f64 - n * (mean * mean)) / (n - 1.0)
        } else {
            0.0
        };
        ResultRow {
            sweep_value,
            metric: metric.to_string(),
            estimate: mean / bits,
            stderr: (variance / n).sqrt() / bits,
            trials: self.frames,
        }
    }
}

/// Monte Carlo BER for both decoders plus the analytic bound, per SNR point.
pub fn run_ber_experiment(
    spec: &ExperimentSpec,
    options: &RunOptions,
) -> Result<ResultTable, HarnessError> {
    spec.validate()?;
    expect_kind(spec, &[ExperimentKind::BerSweep])?;
    let pool = build_pool(options)?;
    let mc = spec.monte_carlo;
    let mut rows = Vec::new();

    for (point, &snr_db) in spec.sweep.values.iter().enumerate() {
        let cfg = spec.system.clone().with_comm_snr_db(snr_db);
        let codec = ImCodec::new(&cfg).map_err(|e| HarnessError::Config(e.to_string()))?;
        let frame_bits = codec.frame_bits();

        let mut two_stage = BerAccumulator::default();
        let mut exhaustive = BerAccumulator::default();
        let mut paired_frames = 0u64;
        let mut paired_diff = 0i64;
        let mut paired_diff_sq = 0u64;

        let ml_min = mc.min_frames.min(mc.ml_max_frames);
        let mut trial = 0u64;
        loop {
            let two_stage_active = !(two_stage.frames >= mc.max_frames
                || (two_stage.errors >= mc.target_bit_errors
                    && two_stage.frames >= mc.min_frames));
            let exhaustive_active = mc.ml_max_frames > 0
                && !(exhaustive.frames >= mc.ml_max_frames
                    || (exhaustive.errors >= mc.target_bit_errors
                        && exhaustive.frames >= ml_min));
            if !two_stage_active && !exhaustive_active {
                break;
            }

            let end = trial + mc.chunk;
            let cfg_ref = &cfg;
            let codec_ref = &codec;
            let outcomes: Vec<(Option<u32>, Option<u32>)> = pool.install(|| {
                (trial..end)
                    .into_par_iter()
                    .map(|t| {
                        let mut rng = trial_rng(spec.seed, point as u64, t);
                        let bits = codec_ref.random_bits(&mut rng);
                        let frame = codec_ref.encode(&bits).expect("frame length fixed");
                        let channel = draw_channel(cfg_ref, &mut rng);
                        let bank = synth_filter_bank(
                            &channel,
                            &frame,
                            cfg_ref,
                            &mut rng,
                            mc.noiseless,
                        );
                        let count_errors = |decoded: &[bool]| {
                            decoded
                                .iter()
                                .zip(bits.iter())
                                .filter(|(a, b)| a != b)
                                .count() as u32
                        };
                        let two = two_stage_active.then(|| {
                            count_errors(&mltsd_decode(&bank, &channel, cfg_ref, codec_ref).bits)
                        });
                        let full = exhaustive_active.then(|| {
                            count_errors(&ml_decode(&bank, &channel, cfg_ref, codec_ref).bits)
                        });
                        (two, full)
                    })
                    .collect()
            });
            for (two, full) in outcomes {
                if let Some(e) = two {
                    two_stage.push(e);
                }
                if let Some(e) = full {
                    exhaustive.push(e);
                }
                if let (Some(a), Some(b)) = (two, full) {
                    paired_frames += 1;
                    let d = i64::from(a) - i64::from(b);
                    paired_diff += d;
                    paired_diff_sq += (d * d) as u64;
                }
            }
            trial = end;
        }

        rows.push(two_stage.row("ber_mltsd", snr_db, frame_bits));
        if mc.ml_max_frames > 0 {
            rows.push(exhaustive.row("ber_ml", snr_db, frame_bits));
            let n = paired_frames as f64;
            let mean = paired_diff as f64 / n.max(1.0);
            let variance = if paired_frames > 1 {
                (paired_diff_sq as f64 - n * mean * mean) / (n - 1.0)
            } else {
                0.0
            };
            rows.push(ResultRow {
                sweep_value: snr_db,
                metric: "ber_diff_mltsd_minus_ml".to_string(),
                estimate: mean / frame_bits as f64,
                stderr: (variance / n.max(1.0)).sqrt() / frame_bits as f64,
                trials: paired_frames,
            });
        }
        rows.push(ResultRow {
            sweep_value: snr_db,
            metric: "bound_mltsd".to_string(),
            estimate: ber_theory::mltsd_upper_bound(&spec.system, snr_db).total,
            stderr: 0.0,
            trials: 0,
        });
    }
    Ok(ResultTable::new(spec, rows))
}

// ---------------------------------------------------------------------------
// Sensing RMSE sweep
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
struct SensingTrial {
    angle_sq_fda: f64,
    range_sq_fda: f64,
    angle_sq_mimo: f64,
    range_sq_mimo: f64,
    crb_range: f64,
    crb_angle: f64,
}

fn draw_scenario(
    cfg: &SystemConfig,
    codec: &ImCodec,
    pulses: usize,
    angle_span_rad: f64,
    coarse_range_m: f64,
    rng: &mut impl Rng,
) -> SensingScenario {
    let angle = rng.random_range(-angle_span_rad..angle_span_rad);
    let limit = max_range_offset(cfg);
    let range_offset = rng.random_range(-limit..limit);
    let phase = rng.random_range(0.0..std::f64::consts::TAU);
    let pulse_offsets = (0..pulses)
        .map(|_| {
            let bits = codec.random_bits(rng);
            codec.encode(&bits).expect("frame length fixed").offsets
        })
        .collect();
    SensingScenario {
        target_angle_rad: angle,
        target_range_m: coarse_range_m + range_offset,
        reflection: Complex64::from_polar(1.0, phase),
        coarse_range_m,
        pulse_offsets,
    }
}

fn sensing_point_config(spec: &ExperimentSpec, sweep_value: f64) -> (SystemConfig, usize) {
    match spec.kind {
        ExperimentKind::RmseVsSnapshots => (
            spec.system
                .clone()
                .with_sensing_snr_db(spec.scenario.fixed_snr_db),
            sweep_value as usize,
        ),
        _ => (
            spec.system.clone().with_sensing_snr_db(sweep_value),
            spec.system.pulses_per_cpi,
        ),
    }
}

fn rmse_row(metric: &str, sweep_value: f64, sum: f64, sum_sq: f64, n: u64, scale: f64) -> ResultRow {
    let count = n as f64;
    let mean = sum / count;
    let rmse = mean.max(0.0).sqrt();
    let variance = if n > 1 {
        ((sum_sq - count * mean * mean) / (count - 1.0)).max(0.0)
    } else {
        0.0
    };
    let stderr_mean = (variance / count).sqrt();
    let stderr = if rmse > 0.0 {
        stderr_mean / (2.0 * rmse)
    } else {
        0.0
    };
    ResultRow {
        sweep_value,
        metric: metric.to_string(),
        estimate: rmse * scale,
        stderr: stderr * scale,
        trials: n,
    }
}

/// Angle/range RMSE of the FDA estimator and the MIMO baseline plus the
/// root bounds, per sweep point.
pub fn run_rmse_experiment(
    spec: &ExperimentSpec,
    options: &RunOptions,
) -> Result<ResultTable, HarnessError> {
    spec.validate()?;
    expect_kind(
        spec,
        &[ExperimentKind::RmseVsSnr, ExperimentKind::RmseVsSnapshots],
    )?;
    let pool = build_pool(options)?;
    let grid = SearchGrid::default();
    let mc = spec.monte_carlo;
    let angle_span_rad = spec.scenario.angle_span_deg.to_radians();
    let mut rows = Vec::new();

    for (point, &sweep_value) in spec.sweep.values.iter().enumerate() {
        let (cfg, pulses) = sensing_point_config(spec, sweep_value);
        if pulses == 0 {
            return Err(HarnessError::Config("snapshot count must be positive".into()));
        }
        let codec = ImCodec::new(&cfg).map_err(|e| HarnessError::Config(e.to_string()))?;

        let mut sums = [0.0f64; 6];
        let mut sums_sq = [0.0f64; 6];
        let mut done = 0u64;
        while done < mc.trials {
            let end = (done + mc.chunk).min(mc.trials);
            let cfg_ref = &cfg;
            let codec_ref = &codec;
            let grid_ref = &grid;
            let scenario_cfg = spec.scenario;
            let outcomes: Vec<Result<SensingTrial, String>> = pool.install(|| {
                (done..end)
                    .into_par_iter()
                    .map(|t| {
                        let mut rng = trial_rng(spec.seed, point as u64, t);
                        let scenario = draw_scenario(
                            cfg_ref,
                            codec_ref,
                            pulses,
                            angle_span_rad,
                            scenario_cfg.coarse_range_m,
                            &mut rng,
                        );
                        let snapshots =
                            synth_cpi(&scenario, cfg_ref, &mut rng, mc.noiseless);
                        let angle = estimate_angle(&snapshots, cfg_ref, grid_ref)
                            .map_err(|e| e.to_string())?;
                        let range = estimate_range(
                            &snapshots,
                            angle,
                            scenario.coarse_range_m,
                            cfg_ref,
                            grid_ref,
                        )
                        .map_err(|e| e.to_string())?;

                        let mimo_scenario = SensingScenario {
                            pulse_offsets: vec![vec![0; cfg_ref.tx_antennas]; pulses],
                            ..scenario.clone()
                        };
                        let mimo_snapshots =
                            synth_cpi(&mimo_scenario, cfg_ref, &mut rng, mc.noiseless);
                        let (mimo_angle, mimo_range) = mimo_baseline(
                            &mimo_snapshots,
                            scenario.target_range_m,
                            cfg_ref,
                            grid_ref,
                            &mut rng,
                        )
                        .map_err(|e| e.to_string())?;

                        let bounds = crb::fim(&scenario, cfg_ref).map_err(|e| e.to_string())?;
                        let angle_err = angle - scenario.target_angle_rad;
                        let range_err = range.absolute_range_m - scenario.target_range_m;
                        let mimo_angle_err = mimo_angle - scenario.target_angle_rad;
                        let mimo_range_err = mimo_range - scenario.target_range_m;
                        Ok(SensingTrial {
                            angle_sq_fda: angle_err * angle_err,
                            range_sq_fda: range_err * range_err,
                            angle_sq_mimo: mimo_angle_err * mimo_angle_err,
                            range_sq_mimo: mimo_range_err * mimo_range_err,
                            crb_range: bounds.crb_range,
                            crb_angle: bounds.crb_angle,
                        })
                    })
                    .collect()
            });
            for outcome in outcomes {
                let trial = outcome.map_err(HarnessError::Numerical)?;
                let values = [
                    trial.angle_sq_fda,
                    trial.range_sq_fda,
                    trial.angle_sq_mimo,
                    trial.range_sq_mimo,
                    trial.crb_range,
                    trial.crb_angle,
                ];
                for (i, v) in values.iter().enumerate() {
                    sums[i] += v;
                    sums_sq[i] += v * v;
                }
            }
            done = end;
        }

        let n = mc.trials;
        let deg = 180.0 / std::f64::consts::PI;
        rows.push(rmse_row("rmse_angle_fda_deg", sweep_value, sums[0], sums_sq[0], n, deg));
        rows.push(rmse_row("rmse_range_fda_m", sweep_value, sums[1], sums_sq[1], n, 1.0));
        rows.push(rmse_row("rmse_angle_mimo_deg", sweep_value, sums[2], sums_sq[2], n, deg));
        rows.push(rmse_row("rmse_range_mimo_m", sweep_value, sums[3], sums_sq[3], n, 1.0));
        rows.push(rmse_row("root_crb_range_m", sweep_value, sums[4], sums_sq[4], n, 1.0));
        rows.push(rmse_row("root_crb_angle_deg", sweep_value, sums[5], sums_sq[5], n, deg));
    }
    Ok(ResultTable::new(spec, rows))
}

/// Analytic root-bound table over an RMSE-style sweep (no estimation runs).
pub fn run_crb_table(
    spec: &ExperimentSpec,
    options: &RunOptions,
) -> Result<ResultTable, HarnessError> {
    spec.validate()?;
    expect_kind(
        spec,
        &[ExperimentKind::RmseVsSnr, ExperimentKind::RmseVsSnapshots],
    )?;
    let pool = build_pool(options)?;
    let mc = spec.monte_carlo;
    let angle_span_rad = spec.scenario.angle_span_deg.to_radians();
    let mut rows = Vec::new();

    for (point, &sweep_value) in spec.sweep.values.iter().enumerate() {
        let (cfg, pulses) = sensing_point_config(spec, sweep_value);
        if pulses == 0 {
            return Err(HarnessError::Config("snapshot count must be positive".into()));
        }
        let codec = ImCodec::new(&cfg).map_err(|e| HarnessError::Config(e.to_string()))?;
        let mut sums = [0.0f64; 2];
        let mut sums_sq = [0.0f64; 2];
        let mut done = 0u64;
        while done < mc.trials {
            let end = (done + mc.chunk).min(mc.trials);
            let cfg_ref = &cfg;
            let codec_ref = &codec;
            let scenario_cfg = spec.scenario;
            let outcomes: Vec<Result<(f64, f64), String>> = pool.install(|| {
                (done..end)
                    .into_par_iter()
                    .map(|t| {
                        let mut rng = trial_rng(spec.seed, point as u64, t);
                        let scenario = draw_scenario(
                            cfg_ref,
                            codec_ref,
                            pulses,
                            angle_span_rad,
                            scenario_cfg.coarse_range_m,
                            &mut rng,
                        );
                        let bounds = crb::fim(&scenario, cfg_ref).map_err(|e| e.to_string())?;
                        Ok((bounds.crb_range, bounds.crb_angle))
                    })
                    .collect()
            });
            for outcome in outcomes {
                let (range, angle) = outcome.map_err(HarnessError::Numerical)?;
                sums[0] += range;
                sums_sq[0] += range * range;
                sums[1] += angle;
                sums_sq[1] += angle * angle;
            }
            done = end;
        }
        let deg = 180.0 / std::f64::consts::PI;
        rows.push(rmse_row("root_crb_range_m", sweep_value, sums[0], sums_sq[0], mc.trials, 1.0));
        rows.push(rmse_row(
            "root_crb_angle_deg",
            sweep_value,
            sums[1],
            sums_sq[1],
            mc.trials,
            deg,
        ));
    }
    Ok(ResultTable::new(spec, rows))
}

// ---------------------------------------------------------------------------
// Rate table
// ---------------------------------------------------------------------------

/// Bits-per-pulse comparison across the sweep axis.
pub fn run_rate_table(spec: &ExperimentSpec) -> Result<ResultTable, HarnessError> {
    spec.validate()?;
    expect_kind(spec, &[ExperimentKind::RateTable])?;
    let mut rows = Vec::new();
    for &sweep_value in &spec.sweep.values {
        let mut cfg = spec.system.clone();
        match spec.sweep.axis {
            SweepAxis::PoolSize => cfg.pool_size = sweep_value as usize,
            SweepAxis::TxAntennas => {
                cfg.tx_antennas = sweep_value as usize;
                cfg.sensing_rx_antennas = sweep_value as usize;
                cfg.pool_size = sweep_value as usize + 1;
            }
            _ => unreachable!("validated axis"),
        }
        cfg.validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        let n = cfg.tx_antennas;
        let schemes: [(&str, RateScheme); 6] = [
            ("bits_fopim", RateScheme::Fopim),
            ("bits_foim", RateScheme::Foim),
            ("bits_mimo", RateScheme::Mimo),
            ("bits_majorcom", RateScheme::MajorcomStyle),
            ("bits_frac", RateScheme::Frac { active: (n.saturating_sub(2)).max(1) }),
            ("bits_frac_full", RateScheme::Frac { active: n }),
        ];
        for (metric, scheme) in schemes {
            let bits = bits_per_pulse(scheme, &cfg)
                .map_err(|e| HarnessError::Config(e.to_string()))?;
            rows.push(ResultRow {
                sweep_value,
                metric: metric.to_string(),
                estimate: bits as f64,
                stderr: 0.0,
                trials: 0,
            });
        }
    }
    Ok(ResultTable::new(spec, rows))
}

// ---------------------------------------------------------------------------
// Bound validation (closed forms against Monte Carlo oracles)
// ---------------------------------------------------------------------------

const ORACLE_BLOCK: u64 = 8192;

fn parallel_event_count<F>(pool: &rayon::ThreadPool, draws: u64, seed: u64, stream: u64, event: F) -> u64
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> u64 + Sync,
{
    let blocks = draws.div_ceil(ORACLE_BLOCK);
    pool.install(|| {
        (0..blocks)
            .into_par_iter()
            .map(|block| {
                let mut rng = trial_rng(seed, stream, block);
                let start = block * ORACLE_BLOCK;
                let end = (start + ORACLE_BLOCK).min(draws);
                let mut count = 0u64;
                for _ in start..end {
                    count += event(&mut rng);
                }
                count
            })
            .sum()
    })
}

/// Monte Carlo estimate of P(|noise|^2 > |signal|^2) for the two gamma
/// populations, by direct vector draws.
pub fn mc_prob_y_positive(
    pool: &rayon::ThreadPool,
    sigma1_sq: f64,
    sigma2_sq: f64,
    branches: usize,
    draws: u64,
    seed: u64,
    stream: u64,
) -> (f64, f64) {
    let count = parallel_event_count(pool, draws, seed, stream, |rng| {
        let mut signal = 0.0;
        let mut noise = 0.0;
        for _ in 0..branches {
            signal += complex_gaussian(rng, 2.0 * sigma1_sq).norm_sqr();
            noise += complex_gaussian(rng, 2.0 * sigma2_sq).norm_sqr();
        }
        u64::from(noise > signal)
    });
    proportion(count, draws)
}

/// Monte Carlo estimate of the filter miss probability P_e: a noise-only
/// filter column out-energies the signal-bearing one.
pub fn mc_filter_miss(
    pool: &rayon::ThreadPool,
    cfg: &SystemConfig,
    snr_db: f64,
    draws: u64,
    seed: u64,
    stream: u64,
) -> (f64, f64) {
    let cfg = cfg.clone().with_comm_snr_db(snr_db);
    let constellation = QamConstellation::new(cfg.qam_order).expect("validated order");
    let amplitude = (cfg.total_power / cfg.tx_antennas as f64).sqrt();
    let phase = comm_phase(0, 0, &cfg);
    let noise_var = cfg.filter_noise_variance();
    let l = cfg.comm_rx_antennas;
    let count = parallel_event_count(pool, draws, seed, stream, |rng| {
        let label = rng.random_range(0..cfg.qam_order);
        let symbol = constellation.point(label);
        let mut signal = 0.0;
        let mut noise = 0.0;
        for _ in 0..l {
            let h = complex_gaussian(rng, cfg.tap_variance);
            let y = amplitude * phase * h * symbol + complex_gaussian(rng, noise_var);
            signal += y.norm_sqr();
            noise += complex_gaussian(rng, noise_var).norm_sqr();
        }
        u64::from(noise > signal)
    });
    proportion(count, draws)
}

/// Monte Carlo estimate of the antenna pairwise error event for fixed
/// transmitted/guessed symbols on distinct antennas.
#[allow(clippy::too_many_arguments)]
pub fn mc_antenna_pep(
    pool: &rayon::ThreadPool,
    cfg: &SystemConfig,
    snr_db: f64,
    sent_label: usize,
    guessed_label: usize,
    draws: u64,
    seed: u64,
    stream: u64,
) -> (f64, f64) {
    let cfg = cfg.clone().with_comm_snr_db(snr_db);
    let constellation = QamConstellation::new(cfg.qam_order).expect("validated order");
    let sent = constellation.point(sent_label);
    let guessed = constellation.point(guessed_label);
    let amplitude = (cfg.total_power / cfg.tx_antennas as f64).sqrt();
    let phase_sent = comm_phase(0, 0, &cfg);
    let phase_guessed = comm_phase(1, 0, &cfg);
    let noise_var = cfg.filter_noise_variance();
    let l = cfg.comm_rx_antennas;
    let count = parallel_event_count(pool, draws, seed, stream, |rng| {
        let mut true_residual = 0.0;
        let mut wrong_residual = 0.0;
        for _ in 0..l {
            let h_sent = complex_gaussian(rng, cfg.tap_variance);
            let h_guessed = complex_gaussian(rng, cfg.tap_variance);
            let noise = complex_gaussian(rng, noise_var);
            let difference =
                amplitude * (phase_sent * h_sent * sent - phase_guessed * h_guessed * guessed);
            true_residual += noise.norm_sqr();
            wrong_residual += (difference + noise).norm_sqr();
        }
        u64::from(true_residual > wrong_residual)
    });
    proportion(count, draws)
}

/// Monte Carlo bit error rate of genie-aided coherent QAM detection with
/// maximal-ratio combining over the fading branches.
pub fn mc_qam_bit_error(
    pool: &rayon::ThreadPool,
    cfg: &SystemConfig,
    snr_db: f64,
    draws: u64,
    seed: u64,
    stream: u64,
) -> (f64, f64) {
    let cfg = cfg.clone().with_comm_snr_db(snr_db);
    let constellation = QamConstellation::new(cfg.qam_order).expect("validated order");
    let amplitude = (cfg.total_power / cfg.tx_antennas as f64).sqrt();
    let phase = comm_phase(0, 0, &cfg);
    let noise_var = cfg.filter_noise_variance();
    let l = cfg.comm_rx_antennas;
    let bits = cfg.bits_per_symbol() as u32;
    let errors = parallel_event_count(pool, draws, seed, stream, |rng| {
        let label = rng.random_range(0..cfg.qam_order);
        let symbol = constellation.point(label);
        let mut gains = Vec::with_capacity(l);
        let mut observations = Vec::with_capacity(l);
        for _ in 0..l {
            let s = amplitude * phase * complex_gaussian(rng, cfg.tap_variance);
            observations.push(s * symbol + complex_gaussian(rng, noise_var));
            gains.push(s);
        }
        let mut best = (f64::INFINITY, 0usize);
        for candidate in 0..cfg.qam_order {
            let point = constellation.point(candidate);
            let mut residual = 0.0;
            for (s, y) in gains.iter().zip(observations.iter()) {
                residual += (y - s * point).norm_sqr();
            }
            if residual < best.0 {
                best = (residual, candidate);
            }
        }
        u64::from((best.1 ^ label).count_ones())
    });
    let total_bits = draws * u64::from(bits);
    proportion(errors, total_bits)
}

fn proportion(count: u64, total: u64) -> (f64, f64) {
    let p = count as f64 / total as f64;
    (p, (p * (1.0 - p) / total as f64).sqrt())
}

/// Validate the four closed forms against their Monte Carlo oracles at
/// randomly drawn parameter points.
pub fn run_bound_validation(
    spec: &ExperimentSpec,
    options: &RunOptions,
) -> Result<ResultTable, HarnessError> {
    spec.validate()?;
    expect_kind(spec, &[ExperimentKind::BoundValidation])?;
    let pool = build_pool(options)?;
    let draws = spec.monte_carlo.oracle_draws;
    let mut rows = Vec::new();

    for &value in &spec.sweep.values {
        let point = value as u64;
        let mut params = trial_rng(spec.seed, 7000 + point, 0);

        // Difference-of-energies probability at a random variance pair.
        {
            let sigma2_sq = 10f64.powf(params.random_range(-2.0..0.0));
            let ratio = 10f64.powf(params.random_range(0.05..1.2));
            let sigma1_sq = ratio * sigma2_sq;
            let branches = *[1usize, 2, 3, 4, 6]
                .get(params.random_range(0..5))
                .unwrap();
            let closed = ber_theory::prob_y_positive(sigma1_sq, sigma2_sq, branches);
            let (mc, se) = mc_prob_y_positive(
                &pool, sigma1_sq, sigma2_sq, branches, draws, spec.seed, point * 16,
            );
            push_validation_rows(&mut rows, value, "y_positive", closed, mc, se, draws);
        }

        // Filter miss probability at a random configuration.
        {
            let (cfg, snr_db) = random_comm_config(&mut params, 0.0..12.0);
            let closed = ber_theory::filter_miss_prob(&cfg, snr_db);
            let (mc, se) =
                mc_filter_miss(&pool, &cfg, snr_db, draws, spec.seed, point * 16 + 1);
            push_validation_rows(&mut rows, value, "filter_miss", closed, mc, se, draws);
        }

        // Antenna pairwise error probability.
        {
            let (cfg, snr_db) = random_comm_config(&mut params, 5.0..15.0);
            let sent = params.random_range(0..cfg.qam_order);
            let guessed = params.random_range(0..cfg.qam_order);
            let constellation =
                QamConstellation::new(cfg.qam_order).expect("validated order");
            let sigma3_sq = cfg.tap_variance
                * (constellation.point(sent).norm_sqr()
                    + constellation.point(guessed).norm_sqr())
                / 2.0;
            let closed = ber_theory::antenna_pep(sigma3_sq, &cfg, snr_db);
            let (mc, se) = mc_antenna_pep(
                &pool, &cfg, snr_db, sent, guessed, draws, spec.seed, point * 16 + 2,
            );
            push_validation_rows(&mut rows, value, "antenna_pep", closed, mc, se, draws);
        }

        // QAM bit error probability under genie-aided MRC detection.
        {
            let (cfg, snr_db) = random_comm_config(&mut params, 5.0..15.0);
            let closed = ber_theory::qam_bit_error_prob(&cfg, snr_db);
            let (mc, se) =
                mc_qam_bit_error(&pool, &cfg, snr_db, draws, spec.seed, point * 16 + 3);
            push_validation_rows(&mut rows, value, "qam_ber", closed, mc, se, draws);
        }
    }
    Ok(ResultTable::new(spec, rows))
}

fn random_comm_config(rng: &mut impl Rng, snr_range: std::ops::Range<f64>) -> (SystemConfig, f64) {
    let n = rng.random_range(2..=6usize);
    let p = n + rng.random_range(1..=2usize);
    let j = if rng.random() { 4 } else { 16 };
    let l = if rng.random() { 1 } else { 3 };
    let cfg = SystemConfig::new(n, n, l, p, j);
    let snr_db = rng.random_range(snr_range);
    (cfg, snr_db)
}

fn push_validation_rows(
    rows: &mut Vec<ResultRow>,
    sweep_value: f64,
    name: &str,
    closed: f64,
    mc: f64,
    se: f64,
    draws: u64,
) {
    rows.push(ResultRow {
        sweep_value,
        metric: format!("{name}_closed"),
        estimate: closed,
        stderr: 0.0,
        trials: 0,
    });
    rows.push(ResultRow {
        sweep_value,
        metric: format!("{name}_mc"),
        estimate: mc,
        stderr: se,
        trials: draws,
    });
    rows.push(ResultRow {
        sweep_value,
        metric: format!("{name}_abs_diff"),
        estimate: (closed - mc).abs(),
        stderr: se,
        trials: draws,
    });
}
