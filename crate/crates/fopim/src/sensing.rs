//! Radar snapshot synthesis and the two-step maximum-likelihood estimator.
//!
//! Each pulse yields an MN-element compensated snapshot
//! `xi * sqrt(Ps/N) a(theta) kron [b_k(dr) had c(theta)] + noise`, where the
//! transmit range steering `b_k` depends on the pulse's frequency offsets and
//! on the residual range `dr` inside the coarse range bin. The estimator
//! first beamforms over angle (the range phases drop out of the column-wise
//! energy), then grid-searches `dr` in `[-c/4B, c/4B]` with the angle held
//! fixed. Grids are coarse-to-fine with the refinement centered on the
//! running best point.
//!
//! A matched-total-bandwidth conventional MIMO baseline shares the angle
//! path (its snapshots simply carry no range phase) and models pulse
//! compression range as uniform over one bin of width `c / (2 P df)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::config::{SystemConfig, SPEED_OF_LIGHT};
use crate::rng::complex_gaussian;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SensingError {
    #[error("no snapshots supplied")]
    NoSnapshots,
    #[error("steering vector is zero")]
    ZeroSteering,
    #[error("snapshot length {got} does not match M*N = {expected}")]
    SnapshotShape { got: usize, expected: usize },
}

/// Ground truth for one coherent processing interval.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingScenario {
    pub target_angle_rad: f64,
    pub target_range_m: f64,
    /// Complex reflection coefficient (carrier-phase term absorbed).
    pub reflection: Complex64,
    /// Coarse range from fast-time matched filtering.
    pub coarse_range_m: f64,
    /// Offset pool indices per antenna, one vector per pulse.
    pub pulse_offsets: Vec<Vec<usize>>,
}

impl SensingScenario {
    /// Residual range inside the coarse bin, dr = R_T - r_c.
    pub fn range_offset(&self) -> f64 {
        self.target_range_m - self.coarse_range_m
    }

    pub fn pulses(&self) -> usize {
        self.pulse_offsets.len()
    }
}

/// Compensated received vector for one pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingSnapshot {
    /// MN complex samples, receive element major: index m*N + n.
    pub samples: DVector<Complex64>,
    /// The pulse's offset pool indices per transmit antenna.
    pub offsets: Vec<usize>,
    /// Per-element noise power N1.
    pub noise_power: f64,
}

/// Half width of the residual range interval, c / (4 B) with B = df.
pub fn max_range_offset(cfg: &SystemConfig) -> f64 {
    SPEED_OF_LIGHT / (4.0 * cfg.freq_increment_hz)
}

/// Pulse-compression bin width of the matched-bandwidth MIMO baseline,
/// c / (2 P df).
pub fn pulse_compression_bin_width(cfg: &SystemConfig) -> f64 {
    SPEED_OF_LIGHT / (2.0 * cfg.pool_size as f64 * cfg.freq_increment_hz)
}

/// Receive angle steering vector (length M, first entry 1).
pub fn steering_rx(angle_rad: f64, cfg: &SystemConfig) -> DVector<Complex64> {
    let rate = 2.0 * std::f64::consts::PI * cfg.sensing_rx_spacing_m / cfg.wavelength_m()
        * angle_rad.sin();
    DVector::from_fn(cfg.sensing_rx_antennas, |m, _| {
        Complex64::from_polar(1.0, rate * m as f64)
    })
}

/// Transmit angle steering vector (length N, first entry 1).
pub fn steering_tx(angle_rad: f64, cfg: &SystemConfig) -> DVector<Complex64> {
    let rate =
        2.0 * std::f64::consts::PI * cfg.tx_spacing_m / cfg.wavelength_m() * angle_rad.sin();
    DVector::from_fn(cfg.tx_antennas, |n, _| {
        Complex64::from_polar(1.0, rate * n as f64)
    })
}

/// Transmit range steering vector for one pulse's offsets (length N).
pub fn steering_range(
    range_offset_m: f64,
    offsets: &[usize],
    cfg: &SystemConfig,
) -> DVector<Complex64> {
    let scale = -4.0 * std::f64::consts::PI / SPEED_OF_LIGHT * range_offset_m;
    DVector::from_fn(offsets.len(), |n, _| {
        Complex64::from_polar(1.0, scale * cfg.offset_hz(offsets[n]))
    })
}

/// Joint steering vector sqrt(Ps/N) a(theta) kron [b(dr) had c(theta)].
pub fn joint_steering(
    angle_rad: f64,
    range_offset_m: f64,
    offsets: &[usize],
    cfg: &SystemConfig,
) -> DVector<Complex64> {
    let a = steering_rx(angle_rad, cfg);
    let c = steering_tx(angle_rad, cfg);
    let b = steering_range(range_offset_m, offsets, cfg);
    let n = cfg.tx_antennas;
    let amplitude = (cfg.total_power / n as f64).sqrt();
    DVector::from_fn(cfg.sensing_rx_antennas * n, |i, _| {
        let (m, k) = (i / n, i % n);
        amplitude * a[m] * b[k] * c[k]
    })
}

/// Synthesize the compensated snapshot of one pulse.
pub fn synth_snapshot<R: Rng + ?Sized>(
    scenario: &SensingScenario,
    pulse: usize,
    cfg: &SystemConfig,
    rng: &mut R,
    noiseless: bool,
) -> SensingSnapshot {
    let offsets = &scenario.pulse_offsets[pulse];
    let steering = joint_steering(
        scenario.target_angle_rad,
        scenario.range_offset(),
        offsets,
        cfg,
    );
    let mut samples = steering * scenario.reflection;
    if !noiseless {
        for sample in samples.iter_mut() {
            *sample += complex_gaussian(rng, cfg.sensing_noise_power);
        }
    }
    SensingSnapshot {
        samples,
        offsets: offsets.clone(),
        noise_power: cfg.sensing_noise_power,
    }
}

/// Synthesize the whole CPI.
pub fn synth_cpi<R: Rng + ?Sized>(
    scenario: &SensingScenario,
    cfg: &SystemConfig,
    rng: &mut R,
    noiseless: bool,
) -> Vec<SensingSnapshot> {
    (0..scenario.pulses())
        .map(|k| synth_snapshot(scenario, k, cfg, rng, noiseless))
        .collect()
}

/// Grid-search parameters for the two-step estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchGrid {
    pub angle_coarse_step_deg: f64,
    pub angle_fine_step_deg: f64,
    /// Points of the coarse residual-range grid (odd, so zero is a point).
    pub range_coarse_points: usize,
    /// Range refinement stops once the step is at most this.
    pub range_fine_step_m: f64,
    /// Points per refinement pass (odd).
    pub refine_points: usize,
}

impl Default for SearchGrid {
    fn default() -> Self {
        SearchGrid {
            angle_coarse_step_deg: 0.1,
            angle_fine_step_deg: 0.001,
            range_coarse_points: 201,
            range_fine_step_m: 1e-4,
            refine_points: 201,
        }
    }
}

/// First step: beamform over angle, accumulating the objective over pulses.
/// Returns the refined maximizer in radians.
pub fn estimate_angle(
    snapshots: &[SensingSnapshot],
    cfg: &SystemConfig,
    grid: &SearchGrid,
) -> Result<f64, SensingError> {
    if snapshots.is_empty() {
        return Err(SensingError::NoSnapshots);
    }
    let m = cfg.sensing_rx_antennas;
    let n = cfg.tx_antennas;
    // Sum of Y_k Y_k^H: the per-angle objective becomes a quadratic form.
    let mut covariance = DMatrix::<Complex64>::zeros(m, m);
    for snapshot in snapshots {
        if snapshot.samples.len() != m * n {
            return Err(SensingError::SnapshotShape {
                got: snapshot.samples.len(),
                expected: m * n,
            });
        }
        let matrix = DMatrix::from_fn(m, n, |row, col| snapshot.samples[row * n + col]);
        covariance += &matrix * matrix.adjoint();
    }
    let objective = |angle_deg: f64| -> f64 {
        let a = steering_rx(angle_deg.to_radians(), cfg);
        a.dotc(&(&covariance * &a)).re
    };

    let coarse_step = grid.angle_coarse_step_deg;
    let half_span = (90.0 / coarse_step).floor() as i64;
    let mut best = (f64::NEG_INFINITY, 0.0f64);
    for i in -half_span..=half_span {
        let angle_deg = i as f64 * coarse_step;
        let value = objective(angle_deg);
        if value > best.0 {
            best = (value, angle_deg);
        }
    }
    // Refine around the coarse winner down to the fine step.
    let mut center = best.1;
    let mut step = coarse_step;
    let half = (grid.refine_points / 2) as i64;
    while step > grid.angle_fine_step_deg {
        let fine = (step / half as f64).max(grid.angle_fine_step_deg);
        let mut local_best = (f64::NEG_INFINITY, center);
        for i in -half..=half {
            let angle_deg = (center + i as f64 * fine).clamp(-90.0, 90.0);
            let value = objective(angle_deg);
            if value > local_best.0 {
                local_best = (value, angle_deg);
            }
        }
        center = local_best.1;
        step = fine;
    }
    Ok(center.to_radians())
}

/// Least-squares amplitude given the observation and a steering hypothesis;
/// the white noise covariance cancels.
pub fn amplitude_estimate(
    observation: &DVector<Complex64>,
    steering: &DVector<Complex64>,
) -> Result<Complex64, SensingError> {
    let denom: f64 = steering.iter().map(|z| z.norm_sqr()).sum();
    if denom == 0.0 {
        return Err(SensingError::ZeroSteering);
    }
    Ok(steering.dotc(observation) / denom)
}

/// Residual-range estimate and its absolute counterpart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeEstimate {
    pub range_offset_m: f64,
    pub absolute_range_m: f64,
}

/// Second step: with the angle fixed, maximize the concentrated likelihood
/// over the residual range.
pub fn estimate_range(
    snapshots: &[SensingSnapshot],
    angle_rad: f64,
    coarse_range_m: f64,
    cfg: &SystemConfig,
    grid: &SearchGrid,
) -> Result<RangeEstimate, SensingError> {
    if snapshots.is_empty() {
        return Err(SensingError::NoSnapshots);
    }
    let m = cfg.sensing_rx_antennas;
    let n = cfg.tx_antennas;
    let a = steering_rx(angle_rad, cfg);
    let c = steering_tx(angle_rad, cfg);
    // Collapse each snapshot to per-antenna correlations so that the range
    // sweep only touches N terms per pulse:
    //   y^H v(theta, dr) = sqrt(Ps/N) sum_n b_n(dr) * t[k][n]
    // with t[k][n] = c_n * sum_m conj(y[m*N+n]) a_m.
    let mut correlations: Vec<Vec<Complex64>> = Vec::with_capacity(snapshots.len());
    for snapshot in snapshots {
        if snapshot.samples.len() != m * n {
            return Err(SensingError::SnapshotShape {
                got: snapshot.samples.len(),
                expected: m * n,
            });
        }
        let mut row = vec![Complex64::default(); n];
        for (col, item) in row.iter_mut().enumerate() {
            let mut acc = Complex64::default();
            for antenna in 0..m {
                acc += snapshot.samples[antenna * n + col].conj() * a[antenna];
            }
            *item = acc * c[col];
        }
        correlations.push(row);
    }
    let pool_rate: Vec<f64> = (0..cfg.pool_size)
        .map(|p| -4.0 * std::f64::consts::PI / SPEED_OF_LIGHT * cfg.offset_hz(p))
        .collect();
    let objective = |range_offset: f64| -> f64 {
        let table: Vec<Complex64> = pool_rate
            .iter()
            .map(|rate| Complex64::from_polar(1.0, rate * range_offset))
            .collect();
        snapshots
            .iter()
            .zip(correlations.iter())
            .map(|(snapshot, row)| {
                let mut acc = Complex64::default();
                for (offset, t) in snapshot.offsets.iter().zip(row.iter()) {
                    acc += table[*offset] * t;
                }
                acc.norm_sqr()
            })
            .sum()
    };

    // The likelihood is periodic in the residual range with period c/(2 df),
    // exactly the searched interval, so the two edges alias each other and a
    // target near one edge produces a second, equal coarse peak at the
    // opposite edge. Refining the two best coarse candidates separately and
    // keeping the higher refined peak resolves the tie toward the true side.
    let limit = max_range_offset(cfg);
    let coarse_half = (grid.range_coarse_points / 2) as i64;
    let coarse_step = limit / coarse_half as f64;
    let mut best = (f64::NEG_INFINITY, 0.0f64);
    let mut runner_up = (f64::NEG_INFINITY, 0.0f64);
    for i in -coarse_half..=coarse_half {
        let x = i as f64 * coarse_step;
        let value = objective(x);
        if value > best.0 {
            runner_up = best;
            best = (value, x);
        } else if value > runner_up.0 {
            runner_up = (value, x);
        }
    }

    let refine = |start: f64| -> (f64, f64) {
        let mut center = start;
        let mut step = coarse_step;
        let half = (grid.refine_points / 2) as i64;
        let mut value = f64::NEG_INFINITY;
        while step > grid.range_fine_step_m {
            let fine = step / half as f64;
            let mut local_best = (f64::NEG_INFINITY, center);
            for i in -half..=half {
                let x = (center + i as f64 * fine).clamp(-limit, limit);
                let v = objective(x);
                if v > local_best.0 {
                    local_best = (v, x);
                }
            }
            center = local_best.1;
            value = local_best.0;
            step = fine;
        }
        (value, center)
    };

    let refined_best = refine(best.1);
    // A runner-up adjacent to the winner belongs to the same peak; only a
    // detached second peak (the edge alias) is worth its own refinement.
    let detached = (runner_up.1 - best.1).abs() > 2.0 * coarse_step;
    let center = if detached {
        let refined_runner_up = refine(runner_up.1);
        if refined_runner_up.0 > refined_best.0 {
            refined_runner_up.1
        } else {
            refined_best.1
        }
    } else {
        refined_best.1
    };
    Ok(RangeEstimate {
        range_offset_m: center,
        absolute_range_m: coarse_range_m + center,
    })
}

/// Matched-bandwidth MIMO baseline: the shared beamformer for angle (the
/// baseline's snapshots carry no range phase) and a pulse-compression range
/// model, uniform over one bin around the true range.
pub fn mimo_baseline<R: Rng + ?Sized>(
    snapshots: &[SensingSnapshot],
    true_range_m: f64,
    cfg: &SystemConfig,
    grid: &SearchGrid,
    rng: &mut R,
) -> Result<(f64, f64), SensingError> {
    let angle = estimate_angle(snapshots, cfg, grid)?;
    let bin = pulse_compression_bin_width(cfg);
    let range = true_range_m + rng.random_range(-0.5 * bin..0.5 * bin);
    Ok((angle, range))
}
