//! Communication-user decoders.
//!
//! Two detectors share the matched-filter-bank front end:
//!
//! * [`mltsd_decode`] — two-stage detection. Stage one picks the N strongest
//!   filter outputs as the transmitted offset set; stage two runs a joint
//!   (antenna, symbol) maximum-likelihood decision per detected offset,
//!   J * N hypotheses each, J * N^2 per frame.
//! * [`ml_decode`] — the exhaustive baseline. Filter outputs are summed per
//!   receive antenna, the offset set is fixed by stage one, and all
//!   2^permutation_bits arrangements times J^N symbol vectors are searched.
//!
//! The exhaustive search walks hypotheses starting from the two-stage
//! estimate and stops early only when it holds a residual at floating-point
//! zero, which certifies global optimality (residuals are non-negative).
//! With noise present that never triggers, so the measured hypothesis count
//! equals the full 2^permutation_bits * J^N.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::channel::{comm_phase, ChannelRealization, FilterBankOutput};
use crate::config::SystemConfig;
use crate::im_codec::{
    permutation_rank, permutation_unrank, FrameEstimate, ImCodec, OffsetEstimate,
};

/// Joint antenna/symbol decision for one detected offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymbolDecision {
    pub antenna: usize,
    pub symbol_label: usize,
}

/// Result of a full two-stage decode.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome {
    pub bits: Vec<bool>,
    pub estimate: FrameEstimate,
    pub hypothesis_count: u64,
}

/// Result of the exhaustive baseline decode.
#[derive(Debug, Clone, PartialEq)]
pub struct MlOutcome {
    pub bits: Vec<bool>,
    pub hypothesis_count: u64,
}

/// Stage one: indices of the `count` largest column energies, in descending
/// energy order. Ties break toward the lowest index.
pub fn stage_one(bank: &FilterBankOutput, count: usize) -> Vec<usize> {
    let columns = bank.outputs.ncols();
    let energies: Vec<f64> = (0..columns)
        .map(|p| bank.outputs.column(p).iter().map(|z| z.norm_sqr()).sum())
        .collect();
    let mut order: Vec<usize> = (0..columns).collect();
    order.sort_by(|&a, &b| {
        energies[b]
            .partial_cmp(&energies[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    order.truncate(count);
    order
}

/// Residual of hypothesis `scaled * c` against observation statistics
/// (rr = |y|^2, g = s^H y, ss = |s|^2), i.e. |y - s c|^2.
#[inline]
fn hypothesis_residual(rr: f64, g: Complex64, ss: f64, point: Complex64, point_power: f64) -> f64 {
    rr - 2.0 * (point.re * g.re + point.im * g.im) + point_power * ss
}

/// Stage two: joint maximum-likelihood (antenna, symbol) decision for one
/// detected offset, using genie channel state and carrier phases. Returns
/// the decision and the number of hypotheses evaluated (always J * N).
pub fn stage_two(
    bank: &FilterBankOutput,
    offset: usize,
    channel: &ChannelRealization,
    cfg: &SystemConfig,
    codec: &ImCodec,
) -> (SymbolDecision, u64) {
    let n = cfg.tx_antennas;
    let amplitude = (cfg.total_power / n as f64).sqrt();
    let constellation = codec.constellation();
    let points = constellation.points();
    let observation = bank.outputs.column(offset);
    let rr: f64 = observation.iter().map(|z| z.norm_sqr()).sum();

    let mut best = (f64::INFINITY, 0usize, 0usize);
    let mut count = 0u64;
    for antenna in 0..n {
        let gain = amplitude * comm_phase(antenna, offset, cfg);
        let column = channel.gains.column(antenna + n * offset);
        let mut g = Complex64::default();
        let mut ss = 0.0;
        for (h, y) in column.iter().zip(observation.iter()) {
            let s = gain * h;
            g += s.conj() * y;
            ss += s.norm_sqr();
        }
        for (label, point) in points.iter().enumerate() {
            let residual = hypothesis_residual(rr, g, ss, *point, point.norm_sqr());
            count += 1;
            if residual < best.0 {
                best = (residual, antenna, label);
            }
        }
    }
    (
        SymbolDecision {
            antenna: best.1,
            symbol_label: best.2,
        },
        count,
    )
}

/// Full two-stage decode of one pulse.
pub fn mltsd_decode(
    bank: &FilterBankOutput,
    channel: &ChannelRealization,
    cfg: &SystemConfig,
    codec: &ImCodec,
) -> DecodeOutcome {
    let offsets = stage_one(bank, cfg.tx_antennas);
    let mut entries = Vec::with_capacity(offsets.len());
    let mut count = 0u64;
    for &offset in &offsets {
        let (decision, evaluated) = stage_two(bank, offset, channel, cfg, codec);
        count += evaluated;
        entries.push(OffsetEstimate {
            offset,
            antenna: decision.antenna,
            symbol_label: decision.symbol_label,
        });
    }
    let estimate = FrameEstimate { entries };
    DecodeOutcome {
        bits: codec.decode(&estimate),
        estimate,
        hypothesis_count: count,
    }
}

/// Exhaustive baseline decode of one pulse.
pub fn ml_decode(
    bank: &FilterBankOutput,
    channel: &ChannelRealization,
    cfg: &SystemConfig,
    codec: &ImCodec,
) -> MlOutcome {
    let n = cfg.tx_antennas;
    let l = cfg.comm_rx_antennas;
    let budget = codec.budget();
    let arrangements = 1u64 << budget.permutation_bits;
    let constellation = codec.constellation();
    let points = constellation.points();
    let point_powers: Vec<f64> = points.iter().map(|p| p.norm_sqr()).collect();
    let order = constellation.order();
    let amplitude = (cfg.total_power / n as f64).sqrt();

    // Per-antenna sum over the filter bank.
    let mut summed = DVector::<Complex64>::zeros(l);
    for p in 0..cfg.pool_size {
        summed += bank.outputs.column(p);
    }

    let mut detected = stage_one(bank, n);
    detected.sort_unstable();
    let sorted_set = detected;

    // Seed the walk with the two-stage estimate so a zero-residual hypothesis
    // (noiseless reception) is certified immediately.
    let mut seed_arrangement = 0u64;
    let mut seed_digits = vec![0usize; n];
    {
        let mut slot_of_antenna = vec![usize::MAX; n];
        let mut labels = vec![0usize; n];
        let mut valid = true;
        for (slot, &offset) in sorted_set.iter().enumerate() {
            let (decision, _) = stage_two(bank, offset, channel, cfg, codec);
            if slot_of_antenna[decision.antenna] != usize::MAX {
                valid = false;
                break;
            }
            slot_of_antenna[decision.antenna] = slot;
            labels[decision.antenna] = decision.symbol_label;
        }
        if valid {
            if let Ok(rank) = permutation_rank(&slot_of_antenna) {
                if rank < arrangements {
                    seed_arrangement = rank;
                    seed_digits = labels;
                }
            }
        }
    }

    // Residuals are evaluated through the quadratic expansion, whose
    // cancellation error at an exact match scales with the observation
    // energy; the certificate threshold sits far above that and far below
    // any physical noise floor.
    let rr0: f64 = summed.iter().map(|z| z.norm_sqr()).sum();
    let zero_tolerance = 1e-12 * (1.0 + rr0);
    let symbol_states: u64 = (order as u64).pow(n as u32);

    let mut best_residual = f64::INFINITY;
    let mut best_arrangement = 0u64;
    let mut best_digits = vec![0usize; n];
    let mut count = 0u64;

    // Reusable per-arrangement state.
    let mut columns: Vec<DVector<Complex64>> = vec![DVector::zeros(l); n];
    let mut column_powers = vec![0.0f64; n];
    let mut partials: Vec<DVector<Complex64>> = vec![DVector::zeros(l); n];
    let mut digits = vec![0usize; n];

    'outer: for step in 0..arrangements {
        let arrangement = (seed_arrangement + step) % arrangements;
        let perm = permutation_unrank(arrangement, n).expect("rank below codebook size");
        for antenna in 0..n {
            let offset = sorted_set[perm[antenna]];
            let gain = amplitude * comm_phase(antenna, offset, cfg);
            let source = channel.gains.column(antenna + n * offset);
            for (dst, src) in columns[antenna].iter_mut().zip(source.iter()) {
                *dst = gain * src;
            }
            column_powers[antenna] = columns[antenna].iter().map(|z| z.norm_sqr()).sum();
        }

        if arrangement == seed_arrangement && step == 0 {
            digits.copy_from_slice(&seed_digits);
        } else {
            digits.iter_mut().for_each(|d| *d = 0);
        }

        // partials[d] = summed - sum_{i<d} columns[i] * point(digits[i])
        partials[0].copy_from(&summed);
        for d in 0..n - 1 {
            let point = points[digits[d]];
            let (head, tail) = partials.split_at_mut(d + 1);
            tail[0].copy_from(&head[d]);
            tail[0].axpy(-point, &columns[d], Complex64::new(1.0, 0.0));
        }

        let mut remaining = symbol_states;
        while remaining > 0 {
            // Evaluate the innermost digit as a batch against the current
            // prefix residual.
            let prefix = &partials[n - 1];
            let rr: f64 = prefix.iter().map(|z| z.norm_sqr()).sum();
            let g: Complex64 = columns[n - 1].dotc(prefix);
            let ss = column_powers[n - 1];
            let start = digits[n - 1];
            let take = ((order - start) as u64).min(remaining) as usize;
            for j in start..start + take {
                let residual = hypothesis_residual(rr, g, ss, points[j], point_powers[j]);
                count += 1;
                if residual < best_residual {
                    best_residual = residual;
                    best_arrangement = arrangement;
                    digits[n - 1] = j;
                    best_digits.copy_from_slice(&digits);
                    if best_residual <= zero_tolerance {
                        break 'outer;
                    }
                }
            }
            remaining -= take as u64;
            if remaining == 0 {
                break;
            }

            // Advance the prefix odometer (digits[0..n-1]), wrapping to all
            // zeros when it overflows mid-cycle.
            digits[n - 1] = 0;
            let mut level = n - 1;
            loop {
                if level == 0 {
                    for d in digits[..n - 1].iter_mut() {
                        *d = 0;
                    }
                    partials[0].copy_from(&summed);
                    for d in 0..n - 1 {
                        let point = points[digits[d]];
                        let (head, tail) = partials.split_at_mut(d + 1);
                        tail[0].copy_from(&head[d]);
                        tail[0].axpy(-point, &columns[d], Complex64::new(1.0, 0.0));
                    }
                    break;
                }
                level -= 1;
                if digits[level] + 1 < order {
                    digits[level] += 1;
                    for d in digits[level + 1..n - 1].iter_mut() {
                        *d = 0;
                    }
                    for d in level..n - 1 {
                        let point = points[digits[d]];
                        let (head, tail) = partials.split_at_mut(d + 1);
                        tail[0].copy_from(&head[d]);
                        tail[0].axpy(-point, &columns[d], Complex64::new(1.0, 0.0));
                    }
                    break;
                }
                digits[level] = 0;
            }
        }
    }

    // Map the winning hypothesis back to bits.
    let perm = permutation_unrank(best_arrangement, n).expect("rank below codebook size");
    let entries = (0..n)
        .map(|antenna| OffsetEstimate {
            offset: sorted_set[perm[antenna]],
            antenna,
            symbol_label: best_digits[antenna],
        })
        .collect();
    MlOutcome {
        bits: codec.decode(&FrameEstimate { entries }),
        hypothesis_count: count,
    }
}
