//! Shared helpers for the integration suites: an independent brute-force
//! reference decoder and small statistics utilities.

use fopim::channel::{comm_phase, ChannelRealization, FilterBankOutput};
use fopim::config::SystemConfig;
use fopim::im_codec::QamConstellation;
use nalgebra::DVector;
use num_complex::Complex64;

/// Reference exhaustive decoder built from first principles: it forms the
/// summed statistic itself, fixes the offset set by direct energy sorting,
/// enumerates arrangements in factorial-number order and symbol vectors in
/// odometer order, and evaluates every hypothesis through a direct
/// per-element reconstruction. The combination rank is recovered by
/// brute-force lexicographic counting. No ranking code or incremental
/// algebra is shared with the implementation under test.
pub fn reference_ml_bits(
    bank: &FilterBankOutput,
    channel: &ChannelRealization,
    cfg: &SystemConfig,
) -> Vec<bool> {
    let n = cfg.tx_antennas;
    let l = cfg.comm_rx_antennas;
    let p = cfg.pool_size;

    // Summed statistic per receive antenna.
    let mut summed = vec![Complex64::default(); l];
    for col in 0..p {
        for (row, s) in summed.iter_mut().enumerate() {
            *s += bank.outputs[(row, col)];
        }
    }

    // Offset set by descending column energy, ties toward the lower index.
    let mut energies: Vec<(usize, f64)> = (0..p)
        .map(|c| {
            (
                c,
                (0..l).map(|r| bank.outputs[(r, c)].norm_sqr()).sum::<f64>(),
            )
        })
        .collect();
    energies.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    let mut set: Vec<usize> = energies[..n].iter().map(|e| e.0).collect();
    set.sort_unstable();

    // All permutations of 0..n in factorial-number-system order, truncated
    // to the arrangement codebook.
    let mut perms: Vec<Vec<usize>> = Vec::new();
    let mut digits = vec![0usize; n];
    loop {
        let mut pool_items: Vec<usize> = (0..n).collect();
        perms.push(digits.iter().map(|&d| pool_items.remove(d)).collect());
        let mut i = n;
        let mut done = true;
        while i > 0 {
            i -= 1;
            if digits[i] + 1 < n - i {
                digits[i] += 1;
                for d in digits[i + 1..].iter_mut() {
                    *d = 0;
                }
                done = false;
                break;
            }
            digits[i] = 0;
        }
        if done {
            break;
        }
    }
    let budget = cfg.bit_budget();
    perms.truncate(1usize << budget.permutation_bits);

    let constellation = QamConstellation::new(cfg.qam_order).unwrap();
    let amplitude = (cfg.total_power / n as f64).sqrt();
    let bps = cfg.bits_per_symbol();

    let mut best = (f64::INFINITY, 0usize, vec![0usize; n]);
    let mut labels = vec![0usize; n];
    for (rank, perm) in perms.iter().enumerate() {
        let columns: Vec<DVector<Complex64>> = (0..n)
            .map(|antenna| {
                let offset = set[perm[antenna]];
                let phase = comm_phase(antenna, offset, cfg);
                DVector::from_fn(l, |row, _| {
                    amplitude * phase * channel.gains[(row, antenna + n * offset)]
                })
            })
            .collect();
        labels.iter_mut().for_each(|x| *x = 0);
        loop {
            let mut residual = 0.0;
            for row in 0..l {
                let mut value = summed[row];
                for antenna in 0..n {
                    value -= columns[antenna][row] * constellation.point(labels[antenna]);
                }
                residual += value.norm_sqr();
            }
            if residual < best.0 {
                best = (residual, rank, labels.clone());
            }
            let mut digit = n;
            let mut rolled_over = true;
            while digit > 0 {
                digit -= 1;
                if labels[digit] + 1 < cfg.qam_order {
                    labels[digit] += 1;
                    for x in labels[digit + 1..].iter_mut() {
                        *x = 0;
                    }
                    rolled_over = false;
                    break;
                }
                labels[digit] = 0;
            }
            if rolled_over {
                break;
            }
        }
    }

    // Lexicographic rank of `set` by direct counting.
    fn subsets_from(pool: usize, start: usize, k: usize) -> u64 {
        if k == 0 {
            return 1;
        }
        (start..pool).map(|c| subsets_from(pool, c + 1, k - 1)).sum()
    }
    fn count_before(set: &[usize], pool: usize, start: usize, depth: usize) -> u64 {
        if depth == set.len() {
            return 0;
        }
        let mut count = 0u64;
        for candidate in start..set[depth] {
            count += subsets_from(pool, candidate + 1, set.len() - depth - 1);
        }
        count + count_before(set, pool, set[depth] + 1, depth + 1)
    }
    let combination_rank = count_before(&set, p, 0, 0);

    let (_, winner_rank, winner_labels) = best;
    let mut bits = Vec::with_capacity(budget.total_bits());
    let valid = combination_rank < (1u64 << budget.combination_bits);
    for i in (0..budget.combination_bits).rev() {
        bits.push(valid && (combination_rank >> i) & 1 == 1);
    }
    for i in (0..budget.permutation_bits).rev() {
        bits.push(valid && (winner_rank as u64 >> i) & 1 == 1);
    }
    // Symbol groups by descending offset under the winning arrangement.
    let winner = &perms[winner_rank];
    let mut antenna_order: Vec<usize> = (0..n).collect();
    antenna_order.sort_by(|&a, &b| set[winner[b]].cmp(&set[winner[a]]));
    for &antenna in &antenna_order {
        let label = winner_labels[antenna];
        for i in (0..bps).rev() {
            bits.push((label >> i) & 1 == 1);
        }
    }
    bits
}

/// Sample standard error of a proportion estimated from `events` out of
/// `total`.
#[allow(dead_code)]
pub fn proportion_stderr(events: u64, total: u64) -> f64 {
    let p = events as f64 / total as f64;
    (p * (1.0 - p) / total as f64).sqrt()
}
