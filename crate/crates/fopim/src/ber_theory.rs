//! Closed-form upper bound on the average bit error probability of the
//! two-stage detector, assembled from the per-event probabilities of the
//! detection chain.
//!
//! The chain: a signal-bearing filter output can be out-energied by a
//! noise-only output (`filter_miss_prob`), which corrupts the detected
//! offset set (`offset_set_error_bound`); per detected offset the joint
//! antenna/symbol decision can pick the wrong antenna (pairwise error
//! probability averaged over the Rayleigh fades); index bit errors follow
//! from the uniform-confusion model, and constellation bit errors combine
//! the antenna-decision error with Gray-coded rectangular QAM bit error
//! probabilities under maximal-ratio combining.
//!
//! All event probabilities reduce to one kernel: the probability-like
//! series `p^L * sum_{k<L} C(L-1+k, k) (1-p)^k`, which is both
//! P(Gamma_L(b) < Gamma_L(a)) for p = a / (a + b) and the Rayleigh/MRC
//! average of Q(sqrt(2 c gamma)) for p = (1 - sqrt(c gbar / (1 + c gbar)))/2.

use crate::config::SystemConfig;
use crate::im_codec::combinatorics::binomial;
use crate::im_codec::QamConstellation;

/// Every component of the upper-bound evaluation.
///
/// `antenna_confusion_bound` (the pairwise union bound) and everything
/// downstream of it are upper bounds, not exact probabilities; at very low
/// SNR they can exceed 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerBreakdown {
    /// P_e: one noise-only filter output-energies a given signal output.
    pub filter_miss: f64,
    /// P_comb: the detected offset set is wrong (upper bound).
    pub set_error: f64,
    /// P_O: one given offset drops out of the detected set.
    pub offset_miss: f64,
    /// P_I: antenna decision error for a correctly detected offset (union
    /// bound over antenna/symbol pairs).
    pub antenna_confusion_bound: f64,
    /// P_P: antenna decision error combining first-stage loss and confusion.
    pub antenna_error: f64,
    /// P_perm: at least one antenna decision error in the frame.
    pub arrangement_error: f64,
    /// P_df: index content (set or arrangement) wrong.
    pub index_event: f64,
    /// P_IM: average index bit error probability.
    pub index_bits: f64,
    /// P_QAM: QAM bit error probability given correct index detection.
    pub qam_bits: f64,
    /// P_con: average constellation bit error probability.
    pub constellation_bits: f64,
    /// P_MLTSD: budget-weighted average of index and constellation bit
    /// error probabilities.
    pub total: f64,
}

fn binomial_f(n: usize, k: usize) -> f64 {
    binomial(n as u64, k as u64) as f64
}

/// The shared diversity kernel `p^L * sum_{k=0}^{L-1} C(L-1+k,k) (1-p)^k`.
fn diversity_series(p: f64, branches: usize) -> f64 {
    let q = 1.0 - p;
    let mut sum = 0.0;
    for k in 0..branches {
        sum += binomial_f(branches - 1 + k, k) * q.powi(k as i32);
    }
    p.powi(branches as i32) * sum
}

/// Rayleigh/MRC tail parameter P(x) = (1 - sqrt(x / (1 + x))) / 2.
fn fade_tail(x: f64) -> f64 {
    0.5 * (1.0 - (x / (1.0 + x)).sqrt())
}

/// Total comm noise power for an SNR point. Zero transmit power pins the
/// noise scale to 1; every probability below is scale-free in that case.
fn noise_power(cfg: &SystemConfig, snr_db: f64) -> f64 {
    if cfg.total_power > 0.0 {
        cfg.total_power / 10f64.powf(snr_db / 10.0)
    } else {
        1.0
    }
}

/// P(|noise vector|^2 > |signal vector|^2) for L-element vectors whose
/// per-dimension variances are `sigma1_sq` (signal-bearing) and `sigma2_sq`
/// (noise-only).
pub fn prob_y_positive(sigma1_sq: f64, sigma2_sq: f64, branches: usize) -> f64 {
    let p = sigma2_sq / (sigma1_sq + sigma2_sq);
    diversity_series(p, branches)
}

/// The difference-variable density integrated by the validation oracle:
/// pdf of Y = |noise|^2 - |signal|^2 on y >= 0.
pub fn y_difference_pdf(y: f64, sigma1_sq: f64, sigma2_sq: f64, branches: usize) -> f64 {
    let l = branches;
    let s = sigma1_sq + sigma2_sq;
    let mut factorial = 1.0; // (l-1)!
    for i in 2..l {
        factorial *= i as f64;
    }
    let mut sum = 0.0;
    for i in 0..l {
        let num: f64 = (1..=(2 * (l - 1) - i)).map(|v| v as f64).product();
        let den: f64 = (1..=i).map(|v| v as f64).product::<f64>()
            * (1..=(l - 1 - i)).map(|v| v as f64).product::<f64>();
        sum += num / den * (sigma1_sq / s).powi((l - 1 - i) as i32)
            * (y / (2.0 * sigma2_sq)).powi(i as i32);
    }
    1.0 / (2.0 * sigma2_sq) * (-y / (2.0 * sigma2_sq)).exp() / factorial
        * (sigma2_sq / s).powi(l as i32)
        * sum
}

/// P_e: probability that a noise-only filter output carries more energy
/// than a signal-bearing one, averaged over the constellation.
pub fn filter_miss_prob(cfg: &SystemConfig, snr_db: f64) -> f64 {
    let n0 = noise_power(cfg, snr_db);
    let sigma2_sq = n0 / (2.0 * cfg.pool_size as f64);
    let constellation = QamConstellation::new(cfg.qam_order).expect("validated order");
    let mut sum = 0.0;
    for point in constellation.points() {
        let sigma1_sq = cfg.total_power * cfg.tap_variance * point.norm_sqr()
            / (2.0 * cfg.tx_antennas as f64)
            + sigma2_sq;
        sum += prob_y_positive(sigma1_sq, sigma2_sq, cfg.comm_rx_antennas);
    }
    sum / cfg.qam_order as f64
}

/// P_O: a given transmitted offset loses at least one energy comparison.
pub fn offset_miss_prob(cfg: &SystemConfig, snr_db: f64) -> f64 {
    let pe = filter_miss_prob(cfg, snr_db);
    1.0 - (1.0 - pe).powi((cfg.pool_size - cfg.tx_antennas) as i32)
}

/// P_comb: upper bound on the detected offset set being wrong.
pub fn offset_set_error_bound(cfg: &SystemConfig, snr_db: f64) -> f64 {
    let pe = filter_miss_prob(cfg, snr_db);
    1.0 - (1.0 - pe)
        .powi(((cfg.pool_size - cfg.tx_antennas) * cfg.tx_antennas) as i32)
}

/// Rayleigh-averaged pairwise probability of deciding a wrong antenna whose
/// hypothesis differs by a 2L-dimensional Gaussian of per-dimension variance
/// `sigma3_sq`.
pub fn antenna_pep(sigma3_sq: f64, cfg: &SystemConfig, snr_db: f64) -> f64 {
    let n0 = noise_power(cfg, snr_db);
    let alpha = cfg.pool_size as f64 * cfg.total_power * sigma3_sq
        / (2.0 * cfg.tx_antennas as f64 * n0);
    diversity_series(fade_tail(alpha), cfg.comm_rx_antennas)
}

/// P_I: union bound over wrong-antenna hypotheses and symbol pairs with the
/// 1/(N J) prefactor. The pairwise term depends only on the two symbol
/// powers, so the ordered antenna pairs collapse to a factor N (N - 1).
pub fn antenna_confusion_bound(cfg: &SystemConfig, snr_db: f64) -> f64 {
    let constellation = QamConstellation::new(cfg.qam_order).expect("validated order");
    let n = cfg.tx_antennas as f64;
    let mut sum = 0.0;
    for sent in constellation.points() {
        for guessed in constellation.points() {
            let sigma3_sq = cfg.tap_variance * (guessed.norm_sqr() + sent.norm_sqr()) / 2.0;
            sum += antenna_pep(sigma3_sq, cfg, snr_db);
        }
    }
    n * (n - 1.0) * sum / (n * cfg.qam_order as f64)
}

/// P_P: antenna decision error for one offset slot.
pub fn antenna_error_prob(cfg: &SystemConfig, snr_db: f64) -> f64 {
    let n = cfg.tx_antennas as f64;
    let p_o = offset_miss_prob(cfg, snr_db);
    let p_i = antenna_confusion_bound(cfg, snr_db);
    (n - 1.0) / n * p_o + (1.0 - p_o) * p_i
}

/// P_perm: at least one of the N antenna decisions fails.
pub fn arrangement_error_bound(cfg: &SystemConfig, snr_db: f64) -> f64 {
    1.0 - (1.0 - antenna_error_prob(cfg, snr_db)).powi(cfg.tx_antennas as i32)
}

/// P_IM from the index-event probability under uniform confusion over the
/// 2^k_IM - 1 wrong index words.
pub fn index_bit_error_from_event(index_event: f64, index_bits: usize) -> f64 {
    let words = 2f64.powi(index_bits as i32);
    words * index_event / (2.0 * (words - 1.0))
}

/// Gray-PAM bit error probability for bit position `bit` (1-based) of a
/// `levels`-ary axis, conditioned on a total post-combining SNR `gamma_tot`.
pub fn pam_bit_error_awgn(levels: usize, bit: usize, g: f64, gamma_tot: f64) -> f64 {
    pam_bit_error_kernel(levels, bit, |i| {
        crate::numerics::q_func((2.0 * i as f64 + 1.0) * g * (2.0 * gamma_tot).sqrt())
    })
}

/// Rayleigh/MRC-averaged Gray-PAM bit error probability for bit position
/// `bit` (1-based) of a `levels`-ary axis.
pub fn pam_bit_error(levels: usize, bit: usize, cfg: &SystemConfig, snr_db: f64) -> f64 {
    let n0 = noise_power(cfg, snr_db);
    let constellation = QamConstellation::new(cfg.qam_order).expect("validated order");
    let g = constellation.min_distance_param();
    let per_branch = cfg.pool_size as f64 * cfg.total_power * cfg.tap_variance
        / (cfg.tx_antennas as f64 * n0);
    pam_bit_error_kernel(levels, bit, |i| {
        let beta = ((2.0 * i as f64 + 1.0) * g).powi(2) * per_branch;
        diversity_series(fade_tail(beta), cfg.comm_rx_antennas)
    })
}

fn pam_bit_error_kernel<F: Fn(usize) -> f64>(levels: usize, bit: usize, tail: F) -> f64 {
    let m = levels as f64;
    let upper = ((1.0 - 2f64.powi(-(bit as i32))) * m) as usize;
    let mut sum = 0.0;
    for i in 0..upper {
        let scaled = i as f64 * 2f64.powi(bit as i32 - 1) / m;
        let sign = if (scaled.floor() as i64) % 2 == 0 { 1.0 } else { -1.0 };
        let weight = 2f64.powi(bit as i32 - 1) - (scaled + 0.5).floor();
        sum += sign * weight * tail(i);
    }
    2.0 / m * sum
}

/// P_QAM: average over the bits of both PAM axes.
pub fn qam_bit_error_prob(cfg: &SystemConfig, snr_db: f64) -> f64 {
    let constellation = QamConstellation::new(cfg.qam_order).expect("validated order");
    let (mu, eta) = constellation.axis_levels();
    let total_bits = cfg.bits_per_symbol();
    let mut sum = 0.0;
    for bit in 1..=mu.trailing_zeros() as usize {
        sum += pam_bit_error(mu, bit, cfg, snr_db);
    }
    for bit in 1..=eta.trailing_zeros() as usize {
        sum += pam_bit_error(eta, bit, cfg, snr_db);
    }
    sum / total_bits as f64
}

/// P_con from the antenna decision error and the QAM bit error probability.
pub fn constellation_bit_error(antenna_error: f64, qam_bits: f64) -> f64 {
    0.5 * antenna_error + (1.0 - antenna_error) * qam_bits
}

/// Evaluate the entire upper-bound chain at one SNR point.
pub fn mltsd_upper_bound(cfg: &SystemConfig, snr_db: f64) -> BerBreakdown {
    let budget = cfg.bit_budget();
    let filter_miss = filter_miss_prob(cfg, snr_db);
    let offset_miss = offset_miss_prob(cfg, snr_db);
    let set_error = offset_set_error_bound(cfg, snr_db);
    let antenna_confusion = antenna_confusion_bound(cfg, snr_db);
    let n = cfg.tx_antennas as f64;
    let antenna_error = (n - 1.0) / n * offset_miss + (1.0 - offset_miss) * antenna_confusion;
    let arrangement_error = 1.0 - (1.0 - antenna_error).powi(cfg.tx_antennas as i32);
    let index_event = 1.0 - (1.0 - set_error) * (1.0 - arrangement_error);
    let index_bits = index_bit_error_from_event(index_event, budget.index_bits());
    let qam_bits = qam_bit_error_prob(cfg, snr_db);
    let constellation_bits = constellation_bit_error(antenna_error, qam_bits);
    let k_im = budget.index_bits() as f64;
    let k_con = budget.constellation_bits as f64;
    let total = (index_bits * k_im + constellation_bits * k_con) / (k_im + k_con);
    BerBreakdown {
        filter_miss,
        set_error,
        offset_miss,
        antenna_confusion_bound: antenna_confusion,
        antenna_error,
        arrangement_error,
        index_event,
        index_bits,
        qam_bits,
        constellation_bits,
        total,
    }
}
