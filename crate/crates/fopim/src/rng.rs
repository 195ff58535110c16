//! Deterministic random-number plumbing: counter-derived per-trial streams
//! and circularly-symmetric complex Gaussian draws.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// splitmix64 step; used to derive independent stream seeds from a master
/// seed and counters.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent stream for one (experiment point, trial) pair. The mapping is
/// a pure function of the three counters, so results do not depend on how
/// trials are scheduled over workers.
pub fn trial_rng(master_seed: u64, point: u64, trial: u64) -> ChaCha8Rng {
    let a = splitmix64(master_seed ^ 0x5148_85F1_23C0_D43B);
    let b = splitmix64(a ^ point.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let c = splitmix64(b ^ trial.wrapping_mul(0xD1B5_4A32_D192_ED03));
    ChaCha8Rng::seed_from_u64(c)
}

/// Zero-mean circularly-symmetric complex Gaussian with total variance
/// `variance` (so each real dimension has variance `variance / 2`).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}
