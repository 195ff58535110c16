//! Simulation laboratory for an FDA-MIMO integrated sensing and
//! communication link that carries data with frequency-offset permutation
//! index modulation (FOPIM).
//!
//! The crate covers the full loop:
//!
//! * [`im_codec`] — bits to offset combinations, arrangements and QAM
//!   symbols, and back; bits-per-pulse formulas for the compared schemes.
//! * [`channel`] — frequency-selective Rayleigh block fading and the
//!   matched-filter-bank outputs at the communication user.
//! * [`comm_rx`] — the two-stage detector and the exhaustive baseline, with
//!   hypothesis-count instrumentation.
//! * [`ber_theory`] — the closed-form upper bound on the detector's bit
//!   error probability.
//! * [`sensing`] — radar snapshot synthesis and the two-step
//!   maximum-likelihood angle/range estimator plus a matched-bandwidth MIMO
//!   baseline.
//! * [`crb`] — Fisher information over a CPI and the range/angle bounds.
//! * [`harness`] — seeded, reproducible experiments with CSV/JSON output.
//!
//! The `examples/` directory holds one runnable program per capability; the
//! `fopim` binary exposes the same runners behind a small CLI.

pub mod ber_theory;
pub mod channel;
pub mod comm_rx;
pub mod config;
pub mod crb;
pub mod harness;
pub mod im_codec;
pub mod numerics;
pub mod rng;
pub mod sensing;

pub use config::{BitBudget, SystemConfig};
pub use im_codec::{FopimFrame, ImCodec};
