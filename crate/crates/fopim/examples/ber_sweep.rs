//! Short BER sweep over the reference link: Monte Carlo rates for both
//! decoders against the analytic bound.
//!
//! Run with: cargo run --example ber_sweep
//! (The shipped preset version: cargo run -- ber --preset fig3b)

use fopim::harness::{run_ber_experiment, ExperimentSpec, RunOptions};

fn main() {
    let mut spec = ExperimentSpec::preset("fig3b").unwrap();
    // Desk-scale cut of the full preset.
    spec.sweep.values = vec![0.0, 6.0, 12.0];
    spec.monte_carlo.max_frames = 8_000;
    spec.monte_carlo.min_frames = 4_000;
    spec.monte_carlo.ml_max_frames = 200;
    spec.seed = 7;

    let table = run_ber_experiment(&spec, &RunOptions::default()).unwrap();
    println!(
        "{:>8} {:>14} {:>14} {:>14}",
        "snr_db", "ber_mltsd", "ber_ml", "bound_mltsd"
    );
    for &snr_db in &spec.sweep.values {
        let get = |name: &str| {
            table
                .rows
                .iter()
                .find(|r| r.metric == name && r.sweep_value == snr_db)
                .map(|r| r.estimate)
                .unwrap()
        };
        println!(
            "{snr_db:>8} {:>14.6e} {:>14.6e} {:>14.6e}",
            get("ber_mltsd"),
            get("ber_ml"),
            get("bound_mltsd")
        );
    }
    println!("\nfull CSV schema output: see --out on the CLI");
}
