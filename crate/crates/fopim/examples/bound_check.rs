//! Closed-form error probabilities against their Monte Carlo oracles at
//! reduced draw counts.
//!
//! Run with: cargo run --example bound_check
//! (The full-size randomized run: cargo run -- validate-bounds)

use fopim::harness::{run_bound_validation, ExperimentSpec, RunOptions};

fn main() {
    let mut spec = ExperimentSpec::bound_validation(19);
    spec.monte_carlo.oracle_draws = 300_000;
    spec.sweep.values = vec![0.0, 1.0];
    let table = run_bound_validation(&spec, &RunOptions::default()).unwrap();

    println!(
        "{:>6} {:>14} {:>14} {:>14} {:>12}",
        "point", "closed", "monte_carlo", "|diff|", "mc_stderr"
    );
    for kernel in ["y_positive", "filter_miss", "antenna_pep", "qam_ber"] {
        for &point in &spec.sweep.values {
            let get = |suffix: &str| {
                table
                    .rows
                    .iter()
                    .find(|r| r.metric == format!("{kernel}_{suffix}") && r.sweep_value == point)
                    .unwrap()
            };
            println!(
                "{kernel:>0}[{point}] {:>14.6e} {:>14.6e} {:>14.6e} {:>12.2e}",
                get("closed").estimate,
                get("mc").estimate,
                get("abs_diff").estimate,
                get("mc").stderr
            );
        }
    }
}
