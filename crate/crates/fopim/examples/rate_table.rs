//! Bits-per-pulse comparison across pool sizes.
//!
//! Run with: cargo run --example rate_table

use fopim::harness::{run_rate_table, ExperimentSpec};

fn main() {
    let spec = ExperimentSpec::preset("fig6a").unwrap();
    let table = run_rate_table(&spec).unwrap();
    let metrics = [
        "bits_fopim",
        "bits_frac",
        "bits_frac_full",
        "bits_foim",
        "bits_majorcom",
        "bits_mimo",
    ];
    print!("{:>10}", "pool");
    for m in metrics {
        print!("{:>16}", m.trim_start_matches("bits_"));
    }
    println!();
    for &pool in &spec.sweep.values {
        print!("{pool:>10}");
        for m in metrics {
            let bits = table
                .rows
                .iter()
                .find(|r| r.metric == m && r.sweep_value == pool)
                .unwrap()
                .estimate;
            print!("{bits:>16}");
        }
        println!();
    }
    println!("\n(frac uses N-2 active antennas; frac_full all N, which matches fopim)");
}
