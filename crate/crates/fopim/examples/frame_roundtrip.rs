//! Encode a random payload into one frame, show its anatomy, and decode it
//! back from a perfect detection.
//!
//! Run with: cargo run --example frame_roundtrip

use fopim::config::SystemConfig;
use fopim::im_codec::ImCodec;
use fopim::rng::trial_rng;

fn main() {
    let cfg = SystemConfig::new(6, 6, 3, 7, 4);
    let codec = ImCodec::new(&cfg).unwrap();
    let budget = codec.budget();
    println!(
        "frame budget: {} combination + {} permutation + {} constellation = {} bits/pulse",
        budget.combination_bits,
        budget.permutation_bits,
        budget.constellation_bits,
        budget.total_bits()
    );

    let mut rng = trial_rng(42, 0, 0);
    let bits = codec.random_bits(&mut rng);
    let frame = codec.encode(&bits).unwrap();
    let rendered: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
    println!("payload            : {rendered}");
    println!(
        "combination rank u : {} -> sorted offsets {:?}",
        frame.combination_rank,
        {
            let mut sorted = frame.offsets.clone();
            sorted.sort_unstable();
            sorted
        }
    );
    println!(
        "permutation rank v : {} -> per-antenna offsets {:?}",
        frame.permutation_rank, frame.offsets
    );
    println!("symbol labels      : {:?}", frame.symbol_labels);
    for (antenna, symbol) in frame.symbols.iter().enumerate() {
        println!(
            "  antenna {antenna}: offset {} ({:.1} MHz), symbol {:.3}{:+.3}j",
            frame.offsets[antenna],
            cfg.offset_hz(frame.offsets[antenna]) / 1e6,
            symbol.re,
            symbol.im
        );
    }

    let decoded = codec.decode(&codec.exact_estimate(&frame));
    println!(
        "decode(exact estimate) == payload: {}",
        if decoded == bits { "yes" } else { "NO" }
    );
}
