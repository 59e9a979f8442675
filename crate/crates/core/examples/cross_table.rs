//! Prints a small cross-comparison table.
//!
//! `cargo run --example cross_table -- [trials] [seed]`

use std::time::Instant;

use unimodal::bench::{cross_compare, render_grid, BenchConfig};

fn main() -> Result<(), unimodal::Error> {
    let mut args = std::env::args().skip(1);
    let trials = args.next().and_then(|s| s.parse().ok()).unwrap_or(10);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let config = BenchConfig {
        trials_per_cell: trials,
        seed,
        ..BenchConfig::default()
    };
    let started = Instant::now();
    let table = cross_compare(&config)?;
    print!("{}", render_grid(&table));
    let ranking: Vec<_> = table.generalization_ranking().iter().map(|k| k.name()).collect();
    println!("off-diagonal ranking: {}", ranking.join(" < "));
    eprintln!("elapsed: {:.1?}", started.elapsed());
    Ok(())
}
