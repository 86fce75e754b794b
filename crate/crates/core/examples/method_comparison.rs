//! Trains all three condensation methods over a few seeds and prints the
//! outage table.
//!
//! `cargo run --release --example method_comparison -- [seeds] [episodes]`

use gcqap::{compare, Method, ScenarioConfig};

fn main() -> gcqap::Result<()> {
    let mut args = std::env::args().skip(1);
    let seeds: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);
    let mut cfg = ScenarioConfig::default();
    if let Some(e) = args.next().and_then(|s| s.parse().ok()) {
        cfg.learning.episodes = e;
    }
    let seeds: Vec<u64> = (1..=seeds).collect();
    let cmp = compare(&cfg, &Method::ALL, &seeds)?;
    for r in &cmp.runs {
        println!(
            "{:>6} seed {:>2}  pr {:.3}  nr {:.3}  mean {:.3}  first50 {:.2}  last50 {:.2}  virt {}",
            r.method,
            r.seed,
            r.outage.priority,
            r.outage.regular,
            r.outage.mean,
            r.mean_reward(0..50.min(r.learning_curve.len())),
            r.mean_reward(r.learning_curve.len().saturating_sub(50)..r.learning_curve.len()),
            r.condense.virtual_edges,
        );
    }
    print!("{}", gcqap::sim::summary_markdown(&cmp));
    Ok(())
}
