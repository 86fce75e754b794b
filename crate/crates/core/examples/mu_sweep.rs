//! Priority-weight sweep: outage per class as `mu_pr` grows.
//!
//! `cargo run --release --example mu_sweep -- [seeds] [episodes]`

use gcqap::sim::MeanStd;
use gcqap::{sweep_mu, Method, ScenarioConfig};

fn main() -> gcqap::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(2);
    let mut cfg = ScenarioConfig::default();
    if let Some(e) = args.next().and_then(|s| s.parse().ok()) {
        cfg.learning.episodes = e;
    }
    let mus = [15.0, 30.0, 45.0, 60.0, 80.0];
    let seeds: Vec<u64> = (1..=n).collect();
    let rows = sweep_mu(&cfg, Method::Qa, &mus, &seeds)?;
    println!("{:>6} {:>16} {:>16}", "mu_pr", "priority", "regular");
    for mu in mus {
        let pick = |f: fn(&gcqap::sim::SweepRow) -> f64| {
            MeanStd::of(
                &rows
                    .iter()
                    .filter(|r| r.mu_pr == mu)
                    .map(f)
                    .collect::<Vec<_>>(),
            )
        };
        let (p, r) = (pick(|r| r.outage.priority), pick(|r| r.outage.regular));
        println!(
            "{mu:>6} {:>8.4} ± {:.4} {:>8.4} ± {:.4}",
            p.mean, p.std, r.mean, r.std
        );
    }
    Ok(())
}
