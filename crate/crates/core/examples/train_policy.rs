//! Trains the annealing-condensed policy and writes the full run directory
//! (report, learning curve, outage, trajectory, Q snapshot, graph).
//!
//! `cargo run --release --example train_policy -- [out_dir] [episodes]`

use std::path::PathBuf;

use gcqap::sim::{run_dir, write_run};
use gcqap::{train, Method, ScenarioConfig};

fn main() -> gcqap::Result<()> {
    let mut args = std::env::args().skip(1);
    let root = PathBuf::from(args.next().unwrap_or_else(|| "runs".into()));
    let mut cfg = ScenarioConfig::default();
    if let Some(e) = args.next().and_then(|s| s.parse().ok()) {
        cfg.learning.episodes = e;
    }
    let run = train(&cfg, Method::Qa)?;
    let r = &run.report;
    for p in r
        .learning_curve
        .iter()
        .step_by((r.learning_curve.len() / 10).max(1))
    {
        println!(
            "episode {:>4}  reward {:>9.2}  eps {:.3}",
            p.episode, p.reward, p.epsilon
        );
    }
    println!(
        "greedy outage: priority {:.3}  regular {:.3}  mean {:.3}",
        r.outage.priority, r.outage.regular, r.outage.mean
    );
    println!("constraint violations: {}", r.audit.violations());
    let dir = run_dir(&root, r);
    write_run(&dir, &run)?;
    println!("wrote {}", dir.display());
    Ok(())
}
