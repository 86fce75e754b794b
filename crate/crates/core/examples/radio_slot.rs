//! One uplink slot at the default scenario: association, per-ABS load and
//! class-wise outage.
//!
//! `cargo run --example radio_slot`

use gcqap::channel::sample_fading;
use gcqap::radio::{evaluate_slot, outage_stats, Matrix};
use gcqap::rng::{SeedStreams, Stream};
use gcqap::sim::World;
use gcqap::{Method, ScenarioConfig};

fn main() -> gcqap::Result<()> {
    let cfg = ScenarioConfig::default();
    let world = World::build(&cfg, Method::Kmeans)?;
    let positions = world.start_positions();
    let pl = world.path_loss_at(&positions);
    let mut rng = SeedStreams::new(cfg.seed).indexed(Stream::Fading, 0);
    let mut fading = Matrix::zeros(pl.rows(), pl.cols());
    for u in 0..pl.rows() {
        for f in fading.row_mut(u) {
            *f = sample_fading(&mut rng);
        }
    }
    let state = evaluate_slot(&pl, &fading, None, &world.radio);
    let stats = outage_stats(&state, &world.priority);
    for (n, (&c, load)) in positions.iter().zip(state.served_counts()).enumerate() {
        let at = world.graph.centroids[c];
        println!(
            "ABS {n} at centroid {c} ({:.0}, {:.0}): serves {load:>3} users, outage {:.3}, interference {:.3e} W",
            at.x, at.y, stats.per_abs[n], state.abs_interference[n]
        );
    }
    println!(
        "network {:.3}  priority {:.3}  regular {:.3}",
        stats.network, stats.priority, stats.regular
    );
    let best = state.rate.iter().cloned().fold(0.0, f64::max);
    println!("best user rate {:.1} kbit/s", best / 1e3);
    Ok(())
}
