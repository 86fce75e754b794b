//! Splits one slot's outage into the noise-limited and the interference
//! part for a few power-control settings, with UAVs parked at their start
//! waypoints.
//!
//! `cargo run --release --example interference_budget`

use gcqap::channel::sample_fading;
use gcqap::radio::{evaluate_slot, outage_stats, Matrix};
use gcqap::rng::{SeedStreams, Stream};
use gcqap::sim::World;
use gcqap::{Method, ScenarioConfig};

fn main() -> gcqap::Result<()> {
    let slots = 200;
    for (p0, alpha) in [(-85.0, 0.8), (-60.0, 0.8), (-60.0, 1.0), (-60.0, 0.0)] {
        let mut cfg = ScenarioConfig::default();
        cfg.radio.p0_dbm = p0;
        cfg.radio.alpha_ol = alpha;
        let world = World::build(&cfg, Method::Qa)?;
        let pl = world.path_loss_at(&world.start_positions());
        let mut rng = SeedStreams::new(cfg.seed).stream(Stream::Fading);
        let (mut sinr_out, mut snr_out) = (0.0, 0.0);
        for _ in 0..slots {
            let mut fading = Matrix::zeros(pl.rows(), pl.cols());
            for u in 0..pl.rows() {
                for f in fading.row_mut(u) {
                    *f = sample_fading(&mut rng);
                }
            }
            let s = evaluate_slot(&pl, &fading, None, &world.radio);
            sinr_out += outage_stats(&s, &world.priority).network;
            let noise_limited = (0..s.num_users())
                .filter(|&u| {
                    s.tx_power[u] * s.gains.get(u, s.assoc[u]) / world.radio.noise_w
                        < world.radio.threshold
                })
                .count();
            snr_out += noise_limited as f64 / s.num_users() as f64;
        }
        println!(
            "P0 {p0:>5} dBm  alpha_OL {alpha:.1}: outage {:.3}  without interference {:.3}",
            sinr_out / slots as f64,
            snr_out / slots as f64
        );
    }
    Ok(())
}
