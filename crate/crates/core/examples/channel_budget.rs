//! Link budget from a UAV at 100 m to ground users at increasing ground range.
//!
//! `cargo run --example channel_budget`

use gcqap::channel::{
    channel_gain, effective_path_loss_db, link_geometry, los_probability, ChannelParams,
};
use gcqap::{Point2, ScenarioConfig};

fn main() -> gcqap::Result<()> {
    let cfg = ScenarioConfig::default();
    let params = ChannelParams::from_config(&cfg.channel);
    let uav = Point2::new(0.0, 0.0).at_height(cfg.uavs.altitude_m);
    println!(
        "{:>8} {:>9} {:>9} {:>7} {:>9} {:>11}",
        "range_m", "dist_m", "elev_deg", "p_los", "loss_db", "gain"
    );
    for range in [0.0, 50.0, 100.0, 200.0, 400.0, 700.0, 1000.0] {
        let geom = link_geometry(uav, Point2::new(range, 0.0).at_height(0.0))?;
        let loss = effective_path_loss_db(&geom, &params);
        println!(
            "{range:>8.0} {:>9.2} {:>9.2} {:>7.3} {loss:>9.2} {:>11.4e}",
            geom.distance,
            geom.elevation_deg,
            los_probability(&geom, &params),
            channel_gain(loss, 1.0)
        );
    }
    Ok(())
}
