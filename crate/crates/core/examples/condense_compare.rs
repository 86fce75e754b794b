//! Condenses the default 400-node candidate grid with each method and
//! writes the graphs as CSV.
//!
//! `cargo run --release --example condense_compare -- [out_dir]`

use std::path::PathBuf;
use std::time::Instant;

use gcqap::condense::condense;
use gcqap::scenario::{generate_candidates, scenario_users};
use gcqap::sim::write_graph;
use gcqap::{Method, ScenarioConfig};

fn main() -> gcqap::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from);
    let cfg = ScenarioConfig::default();
    let cands = generate_candidates(&cfg)?;
    let users = scenario_users(&cfg);
    for method in Method::ALL {
        let started = Instant::now();
        let g = condense(&cfg, method, &cands, &users)?;
        let ms = started.elapsed().as_secs_f64() * 1e3;
        let edges: usize = g.neighbors.iter().map(|n| n.len() - 1).sum::<usize>() / 2;
        println!(
            "{method:>6}: distortion {:.4e}  edges {edges:>3}  virtual {}  {ms:.2} ms",
            g.distortion,
            g.virtual_edges.len()
        );
        if let Some(dir) = &out {
            write_graph(&dir.join(method.as_str()), &g)?;
        }
    }
    Ok(())
}
