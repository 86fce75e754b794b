//! Saves the trained Q-tables and graph, reloads both from CSV and checks
//! that greedy evaluation reproduces the training run.
//!
//! `cargo run --release --example qtable_checkpoint`

use gcqap::condense::CondensedGraph;
use gcqap::rl::QPolicy;
use gcqap::scenario::scenario_users;
use gcqap::sim::World;
use gcqap::{evaluate, train, Method, ScenarioConfig};

fn main() -> gcqap::Result<()> {
    let mut cfg = ScenarioConfig::default();
    cfg.learning.episodes = 100;
    let run = train(&cfg, Method::Qa)?;

    let q_csv = run.policy.to_csv(&run.world.graph);
    let graph = CondensedGraph::from_csv(
        Method::Qa,
        &run.world.graph.centroids_csv(),
        &run.world.graph.edges_csv(),
    )?;
    let world = World::with_graph(&cfg, scenario_users(&cfg), graph)?;
    let policy = QPolicy::from_csv(&q_csv, &world.graph, 0.0)?;
    let eval = evaluate(&world, &policy)?;

    println!("snapshot rows: {}", q_csv.lines().count() - 1);
    println!("trained  mean outage {:.6}", run.report.outage.mean);
    println!("reloaded mean outage {:.6}", eval.outage.mean);
    assert_eq!(eval.outage, run.report.outage);
    Ok(())
}
