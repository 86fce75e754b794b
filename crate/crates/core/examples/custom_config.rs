//! Partial JSON configs: unspecified fields take defaults, unknown fields
//! and out-of-range values are rejected with the offending field named.
//!
//! `cargo run --example custom_config`

use gcqap::ScenarioConfig;

fn main() {
    let small = r#"{ "seed": 9, "uavs": { "count": 2 }, "users": { "count": 40 }, "condense": { "centroids": 16 } }"#;
    let cfg = ScenarioConfig::from_json(small).expect("valid partial config");
    cfg.validate().expect("in range");
    println!(
        "hash {} (seed excluded), step radius {} m",
        cfg.config_hash(),
        cfg.uavs.step_radius()
    );

    for bad in [
        r#"{ "uavs": { "cuont": 2 } }"#,
        r#"{ "condense": { "centroids": 0 } }"#,
        r#"{ "radio": { "alpha_ol": 1.5 } }"#,
    ] {
        let err = ScenarioConfig::from_json(bad).and_then(|c| c.validate());
        println!("{bad} -> {}", err.unwrap_err());
    }
}
