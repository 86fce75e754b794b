//! On-disk artefacts for runs, sweeps and comparisons.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use super::{Comparison, RunReport, SweepRow, TrainedRun};
use crate::condense::{fmt_f64, CondensedGraph};
use crate::error::{Error, Result};

/// Overrides the default output root (`runs/`) when set.
pub const RUN_DIR_ENV: &str = "GCQAP_OUT_DIR";

/// Output root: explicit path, else `$GCQAP_OUT_DIR`, else `runs`.
pub fn output_root(explicit: Option<&Path>) -> PathBuf {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(RUN_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("runs"))
}

/// `<root>/<config-hash>-<method>-seed<seed>`.
pub fn run_dir(root: &Path, report: &RunReport) -> PathBuf {
    root.join(format!(
        "{}-{}-seed{}",
        report.config_hash, report.method, report.seed
    ))
}

fn write(dir: &Path, name: &str, contents: impl AsRef<[u8]>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Error::io(&path, e))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// `centroids.csv` and `edges.csv`.
pub fn write_graph(dir: &Path, graph: &CondensedGraph) -> Result<()> {
    ensure_dir(dir)?;
    write(dir, "centroids.csv", graph.centroids_csv())?;
    write(dir, "edges.csv", graph.edges_csv())
}

/// Writes every artefact of a trained run into `dir`.
pub fn write_run(dir: &Path, run: &TrainedRun) -> Result<()> {
    ensure_dir(dir)?;
    let r = &run.report;
    write(dir, "config.json", run.world.cfg.to_json_pretty())?;
    write(dir, "report.json", r.to_json())?;
    write(dir, "timings.json", timings_json(r))?;
    write_graph(dir, &run.world.graph)?;
    write(dir, "q.csv", run.policy.to_csv(&run.world.graph))?;

    let mut curve = String::from("episode,reward,eps\n");
    for p in &r.learning_curve {
        writeln!(
            curve,
            "{},{},{}",
            p.episode,
            fmt_f64(p.reward),
            fmt_f64(p.epsilon)
        )
        .unwrap();
    }
    write(dir, "learning_curve.csv", curve)?;

    let mut outage = String::from("method,class,value,seed\n");
    push_outage_rows(&mut outage, r);
    write(dir, "outage.csv", outage)?;

    let mut traj = String::from("uav,t,centroid,x,y\n");
    if let Some(ep) = &run.last_eval {
        for (uav, path) in ep.trajectories.iter().enumerate() {
            for (t, &c) in path.iter().enumerate() {
                let p = run.world.graph.centroids[c];
                writeln!(traj, "{uav},{t},{c},{},{}", fmt_f64(p.x), fmt_f64(p.y)).unwrap();
            }
        }
    }
    write(dir, "trajectory.csv", traj)
}

fn push_outage_rows(out: &mut String, r: &RunReport) {
    for (class, v) in [
        ("pr", r.outage.priority),
        ("nr", r.outage.regular),
        ("mean", r.outage.mean),
    ] {
        writeln!(out, "{},{class},{},{}", r.method, fmt_f64(v), r.seed).unwrap();
    }
}

fn timings_json(r: &RunReport) -> String {
    serde_json::to_string_pretty(&json!({
        "method": r.method,
        "seed": r.seed,
        "condense_s": r.timings.condense_s,
        "rl_s": r.timings.rl_s,
    }))
    .expect("timings serialize")
}

/// `sweep.csv` with one row per (`mu_pr`, seed).
pub fn write_sweep(dir: &Path, rows: &[SweepRow]) -> Result<()> {
    ensure_dir(dir)?;
    let mut out = String::from("mu_pr,seed,pr,nr,mean\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.mu_pr,
            r.seed,
            fmt_f64(r.outage.priority),
            fmt_f64(r.outage.regular),
            fmt_f64(r.outage.mean)
        )
        .unwrap();
    }
    write(dir, "sweep.csv", out)
}

/// `outage.csv`, `learning_curves.csv`, `timings.json`, `reports.json`
/// and a Markdown `summary.md`.
pub fn write_comparison(dir: &Path, cmp: &Comparison) -> Result<()> {
    ensure_dir(dir)?;
    let mut outage = String::from("method,class,value,seed\n");
    let mut curves = String::from("method,seed,episode,reward,eps\n");
    for r in &cmp.runs {
        push_outage_rows(&mut outage, r);
        for p in &r.learning_curve {
            writeln!(
                curves,
                "{},{},{},{},{}",
                r.method,
                r.seed,
                p.episode,
                fmt_f64(p.reward),
                fmt_f64(p.epsilon)
            )
            .unwrap();
        }
    }
    write(dir, "outage.csv", outage)?;
    write(dir, "learning_curves.csv", curves)?;
    write(
        dir,
        "reports.json",
        serde_json::to_string_pretty(&cmp.runs).expect("reports serialize"),
    )?;

    let timings: serde_json::Map<String, serde_json::Value> = cmp
        .summaries
        .iter()
        .map(|s| {
            (
                s.method.to_string(),
                json!({ "condense_s": s.condense_s, "rl_s": s.rl_s }),
            )
        })
        .collect();
    write(
        dir,
        "timings.json",
        serde_json::to_string_pretty(&timings).expect("timings serialize"),
    )?;
    write(dir, "summary.md", summary_markdown(cmp))
}

/// Mean +/- std table per method over seeds.
pub fn summary_markdown(cmp: &Comparison) -> String {
    let mut out = String::from(
        "| method | seeds | priority outage | regular outage | mean outage | condense s | RL s |\n",
    );
    out.push_str("|---|---|---|---|---|---|---|\n");
    for s in &cmp.summaries {
        writeln!(
            out,
            "| {} | {} | {:.4} ± {:.4} | {:.4} ± {:.4} | {:.4} ± {:.4} | {:.3} ± {:.3} | {:.3} ± {:.3} |",
            s.method,
            s.seeds,
            s.priority.mean,
            s.priority.std,
            s.regular.mean,
            s.regular.std,
            s.mean.mean,
            s.mean.std,
            s.condense_s.mean,
            s.condense_s.std,
            s.rl_s.mean,
            s.rl_s.std
        )
        .unwrap();
    }
    out
}
