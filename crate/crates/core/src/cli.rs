//! Command-line front end. The `gcqap` binary is a thin wrapper over [`run`].
//!
//! Exit codes: 0 success, 2 usage or configuration error, 1 runtime failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::condense::{condense, Method};
use crate::config::ScenarioConfig;
use crate::error::Error;
use crate::rl::QPolicy;
use crate::scenario::{generate_candidates, scenario_users};
use crate::sim::{
    compare, evaluate, output_root, run_dir, sweep_mu, train, write_comparison, write_graph,
    write_run, write_sweep, World,
};

#[derive(Debug, Parser)]
#[command(
    name = "gcqap",
    version,
    about = "Condensed-graph UAV waypoint planning and Q-learning"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Condense candidate waypoints and export the motion graph.
    Condense {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "qa")]
        method: Method,
    },
    /// Train the per-UAV Q-tables and evaluate the greedy policy.
    Train {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "qa")]
        method: Method,
    },
    /// Evaluate a saved Q-table snapshot greedily.
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "qa")]
        method: Method,
        /// Snapshot written by `train` (`q.csv`).
        #[arg(long)]
        qtable: PathBuf,
    },
    /// Sweep the priority penalty weight over seeds.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "qa")]
        method: Method,
        /// Comma-separated priority weights.
        #[arg(long, value_delimiter = ',', default_value = "15,30,45,60")]
        mu: Vec<f64>,
        /// Number of consecutive seeds starting at the base seed.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
    },
    /// Train all three condensation methods over seeds and tabulate outage.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        seeds: u64,
    },
    /// Print the default or a resolved configuration.
    Config {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        dump_defaults: bool,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON config; unspecified fields take defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory (default: a named run directory under the output root).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Override the number of training episodes.
    #[arg(long)]
    pub episodes: Option<usize>,
}

impl Common {
    fn resolve(&self) -> Result<ScenarioConfig, Failure> {
        let mut cfg = match &self.config {
            Some(p) => ScenarioConfig::load(p).map_err(Failure::usage)?,
            None => ScenarioConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(e) = self.episodes {
            cfg.learning.episodes = e;
        }
        cfg.validate().map_err(Failure::usage)?;
        Ok(cfg)
    }

    fn out_dir(&self, default_name: String) -> PathBuf {
        self.out
            .clone()
            .unwrap_or_else(|| output_root(None).join(default_name))
    }
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(e: Error) -> Self {
        Self {
            code: 2,
            message: e.to_string(),
        }
    }

    fn runtime(e: Error) -> Self {
        Self {
            code: 1,
            message: e.to_string(),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Normal output goes to `out`, diagnostics to stderr. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn seeds_from(base: u64, count: u64) -> Result<Vec<u64>, Failure> {
    if count == 0 {
        return Err(Failure::usage(Error::invalid(
            "seeds",
            "must be at least 1",
        )));
    }
    Ok((0..count).map(|i| base.wrapping_add(i)).collect())
}

fn say(out: &mut dyn Write, line: impl AsRef<str>) -> Result<(), Failure> {
    writeln!(out, "{}", line.as_ref())
        .map_err(|e| Failure::runtime(Error::io(Path::new("<stdout>"), e)))
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match cmd {
        Command::Config {
            config,
            dump_defaults,
        } => {
            let cfg = match (&config, dump_defaults) {
                (None, _) => ScenarioConfig::default(),
                (Some(p), false) => {
                    let c = ScenarioConfig::load(p).map_err(Failure::usage)?;
                    c.validate().map_err(Failure::usage)?;
                    c
                }
                (Some(_), true) => {
                    return Err(Failure::usage(Error::invalid(
                        "config",
                        "--dump-defaults takes no --config",
                    )))
                }
            };
            say(out, cfg.to_json_pretty())
        }
        Command::Condense { common, method } => {
            let cfg = common.resolve()?;
            let dir = common.out_dir(format!(
                "{}-{method}-seed{}-graph",
                cfg.config_hash(),
                cfg.seed
            ));
            let users = scenario_users(&cfg);
            let cands = generate_candidates(&cfg).map_err(Failure::usage)?;
            let started = std::time::Instant::now();
            let graph = condense(&cfg, method, &cands, &users).map_err(Failure::runtime)?;
            let secs = started.elapsed().as_secs_f64();
            write_graph(&dir, &graph).map_err(Failure::runtime)?;
            let summary = json!({
                "method": method,
                "seed": cfg.seed,
                "config_hash": cfg.config_hash(),
                "centroids": graph.len(),
                "virtual_edges": graph.virtual_edges.len(),
                "distortion": graph.distortion,
            });
            write_json(&dir.join("condense.json"), &summary)?;
            write_json(&dir.join("timings.json"), &json!({ "condense_s": secs }))?;
            say(out, format!("distortion {}", graph.distortion))?;
            say(out, format!("wrote {}", dir.display()))
        }
        Command::Train { common, method } => {
            let cfg = common.resolve()?;
            let run = train(&cfg, method).map_err(Failure::runtime)?;
            let dir = common
                .out
                .clone()
                .unwrap_or_else(|| run_dir(&output_root(None), &run.report));
            write_run(&dir, &run).map_err(Failure::runtime)?;
            let o = run.report.outage;
            say(
                out,
                format!(
                    "outage pr {:.4} nr {:.4} mean {:.4}",
                    o.priority, o.regular, o.mean
                ),
            )?;
            say(out, format!("wrote {}", dir.display()))
        }
        Command::Evaluate {
            common,
            method,
            qtable,
        } => {
            let cfg = common.resolve()?;
            let text =
                fs::read_to_string(&qtable).map_err(|e| Failure::usage(Error::io(&qtable, e)))?;
            let world = World::build(&cfg, method).map_err(Failure::runtime)?;
            let policy = QPolicy::from_csv(&text, &world.graph, 0.0).map_err(Failure::usage)?;
            let eval = evaluate(&world, &policy).map_err(Failure::runtime)?;
            let dir = common.out_dir(format!(
                "{}-{method}-seed{}-eval",
                cfg.config_hash(),
                cfg.seed
            ));
            fs::create_dir_all(&dir).map_err(|e| Failure::runtime(Error::io(&dir, e)))?;
            write_json(
                &dir.join("evaluation.json"),
                &json!({
                    "method": method,
                    "seed": cfg.seed,
                    "config_hash": cfg.config_hash(),
                    "episodes": eval.episodes.len(),
                    "outage": eval.outage,
                    "audit": eval.audit,
                }),
            )?;
            let o = eval.outage;
            say(
                out,
                format!(
                    "outage pr {:.4} nr {:.4} mean {:.4}",
                    o.priority, o.regular, o.mean
                ),
            )
        }
        Command::Sweep {
            common,
            method,
            mu,
            seeds,
        } => {
            let cfg = common.resolve()?;
            if mu.is_empty() || mu.iter().any(|m| !m.is_finite() || *m < 0.0) {
                return Err(Failure::usage(Error::invalid(
                    "mu",
                    "weights must be finite and >= 0",
                )));
            }
            let seeds = seeds_from(cfg.seed, seeds)?;
            let rows = sweep_mu(&cfg, method, &mu, &seeds).map_err(Failure::runtime)?;
            let dir = common.out_dir(format!("{}-{method}-sweep", cfg.config_hash()));
            write_sweep(&dir, &rows).map_err(Failure::runtime)?;
            say(
                out,
                format!("{} sweep rows, wrote {}", rows.len(), dir.display()),
            )
        }
        Command::Compare { common, seeds } => {
            let cfg = common.resolve()?;
            let seeds = seeds_from(cfg.seed, seeds)?;
            let cmp = compare(&cfg, &Method::ALL, &seeds).map_err(Failure::runtime)?;
            let dir = common.out_dir(format!("{}-compare", cfg.config_hash()));
            write_comparison(&dir, &cmp).map_err(Failure::runtime)?;
            say(out, crate::sim::summary_markdown(&cmp))?;
            say(out, format!("wrote {}", dir.display()))
        }
    }
}

fn write_json(path: &Path, v: &serde_json::Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(v).expect("json value serializes");
    fs::write(path, text).map_err(|e| Failure::runtime(Error::io(path, e)))
}
