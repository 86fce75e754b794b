//! Waypoint condensation: annealing, k-means and SNR-proxy selection, plus
//! the adjacency construction that turns centroids into a motion graph.

mod anneal;
mod distortion;
mod graph;
mod kmeans;
mod snrp;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use anneal::{accept, propose, qa_condense, AnnealOutcome, AnnealSchedule, Proposal};
pub use distortion::{distortion, IncrementalDistortion, TrialMove};
pub use graph::{build_adjacency, fmt_f64, CondensedGraph, RADIUS_SLACK};
pub(crate) use graph::{csv_rows, format_err, parse};
pub use kmeans::{kmeans_condense, KMeansOutcome};
pub use snrp::{snr_proxy, snrp_condense, SnrpOutcome, SnrpParams, RELAX_FACTOR};

use crate::channel::ChannelParams;
use crate::config::ScenarioConfig;
use crate::error::Result;
use crate::rng::{SeedStreams, Stream};
use crate::scenario::{CandidateSet, UserTerminal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Qa,
    Kmeans,
    Snrp,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Qa, Method::Snrp, Method::Kmeans];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Qa => "qa",
            Method::Kmeans => "kmeans",
            Method::Snrp => "snrp",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "qa" => Ok(Method::Qa),
            "kmeans" => Ok(Method::Kmeans),
            "snrp" => Ok(Method::Snrp),
            other => Err(format!(
                "unknown method `{other}` (expected qa, kmeans or snrp)"
            )),
        }
    }
}

/// Condenses `candidates` with `method` and builds the motion graph.
pub fn condense(
    cfg: &ScenarioConfig,
    method: Method,
    candidates: &CandidateSet,
    users: &[UserTerminal],
) -> Result<CondensedGraph> {
    let streams = SeedStreams::new(cfg.seed);
    let m = cfg.condense.centroids;
    let (centroids, cost) = match method {
        Method::Qa => {
            let sched = AnnealSchedule::from_config(&cfg.condense, &cfg.area);
            let out = qa_condense(
                &candidates.nodes,
                m,
                &cfg.area,
                &sched,
                &mut streams.stream(Stream::Anneal),
            )?;
            (out.centroids, out.distortion)
        }
        Method::Kmeans => {
            let out = kmeans_condense(
                &candidates.nodes,
                m,
                cfg.condense.kmeans_iters,
                &mut streams.stream(Stream::KMeans),
            )?;
            (out.centroids, out.distortion)
        }
        Method::Snrp => {
            let params = SnrpParams {
                channel: ChannelParams::from_config(&cfg.channel),
                altitude_m: cfg.uavs.altitude_m,
                mu_pr: cfg.reward.mu_pr,
                mu_nr: cfg.reward.mu_nr,
                min_separation_m: cfg.condense.snrp_min_separation_m,
            };
            let out = snrp_condense(&candidates.nodes, m, users, &params)?;
            (out.centroids, out.distortion)
        }
    };
    Ok(build_adjacency(
        method,
        centroids,
        cfg.uavs.step_radius(),
        cost,
    ))
}
