//! Independent per-UAV tabular Q-learning on the condensed graph.

use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::condense::{csv_rows, fmt_f64, format_err, parse, CondensedGraph, RADIUS_SLACK};
use crate::config::{RewardConfig, UavConfig};
use crate::error::{Error, Result};
use crate::radio::{ratio, LinkState};

/// Feasible moves out of `s`: graph neighbours within one slot's reach at a
/// legal altitude. Hover is always included; bridging corridor edges are
/// kept regardless of length so a repaired graph stays traversable.
pub fn feasible_actions(graph: &CondensedGraph, s: usize, uavs: &UavConfig) -> Result<Vec<usize>> {
    feasible_local(graph, s, uavs).map(|local| {
        let ns = &graph.neighbors[s];
        local.into_iter().map(|a| ns[a]).collect()
    })
}

/// Same as [`feasible_actions`] but as positions within `graph.neighbors[s]`.
pub fn feasible_local(graph: &CondensedGraph, s: usize, uavs: &UavConfig) -> Result<Vec<usize>> {
    let ns = graph.neighbors(s)?;
    if !uavs.altitude_ok() {
        return Err(Error::invalid(
            "uavs.altitude_m",
            "outside [altitude_min_m, altitude_max_m]",
        ));
    }
    let r = uavs.step_radius();
    let r2 = r * r * (1.0 + RADIUS_SLACK);
    let here = graph.centroids[s];
    Ok(ns
        .iter()
        .enumerate()
        .filter(|&(_, &t)| t == s || graph.is_virtual(s, t) || graph.centroids[t].dist2(here) <= r2)
        .map(|(i, _)| i)
        .collect())
}

/// Feasible local actions for every state, computed once per run.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionSpace {
    per_state: Vec<Vec<usize>>,
}

impl ActionSpace {
    pub fn new(graph: &CondensedGraph, uavs: &UavConfig) -> Result<Self> {
        let per_state = (0..graph.len())
            .map(|s| feasible_local(graph, s, uavs))
            .collect::<Result<_>>()?;
        Ok(Self { per_state })
    }

    pub fn feasible(&self, s: usize) -> &[usize] {
        &self.per_state[s]
    }
}

/// One UAV's table; `values[s][a]` follows `graph.neighbors[s][a]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QTable {
    pub values: Vec<Vec<f64>>,
}

impl QTable {
    pub fn zeros(graph: &CondensedGraph) -> Self {
        Self {
            values: graph
                .neighbors
                .iter()
                .map(|ns| vec![0.0; ns.len()])
                .collect(),
        }
    }

    /// Best local action among `feasible` (first one on ties).
    pub fn greedy(&self, s: usize, feasible: &[usize]) -> usize {
        let row = &self.values[s];
        let mut best = feasible[0];
        for &a in &feasible[1..] {
            if row[a] > row[best] {
                best = a;
            }
        }
        best
    }

    pub fn max_value(&self, s: usize, feasible: &[usize]) -> f64 {
        feasible
            .iter()
            .map(|&a| self.values[s][a])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// The ensemble of independent learners plus the shared exploration rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QPolicy {
    pub tables: Vec<QTable>,
    pub epsilon: f64,
}

impl QPolicy {
    pub fn new(graph: &CondensedGraph, uavs: usize, epsilon: f64) -> Self {
        Self {
            tables: vec![QTable::zeros(graph); uavs],
            epsilon,
        }
    }

    /// `uav,state,action,value` rows; `action` is the destination centroid.
    pub fn to_csv(&self, graph: &CondensedGraph) -> String {
        let mut out = String::from("uav,state,action,value\n");
        for (n, t) in self.tables.iter().enumerate() {
            for (s, row) in t.values.iter().enumerate() {
                for (a, v) in row.iter().enumerate() {
                    writeln!(out, "{n},{s},{},{}", graph.neighbors[s][a], fmt_f64(*v)).unwrap();
                }
            }
        }
        out
    }

    /// Loads a snapshot; it must cover exactly the graph's `(state, action)`
    /// pairs for every UAV.
    pub fn from_csv(text: &str, graph: &CondensedGraph, epsilon: f64) -> Result<Self> {
        let mut tables: Vec<Vec<Vec<Option<f64>>>> = Vec::new();
        for (line, f) in csv_rows(text, "q-table", &["uav", "state", "action", "value"])? {
            let n: usize = parse(&f[0], "q-table", line)?;
            let s: usize = parse(&f[1], "q-table", line)?;
            let t: usize = parse(&f[2], "q-table", line)?;
            let v: f64 = parse(&f[3], "q-table", line)?;
            while tables.len() <= n {
                tables.push(
                    graph
                        .neighbors
                        .iter()
                        .map(|ns| vec![None; ns.len()])
                        .collect(),
                );
            }
            let ns = graph
                .neighbors
                .get(s)
                .ok_or_else(|| format_err("q-table", line, "state outside graph"))?;
            let a = ns
                .binary_search(&t)
                .map_err(|_| format_err("q-table", line, "action is not a neighbour"))?;
            if tables[n][s][a].replace(v).is_some() {
                return Err(format_err("q-table", line, "duplicate entry"));
            }
        }
        let tables = tables
            .into_iter()
            .map(|rows| {
                rows.into_iter()
                    .map(|r| r.into_iter().collect::<Option<Vec<f64>>>())
                    .collect::<Option<Vec<_>>>()
                    .map(|values| QTable { values })
            })
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| {
                format_err(
                    "q-table",
                    0,
                    "snapshot does not cover every state-action pair",
                )
            })?;
        Ok(Self { tables, epsilon })
    }
}

/// Epsilon-greedy choice over `feasible` local actions. Consumes one draw
/// for the explore test and one more when exploring.
pub fn select_action<R: Rng + ?Sized>(
    table: &QTable,
    s: usize,
    feasible: &[usize],
    epsilon: f64,
    rng: &mut R,
) -> usize {
    debug_assert!(!feasible.is_empty());
    if rng.random::<f64>() < epsilon {
        feasible[rng.random_range(0..feasible.len())]
    } else {
        table.greedy(s, feasible)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub priority_outages: usize,
    pub regular_outages: usize,
    pub priority_fraction: f64,
    pub regular_fraction: f64,
    pub total: f64,
}

/// Priority-weighted outage penalty for the users ABS `uav` serves: outage
/// counts plus per-class outage fractions, each scaled by its class weight.
pub fn reward(
    uav: usize,
    state: &LinkState,
    priority: &[bool],
    w: &RewardConfig,
) -> RewardBreakdown {
    let (mut pr, mut nr, mut pr_out, mut nr_out) = (0, 0, 0, 0);
    for (u, &a) in state.assoc.iter().enumerate() {
        if a != uav {
            continue;
        }
        let out = usize::from(state.outage[u]);
        if priority[u] {
            pr += 1;
            pr_out += out;
        } else {
            nr += 1;
            nr_out += out;
        }
    }
    let priority_fraction = ratio(pr_out, pr);
    let regular_fraction = ratio(nr_out, nr);
    let total = -w.mu_pr * pr_out as f64
        - w.mu_nr * nr_out as f64
        - w.mu_pr * priority_fraction
        - w.mu_nr * regular_fraction;
    RewardBreakdown {
        priority_outages: pr_out,
        regular_outages: nr_out,
        priority_fraction,
        regular_fraction,
        total,
    }
}

/// `Q[s][a] <- (1 - step) Q[s][a] + step (r + discount max_a' Q[s'][a'])`.
#[allow(clippy::too_many_arguments)]
pub fn td_update(
    table: &mut QTable,
    s: usize,
    a: usize,
    r: f64,
    next: usize,
    next_feasible: &[usize],
    step_size: f64,
    discount: f64,
) {
    let target = r + discount * table.max_value(next, next_feasible);
    let q = &mut table.values[s][a];
    *q = (1.0 - step_size) * *q + step_size * target;
}
