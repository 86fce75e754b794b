//! Static scenario generation: user drops, priority labels and the dense
//! candidate waypoint set.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::{CandidateRule, ScenarioConfig};
use crate::error::{Error, Result};
use crate::geom::{Area, Point2};
use crate::rng::{SeedStreams, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UserClass {
    Priority,
    Regular,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserTerminal {
    pub id: usize,
    /// Ground position; users sit at height 0.
    pub position: Point2,
    pub class: UserClass,
}

impl UserTerminal {
    pub fn is_priority(&self) -> bool {
        self.class == UserClass::Priority
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub nodes: Vec<Point2>,
    pub rule: CandidateRule,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Drops `K` users uniformly over the area and labels
/// `round(priority_fraction * K)` of them, chosen by a seeded shuffle, as
/// priority users.
pub fn drop_users<R: Rng + ?Sized>(cfg: &ScenarioConfig, rng: &mut R) -> Vec<UserTerminal> {
    let area = cfg.area;
    let k = cfg.users.count;
    let positions: Vec<Point2> = (0..k).map(|_| uniform_point(&area, rng)).collect();

    let n_priority = (cfg.users.priority_fraction * k as f64).round() as usize;
    let mut order: Vec<usize> = (0..k).collect();
    order.shuffle(rng);
    let mut class = vec![UserClass::Regular; k];
    for &i in &order[..n_priority.min(k)] {
        class[i] = UserClass::Priority;
    }

    positions
        .into_iter()
        .zip(class)
        .enumerate()
        .map(|(id, (position, class))| UserTerminal {
            id,
            position,
            class,
        })
        .collect()
}

/// Users for `cfg`, drawn from the seed's user stream.
pub fn scenario_users(cfg: &ScenarioConfig) -> Vec<UserTerminal> {
    let mut rng = SeedStreams::new(cfg.seed).stream(Stream::Users);
    drop_users(cfg, &mut rng)
}

/// Dense candidate nodes.
///
/// The grid rule lays out a `side x side` lattice with `side = floor(sqrt(N0))`
/// and a half-cell margin from every edge; when `N0` is not a perfect
/// square the remaining `N0 - side^2` nodes are drawn uniformly from the
/// candidate stream. The uniform rule draws all nodes at random.
pub fn generate_candidates(cfg: &ScenarioConfig) -> Result<CandidateSet> {
    let n0 = cfg.condense.candidates;
    if n0 < cfg.condense.centroids {
        return Err(Error::invalid(
            "condense.candidates",
            format!(
                "{n0} candidates cannot hold {} centroids",
                cfg.condense.centroids
            ),
        ));
    }
    let area = cfg.area;
    let mut rng = SeedStreams::new(cfg.seed).stream(Stream::Candidates);
    let mut nodes = Vec::with_capacity(n0);

    if cfg.condense.candidate_rule == CandidateRule::Grid {
        let side = integer_sqrt(n0);
        let dx = area.width() / side as f64;
        let dy = area.height() / side as f64;
        for row in 0..side {
            for col in 0..side {
                nodes.push(Point2::new(
                    area.x_min + (col as f64 + 0.5) * dx,
                    area.y_min + (row as f64 + 0.5) * dy,
                ));
            }
        }
    }
    while nodes.len() < n0 {
        let p = uniform_point(&area, &mut rng);
        if !nodes.contains(&p) {
            nodes.push(p);
        }
    }

    Ok(CandidateSet {
        nodes,
        rule: cfg.condense.candidate_rule,
    })
}

fn integer_sqrt(n: usize) -> usize {
    let mut s = (n as f64).sqrt() as usize;
    while s * s > n {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= n {
        s += 1;
    }
    s
}

fn uniform_point<R: Rng + ?Sized>(area: &Area, rng: &mut R) -> Point2 {
    Point2::new(
        rng.random_range(area.x_min..=area.x_max),
        rng.random_range(area.y_min..=area.y_max),
    )
}
