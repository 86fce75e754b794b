//! Annealing condensation with mixed local / non-local ("quantum jump")
//! proposals and Metropolis acceptance.

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::distortion::{distortion, IncrementalDistortion};
use crate::config::CondenseConfig;
use crate::error::{Error, Result};
use crate::geom::{Area, Point2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealSchedule {
    pub t0: f64,
    pub t_min: f64,
    /// Geometric cooling factor applied after every temperature level.
    pub cooling: f64,
    /// Cap on temperature levels.
    pub max_iters: usize,
    /// Proposals evaluated at each temperature level.
    pub moves_per_level: usize,
    pub jump_prob: f64,
    /// Std of the local Gaussian step, m.
    pub step_sigma: f64,
    /// Relative distortion change below which the run counts as settled.
    pub tolerance: f64,
    pub window: usize,
}

impl AnnealSchedule {
    pub fn from_config(c: &CondenseConfig, area: &Area) -> Self {
        Self {
            t0: c.t0,
            t_min: c.t_min,
            cooling: c.cooling,
            max_iters: c.max_iters,
            moves_per_level: c.moves_per_level,
            jump_prob: c.jump_prob,
            step_sigma: c.step_fraction * area.width(),
            tolerance: c.tolerance,
            window: c.window,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_min > 0.0 && self.t_min < self.t0) {
            return Err(Error::invalid("condense.t_min", "need 0 < t_min < t0"));
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return Err(Error::invalid("condense.cooling", "must lie in (0, 1)"));
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("condense.max_iters", "must be >= 1"));
        }
        if self.moves_per_level == 0 {
            return Err(Error::invalid("condense.moves_per_level", "must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.jump_prob) {
            return Err(Error::invalid("condense.jump_prob", "must lie in [0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Proposal {
    pub centroid: usize,
    pub to: Point2,
    /// Whether the move relocated the centroid onto a candidate node.
    pub jumped: bool,
}

/// Picks one centroid uniformly and either teleports it onto a random
/// candidate node (probability `jump_prob`) or nudges it by a clipped
/// Gaussian step.
pub fn propose<R: Rng + ?Sized>(
    centroids: &[Point2],
    candidates: &[Point2],
    area: &Area,
    sched: &AnnealSchedule,
    rng: &mut R,
) -> Proposal {
    let centroid = rng.random_range(0..centroids.len());
    if rng.random_bool(sched.jump_prob) {
        let to = candidates[rng.random_range(0..candidates.len())];
        return Proposal {
            centroid,
            to,
            jumped: true,
        };
    }
    let from = centroids[centroid];
    let to = if sched.step_sigma > 0.0 {
        let step = Normal::new(0.0, sched.step_sigma).expect("finite sigma");
        area.clip(Point2::new(
            from.x + step.sample(rng),
            from.y + step.sample(rng),
        ))
    } else {
        from
    };
    Proposal {
        centroid,
        to,
        jumped: false,
    }
}

/// Metropolis rule: accept with probability `min{1, exp(-delta / T)}`.
pub fn accept<R: Rng + ?Sized>(delta: f64, temperature: f64, rng: &mut R) -> bool {
    debug_assert!(temperature > 0.0);
    if delta <= 0.0 {
        return true;
    }
    rng.random::<f64>() < (-delta / temperature).exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnealOutcome {
    /// Best centroid set seen, not the last accepted one.
    pub centroids: Vec<Point2>,
    pub distortion: f64,
    pub initial_distortion: f64,
    /// Temperature levels completed.
    pub levels: usize,
    pub proposals: usize,
    pub accepted: usize,
    pub jumps: usize,
    /// Best-so-far distortion after each temperature level.
    pub best_trace: Vec<f64>,
    /// Point-to-centroid distance evaluations spent after initialization.
    pub evaluations: u64,
}

/// Runs the annealer from `m` distinct candidate nodes until the
/// temperature drops below `t_min`, `max_iters` levels have run, or the
/// distortion settles within `tolerance` over `window` levels. Each level
/// makes `moves_per_level` proposals before cooling.
pub fn qa_condense<R: Rng + ?Sized>(
    candidates: &[Point2],
    m: usize,
    area: &Area,
    sched: &AnnealSchedule,
    rng: &mut R,
) -> Result<AnnealOutcome> {
    sched.validate()?;
    if m == 0 {
        return Err(Error::NoCentroids);
    }
    if m > candidates.len() {
        return Err(Error::invalid(
            "condense.centroids",
            "must not exceed candidate count",
        ));
    }
    let init: Vec<Point2> = index::sample(rng, candidates.len(), m)
        .into_iter()
        .map(|i| candidates[i])
        .collect();

    let mut state = IncrementalDistortion::new(candidates, init)?;
    let init_evals = state.evaluations();
    let initial = state.total();
    let mut best = state.centroids().to_vec();
    let mut best_cost = initial;
    let mut trace = Vec::new();
    let mut history = Vec::new();
    let (mut accepted, mut jumps) = (0, 0);
    let mut t = sched.t0;

    let mut proposals = 0;
    while best_cost > 0.0 && t >= sched.t_min && trace.len() < sched.max_iters {
        for _ in 0..sched.moves_per_level {
            let prop = propose(state.centroids(), candidates, area, sched, rng);
            proposals += 1;
            jumps += usize::from(prop.jumped);
            let mv = state.trial(prop.centroid, prop.to);
            if accept(mv.delta, t, rng) {
                state.commit(mv);
                accepted += 1;
                if state.total() < best_cost {
                    best_cost = state.total();
                    best.copy_from_slice(state.centroids());
                }
            }
        }
        trace.push(best_cost);
        history.push(state.total());
        t *= sched.cooling;

        let n = history.len();
        if n > sched.window {
            let then = history[n - 1 - sched.window];
            let now = history[n - 1];
            if (now - then).abs() <= sched.tolerance * now.abs().max(f64::MIN_POSITIVE) {
                break;
            }
        }
    }

    let evaluations = state.evaluations() - init_evals;
    Ok(AnnealOutcome {
        distortion: distortion(candidates, &best)?,
        centroids: best,
        initial_distortion: initial,
        levels: trace.len(),
        proposals,
        accepted,
        jumps,
        best_trace: trace,
        evaluations,
    })
}
