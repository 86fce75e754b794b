//! End-to-end runs: condensation, episode/slot loops with independent
//! learners, greedy evaluation and constraint auditing.

mod experiments;
mod output;

use std::time::Instant;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

pub use experiments::{compare, sweep_mu, Comparison, MeanStd, MethodSummary, SweepRow};
pub use output::{
    output_root, run_dir, summary_markdown, write_comparison, write_graph, write_run, write_sweep,
    RUN_DIR_ENV,
};

use crate::channel::{effective_path_loss_db, link_geometry, sample_fading, ChannelParams};
use crate::condense::{condense, CondensedGraph, Method, RADIUS_SLACK};
use crate::config::{ScenarioConfig, StartRule};
use crate::error::Result;
use crate::radio::{evaluate_slot, outage_stats, LinkState, Matrix, OutageStats, RadioParams};
use crate::rl::{reward, select_action, td_update, ActionSpace, QPolicy, RewardBreakdown};
use crate::rng::{SeedStreams, Stream, StreamRng};
use crate::scenario::{generate_candidates, scenario_users, UserTerminal};

/// Static part of a run: users, condensed graph, cached large-scale losses.
#[derive(Debug, Clone)]
pub struct World {
    pub cfg: ScenarioConfig,
    pub users: Vec<UserTerminal>,
    pub priority: Vec<bool>,
    pub graph: CondensedGraph,
    pub actions: ActionSpace,
    pub radio: RadioParams,
    /// Effective path loss from every user to every centroid, dB.
    path_loss: Matrix,
    pub condense_seconds: f64,
}

impl World {
    /// Drops users, generates candidates and condenses them with `method`.
    pub fn build(cfg: &ScenarioConfig, method: Method) -> Result<Self> {
        cfg.validate()?;
        let users = scenario_users(cfg);
        let candidates = generate_candidates(cfg)?;
        let started = Instant::now();
        let graph = condense(cfg, method, &candidates, &users)?;
        let elapsed = started.elapsed().as_secs_f64();
        let mut world = Self::with_graph(cfg, users, graph)?;
        world.condense_seconds = elapsed;
        Ok(world)
    }

    pub fn with_graph(
        cfg: &ScenarioConfig,
        users: Vec<UserTerminal>,
        graph: CondensedGraph,
    ) -> Result<Self> {
        cfg.validate()?;
        let channel = ChannelParams::from_config(&cfg.channel);
        let mut path_loss = Matrix::zeros(users.len(), graph.len());
        for (k, u) in users.iter().enumerate() {
            let ground = u.position.at_height(0.0);
            for (m, c) in graph.centroids.iter().enumerate() {
                let geom = link_geometry(c.at_height(cfg.uavs.altitude_m), ground)?;
                path_loss.set(k, m, effective_path_loss_db(&geom, &channel));
            }
        }
        Ok(Self {
            cfg: cfg.clone(),
            priority: users.iter().map(UserTerminal::is_priority).collect(),
            actions: ActionSpace::new(&graph, &cfg.uavs)?,
            radio: RadioParams::from_config(&cfg.radio),
            users,
            graph,
            path_loss,
            condense_seconds: 0.0,
        })
    }

    pub fn num_uavs(&self) -> usize {
        self.cfg.uavs.count
    }

    /// Episode start states: every `floor(M / N)`-th centroid, or a fixed
    /// random draw of distinct centroids.
    pub fn start_positions(&self) -> Vec<usize> {
        let n = self.num_uavs();
        let m = self.graph.len();
        match self.cfg.uavs.start {
            StartRule::Spread => {
                let stride = (m / n).max(1);
                (0..n).map(|i| (i * stride) % m).collect()
            }
            StartRule::Random => {
                let mut rng = SeedStreams::new(self.cfg.seed).stream(Stream::Start);
                if n <= m {
                    index::sample(&mut rng, m, n).into_vec()
                } else {
                    (0..n).map(|_| rng.random_range(0..m)).collect()
                }
            }
        }
    }

    /// Large-scale loss table restricted to the UAVs' current centroids.
    pub fn path_loss_at(&self, positions: &[usize]) -> Matrix {
        let k = self.users.len();
        let mut pl = Matrix::zeros(k, positions.len());
        for u in 0..k {
            let row = self.path_loss.row(u);
            for (n, &p) in positions.iter().enumerate() {
                pl.set(u, n, row[p]);
            }
        }
        pl
    }
}

/// Per-constraint violation counters, checked on every slot.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintAudit {
    pub slots: u64,
    /// Position outside the condensed waypoint set.
    pub waypoint: u64,
    /// Move along a non-edge.
    pub adjacency: u64,
    /// Horizontal step longer than `v_max dt`.
    pub speed: u64,
    /// Moves along bridging edges; these are the only source of `speed` hits.
    pub virtual_moves: u64,
    pub altitude: u64,
    /// Transmit power outside `[0, P_max]`.
    pub power: u64,
}

impl ConstraintAudit {
    pub fn violations(&self) -> u64 {
        self.waypoint + self.adjacency + self.speed + self.altitude + self.power
    }

    fn merge(&mut self, o: &ConstraintAudit) {
        self.slots += o.slots;
        self.waypoint += o.waypoint;
        self.adjacency += o.adjacency;
        self.speed += o.speed;
        self.virtual_moves += o.virtual_moves;
        self.altitude += o.altitude;
        self.power += o.power;
    }
}

/// Mutable per-episode state threaded through [`run_slot`].
#[derive(Debug, Clone)]
pub struct EpisodeState {
    pub positions: Vec<usize>,
    /// Previous slot's association; `None` before the first slot.
    pub serving: Option<Vec<usize>>,
}

#[derive(Debug, Clone)]
pub struct SlotOutcome {
    pub link: LinkState,
    pub outage: OutageStats,
    pub rewards: Vec<RewardBreakdown>,
    pub system_reward: f64,
    pub moves: Vec<(usize, usize)>,
}

/// Advances one slot: pick and execute moves, draw fading, apply power
/// control toward last slot's serving ABS, associate, score, and (when
/// `learn`) apply the TD update for each UAV.
#[allow(clippy::too_many_arguments)]
pub fn run_slot(
    world: &World,
    policy: &mut QPolicy,
    ep: &mut EpisodeState,
    explore: &mut StreamRng,
    fading_rng: &mut StreamRng,
    learn: bool,
    audit: &mut ConstraintAudit,
) -> SlotOutcome {
    let n = world.num_uavs();
    let mut moves = Vec::with_capacity(n);
    for (uav, pos) in ep.positions.iter_mut().enumerate() {
        let s = *pos;
        let feasible = world.actions.feasible(s);
        let a = select_action(&policy.tables[uav], s, feasible, policy.epsilon, explore);
        let next = world.graph.neighbors[s][a];
        moves.push((s, a));
        *pos = next;
    }

    let k = world.users.len();
    let mut fading = Matrix::zeros(k, n);
    for u in 0..k {
        for f in fading.row_mut(u) {
            *f = sample_fading(fading_rng);
        }
    }
    let pl = world.path_loss_at(&ep.positions);
    let link = evaluate_slot(&pl, &fading, ep.serving.as_deref(), &world.radio);
    let outage = outage_stats(&link, &world.priority);
    let rewards: Vec<RewardBreakdown> = (0..n)
        .map(|uav| reward(uav, &link, &world.priority, &world.cfg.reward))
        .collect();
    let system_reward = rewards.iter().map(|r| r.total).sum();

    audit_slot(world, &moves, &ep.positions, &link, audit);

    if learn {
        let l = &world.cfg.learning;
        for (uav, &(s, a)) in moves.iter().enumerate() {
            let next = ep.positions[uav];
            td_update(
                &mut policy.tables[uav],
                s,
                a,
                rewards[uav].total,
                next,
                world.actions.feasible(next),
                l.step_size,
                l.discount,
            );
        }
    }
    ep.serving = Some(link.assoc.clone());

    SlotOutcome {
        link,
        outage,
        rewards,
        system_reward,
        moves: moves
            .iter()
            .zip(&ep.positions)
            .map(|(&(s, _), &t)| (s, t))
            .collect(),
    }
}

fn audit_slot(
    world: &World,
    moves: &[(usize, usize)],
    positions: &[usize],
    link: &LinkState,
    audit: &mut ConstraintAudit,
) {
    let g = &world.graph;
    let r = world.cfg.uavs.step_radius();
    let r2 = r * r * (1.0 + RADIUS_SLACK);
    audit.slots += 1;
    for (&(s, _), &t) in moves.iter().zip(positions) {
        if t >= g.len() {
            audit.waypoint += 1;
            continue;
        }
        if !g.is_edge(s, t) {
            audit.adjacency += 1;
        }
        if s != t && g.is_virtual(s, t) {
            audit.virtual_moves += 1;
        }
        if g.centroids[s].dist2(g.centroids[t]) > r2 {
            audit.speed += 1;
        }
        if !world.cfg.uavs.altitude_ok() {
            audit.altitude += 1;
        }
    }
    let p_max = world.radio.p_max_w() * (1.0 + 1e-12);
    audit.power += link
        .tx_power
        .iter()
        .filter(|&&p| !(0.0..=p_max).contains(&p))
        .count() as u64;
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassOutage {
    pub priority: f64,
    pub regular: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub episode: usize,
    /// Per-slot system reward averaged over the episode.
    pub mean_reward: f64,
    pub outage: ClassOutage,
    pub epsilon: f64,
    /// Centroid index per UAV for slots `0..=tau`.
    pub trajectories: Vec<Vec<usize>>,
}

/// Runs one episode from the start states.
pub fn run_episode(
    world: &World,
    policy: &mut QPolicy,
    episode: usize,
    explore: &mut StreamRng,
    fading_rng: &mut StreamRng,
    learn: bool,
    audit: &mut ConstraintAudit,
) -> EpisodeRecord {
    let tau = world.cfg.learning.steps_per_episode;
    let start = world.start_positions();
    let mut trajectories: Vec<Vec<usize>> = start
        .iter()
        .map(|&s| {
            let mut t = Vec::with_capacity(tau + 1);
            t.push(s);
            t
        })
        .collect();
    let mut ep = EpisodeState {
        positions: start,
        serving: None,
    };
    let mut reward_sum = 0.0;
    let mut outage = ClassOutage::default();
    for _ in 0..tau {
        let slot = run_slot(world, policy, &mut ep, explore, fading_rng, learn, audit);
        reward_sum += slot.system_reward;
        outage.priority += slot.outage.priority;
        outage.regular += slot.outage.regular;
        outage.mean += slot.outage.network;
        for (t, &p) in trajectories.iter_mut().zip(&ep.positions) {
            t.push(p);
        }
    }
    let tau_f = tau as f64;
    EpisodeRecord {
        episode,
        mean_reward: reward_sum / tau_f,
        outage: ClassOutage {
            priority: outage.priority / tau_f,
            regular: outage.regular / tau_f,
            mean: outage.mean / tau_f,
        },
        epsilon: policy.epsilon,
        trajectories,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub episode: usize,
    pub reward: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CondenseSummary {
    pub centroids: usize,
    pub distortion: f64,
    pub virtual_edges: usize,
}

/// Wall-clock timings; kept out of `report.json` so reports stay byte-stable.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub condense_s: f64,
    pub rl_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub method: Method,
    pub seed: u64,
    pub config_hash: String,
    pub condense: CondenseSummary,
    pub learning_curve: Vec<CurvePoint>,
    /// Mean outage over the greedy evaluation episodes.
    pub outage: ClassOutage,
    pub eval_episodes: usize,
    pub audit: ConstraintAudit,
    #[serde(skip)]
    pub timings: Timings,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Mean learning-curve reward over episodes `range`.
    pub fn mean_reward(&self, range: std::ops::Range<usize>) -> f64 {
        let pts = &self.learning_curve[range];
        pts.iter().map(|p| p.reward).sum::<f64>() / pts.len() as f64
    }
}

/// Everything a training run produces.
#[derive(Debug, Clone)]
pub struct TrainedRun {
    pub report: RunReport,
    pub world: World,
    pub policy: QPolicy,
    pub last_eval: Option<EpisodeRecord>,
}

/// Condenses with `method`, trains for `episodes x steps_per_episode` slots
/// and evaluates greedily over `eval_episodes` episodes.
pub fn train(cfg: &ScenarioConfig, method: Method) -> Result<TrainedRun> {
    let world = World::build(cfg, method)?;
    train_on(world)
}

pub fn train_on(world: World) -> Result<TrainedRun> {
    let cfg = world.cfg.clone();
    let streams = SeedStreams::new(cfg.seed);
    let started = Instant::now();
    let mut policy = QPolicy::new(&world.graph, world.num_uavs(), cfg.learning.epsilon_start);
    let mut explore = streams.stream(Stream::Exploration);
    let mut audit = ConstraintAudit::default();
    let mut curve = Vec::with_capacity(cfg.learning.episodes);
    for e in 0..cfg.learning.episodes {
        policy.epsilon = cfg.learning.epsilon_at(e);
        let mut fading = streams.indexed(Stream::Fading, e as u64);
        let rec = run_episode(
            &world,
            &mut policy,
            e,
            &mut explore,
            &mut fading,
            true,
            &mut audit,
        );
        curve.push(CurvePoint {
            episode: e,
            reward: rec.mean_reward,
            epsilon: rec.epsilon,
        });
    }
    let eval = evaluate(&world, &policy)?;
    audit.merge(&eval.audit);
    let rl_s = started.elapsed().as_secs_f64();

    let report = RunReport {
        method: world.graph.method,
        seed: cfg.seed,
        config_hash: cfg.config_hash(),
        condense: CondenseSummary {
            centroids: world.graph.len(),
            distortion: world.graph.distortion,
            virtual_edges: world.graph.virtual_edges.len(),
        },
        learning_curve: curve,
        outage: eval.outage,
        eval_episodes: cfg.learning.eval_episodes,
        audit,
        timings: Timings {
            condense_s: world.condense_seconds,
            rl_s,
        },
    };
    Ok(TrainedRun {
        report,
        world,
        policy,
        last_eval: eval.last,
    })
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub outage: ClassOutage,
    pub episodes: Vec<ClassOutage>,
    pub audit: ConstraintAudit,
    pub last: Option<EpisodeRecord>,
}

/// Greedy (epsilon = 0), non-learning episodes on the evaluation fading
/// streams. Depends only on the world and the Q-tables, so a reloaded
/// snapshot reproduces the training run's numbers.
pub fn evaluate(world: &World, policy: &QPolicy) -> Result<Evaluation> {
    let streams = SeedStreams::new(world.cfg.seed);
    let mut greedy = QPolicy {
        tables: policy.tables.clone(),
        epsilon: 0.0,
    };
    let mut explore = streams.stream(Stream::Exploration);
    let mut audit = ConstraintAudit::default();
    let episodes_n = world.cfg.learning.eval_episodes;
    let mut episodes = Vec::with_capacity(episodes_n);
    let mut last = None;
    for e in 0..episodes_n {
        let mut fading = streams.indexed(Stream::EvalFading, e as u64);
        let rec = run_episode(
            world,
            &mut greedy,
            e,
            &mut explore,
            &mut fading,
            false,
            &mut audit,
        );
        episodes.push(rec.outage);
        last = Some(rec);
    }
    let n = episodes.len().max(1) as f64;
    let outage = episodes
        .iter()
        .fold(ClassOutage::default(), |acc, o| ClassOutage {
            priority: acc.priority + o.priority / n,
            regular: acc.regular + o.regular / n,
            mean: acc.mean + o.mean / n,
        });
    Ok(Evaluation {
        outage,
        episodes,
        audit,
        last,
    })
}
