//! Multi-run experiments: priority-weight sweeps and method comparisons.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{train, ClassOutage, RunReport};
use crate::condense::Method;
use crate::config::ScenarioConfig;
use crate::error::Result;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    /// Sample mean and (n - 1) standard deviation; a single value has std 0.
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self::default();
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, std }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub mu_pr: f64,
    pub seed: u64,
    pub outage: ClassOutage,
}

/// Trains `method` once per (`mu_pr`, seed) pair, in parallel.
pub fn sweep_mu(
    cfg: &ScenarioConfig,
    method: Method,
    mus: &[f64],
    seeds: &[u64],
) -> Result<Vec<SweepRow>> {
    let jobs: Vec<(f64, u64)> = mus
        .iter()
        .flat_map(|&mu| seeds.iter().map(move |&s| (mu, s)))
        .collect();
    jobs.par_iter()
        .map(|&(mu, seed)| {
            let mut c = cfg.clone();
            c.reward.mu_pr = mu;
            c.seed = seed;
            let run = train(&c, method)?;
            Ok(SweepRow {
                mu_pr: mu,
                seed,
                outage: run.report.outage,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: Method,
    pub seeds: usize,
    pub priority: MeanStd,
    pub regular: MeanStd,
    pub mean: MeanStd,
    pub condense_s: MeanStd,
    pub rl_s: MeanStd,
}

#[derive(Debug, Clone)]
pub struct Comparison {
    /// Reports in `(method, seed)` order.
    pub runs: Vec<RunReport>,
    pub summaries: Vec<MethodSummary>,
}

impl Comparison {
    pub fn summary(&self, method: Method) -> Option<&MethodSummary> {
        self.summaries.iter().find(|s| s.method == method)
    }
}

/// Trains every method on every seed with otherwise identical settings.
pub fn compare(cfg: &ScenarioConfig, methods: &[Method], seeds: &[u64]) -> Result<Comparison> {
    let jobs: Vec<(Method, u64)> = methods
        .iter()
        .flat_map(|&m| seeds.iter().map(move |&s| (m, s)))
        .collect();
    let runs: Vec<RunReport> = jobs
        .par_iter()
        .map(|&(method, seed)| {
            let mut c = cfg.clone();
            c.seed = seed;
            train(&c, method).map(|r| r.report)
        })
        .collect::<Result<_>>()?;
    let summaries = methods
        .iter()
        .map(|&method| {
            let mine: Vec<&RunReport> = runs.iter().filter(|r| r.method == method).collect();
            let col = |f: &dyn Fn(&RunReport) -> f64| {
                MeanStd::of(&mine.iter().map(|r| f(r)).collect::<Vec<_>>())
            };
            MethodSummary {
                method,
                seeds: mine.len(),
                priority: col(&|r| r.outage.priority),
                regular: col(&|r| r.outage.regular),
                mean: col(&|r| r.outage.mean),
                condense_s: col(&|r| r.timings.condense_s),
                rl_s: col(&|r| r.timings.rl_s),
            }
        })
        .collect();
    Ok(Comparison { runs, summaries })
}
