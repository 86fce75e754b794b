//! Run configuration: every physical, radio, condensation and learning
//! parameter plus the master seed.
//!
//! The on-disk format is JSON. Every section and every field is optional;
//! omitted values take the defaults shown by `gcqap config --dump-defaults`.
//! Unknown fields are rejected so typos do not silently fall back to a
//! default.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geom::Area;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub area: Area,
    pub uavs: UavConfig,
    pub users: UserConfig,
    pub channel: ChannelConfig,
    pub radio: RadioConfig,
    pub reward: RewardConfig,
    pub learning: LearningConfig,
    pub condense: CondenseConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UavConfig {
    /// Number of aerial base stations.
    pub count: usize,
    /// Flight altitude, m.
    pub altitude_m: f64,
    pub altitude_min_m: f64,
    pub altitude_max_m: f64,
    /// Horizontal speed cap, m/s.
    pub v_max_mps: f64,
    /// Slot duration, s.
    pub slot_s: f64,
    pub start: StartRule,
}

/// Where the UAVs sit at the start of every episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartRule {
    /// Every `floor(M / N)`-th centroid.
    Spread,
    /// Distinct centroids drawn once per run from the start stream.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UserConfig {
    pub count: usize,
    pub priority_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig {
    pub b1: f64,
    pub b2: f64,
    pub xi_deg: f64,
    pub path_loss_exponent: f64,
    pub kappa_los_db: f64,
    pub kappa_nlos_db: f64,
    pub carrier_hz: f64,
    /// Linear reference loss; `null` means the 1 m free-space value `(4 pi f_c / c)^2`.
    pub k0_linear: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadioConfig {
    pub noise_dbm: f64,
    pub bandwidth_hz: f64,
    pub sinr_threshold_db: f64,
    pub p_max_dbm: f64,
    pub p0_dbm: f64,
    pub alpha_ol: f64,
    pub resource_blocks: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardConfig {
    pub mu_pr: f64,
    pub mu_nr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearningConfig {
    pub episodes: usize,
    pub steps_per_episode: usize,
    pub step_size: f64,
    pub discount: f64,
    pub epsilon_start: f64,
    pub epsilon_min: f64,
    pub epsilon_decay: f64,
    /// Greedy episodes run after training to measure outage.
    pub eval_episodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CondenseConfig {
    /// Number of condensed waypoints M.
    pub centroids: usize,
    /// Number of dense candidate nodes N0.
    pub candidates: usize,
    pub candidate_rule: CandidateRule,
    pub t0: f64,
    pub t_min: f64,
    pub cooling: f64,
    /// Cap on temperature levels.
    pub max_iters: usize,
    /// Proposals per temperature level before cooling.
    pub moves_per_level: usize,
    pub jump_prob: f64,
    /// Gaussian step std as a fraction of the area width.
    pub step_fraction: f64,
    /// Stop when the distortion moves less than this (relative) over `window` iterations.
    pub tolerance: f64,
    pub window: usize,
    pub kmeans_iters: usize,
    /// Minimum pairwise separation for the SNR-proxy selection, m.
    pub snrp_min_separation_m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateRule {
    Grid,
    UniformRandom,
}

impl Default for UavConfig {
    fn default() -> Self {
        Self {
            count: 3,
            altitude_m: 100.0,
            altitude_min_m: 50.0,
            altitude_max_m: 150.0,
            v_max_mps: 25.0,
            slot_s: 10.0,
            start: StartRule::Spread,
        }
    }
}

impl Default for UserConfig {
    fn default() -> Self {
        Self {
            count: 100,
            priority_fraction: 0.2,
        }
    }
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            b1: 0.1,
            b2: 1.0,
            xi_deg: 5.0,
            path_loss_exponent: 2.0,
            kappa_los_db: 1.0,
            kappa_nlos_db: 20.0,
            carrier_hz: 2.0e9,
            k0_linear: None,
        }
    }
}

impl Default for RadioConfig {
    fn default() -> Self {
        Self {
            noise_dbm: -90.0,
            bandwidth_hz: 1.0e6,
            sinr_threshold_db: 5.0,
            p_max_dbm: 23.0,
            p0_dbm: -60.0,
            alpha_ol: 0.8,
            resource_blocks: 1,
        }
    }
}

impl Default for RewardConfig {
    fn default() -> Self {
        Self {
            mu_pr: 40.0,
            mu_nr: 1.0,
        }
    }
}

impl Default for LearningConfig {
    fn default() -> Self {
        Self {
            episodes: 400,
            steps_per_episode: 100,
            step_size: 0.1,
            discount: 0.9,
            epsilon_start: 1.0,
            epsilon_min: 0.05,
            epsilon_decay: 0.995,
            eval_episodes: 50,
        }
    }
}

impl Default for CondenseConfig {
    fn default() -> Self {
        Self {
            centroids: 33,
            candidates: 400,
            candidate_rule: CandidateRule::Grid,
            t0: 100.0,
            t_min: 1e-3,
            cooling: 0.95,
            max_iters: 1000,
            moves_per_level: 33,
            jump_prob: 0.2,
            step_fraction: 0.02,
            tolerance: 1e-6,
            window: 50,
            kmeans_iters: 100,
            snrp_min_separation_m: 100.0,
        }
    }
}

impl ChannelConfig {
    pub fn k0(&self) -> f64 {
        self.k0_linear.unwrap_or_else(|| {
            let k = 4.0 * std::f64::consts::PI * self.carrier_hz / SPEED_OF_LIGHT;
            k * k
        })
    }
}

impl UavConfig {
    /// Largest horizontal displacement allowed in one slot.
    pub fn step_radius(&self) -> f64 {
        self.v_max_mps * self.slot_s
    }

    pub fn altitude_ok(&self) -> bool {
        self.altitude_min_m <= self.altitude_m && self.altitude_m <= self.altitude_max_m
    }
}

impl LearningConfig {
    /// Exploration rate used during training episode `episode` (0-based).
    pub fn epsilon_at(&self, episode: usize) -> f64 {
        let decayed = self.epsilon_start * self.epsilon_decay.powi(episode as i32);
        decayed.max(self.epsilon_min)
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Short content hash of the configuration with the seed cleared, used
    /// to name run directories.
    pub fn config_hash(&self) -> String {
        let mut unseeded = self.clone();
        unseeded.seed = 0;
        let bytes = serde_json::to_vec(&unseeded).expect("config serializes");
        hex::encode(&Sha256::digest(&bytes)[..8])
    }

    pub fn validate(&self) -> Result<()> {
        let a = &self.area;
        check(a.x_min < a.x_max, "area.x_max", "must exceed x_min")?;
        check(a.y_min < a.y_max, "area.y_max", "must exceed y_min")?;
        check(
            [a.x_min, a.x_max, a.y_min, a.y_max]
                .iter()
                .all(|v| v.is_finite()),
            "area",
            "bounds must be finite",
        )?;

        let u = &self.uavs;
        check(u.count >= 1, "uavs.count", "need at least one UAV")?;
        check(u.altitude_m > 0.0, "uavs.altitude_m", "must be positive")?;
        check(
            u.altitude_min_m <= u.altitude_m && u.altitude_m <= u.altitude_max_m,
            "uavs.altitude_m",
            "must lie within [altitude_min_m, altitude_max_m]",
        )?;
        check(u.v_max_mps > 0.0, "uavs.v_max_mps", "must be positive")?;
        check(u.slot_s > 0.0, "uavs.slot_s", "must be positive")?;

        check(
            self.users.count >= 1,
            "users.count",
            "need at least one user",
        )?;
        check(
            (0.0..=1.0).contains(&self.users.priority_fraction),
            "users.priority_fraction",
            "must lie in [0, 1]",
        )?;

        let c = &self.channel;
        check(c.b1 > 0.0, "channel.b1", "must be positive")?;
        check(c.b2 > 0.0, "channel.b2", "must be positive")?;
        check(
            c.path_loss_exponent > 0.0,
            "channel.path_loss_exponent",
            "must be positive",
        )?;
        check(
            c.kappa_los_db >= 0.0,
            "channel.kappa_los_db",
            "must be >= 0 dB",
        )?;
        check(
            c.kappa_nlos_db >= 0.0,
            "channel.kappa_nlos_db",
            "must be >= 0 dB",
        )?;
        check(c.carrier_hz > 0.0, "channel.carrier_hz", "must be positive")?;
        check(
            c.k0() > 0.0 && c.k0().is_finite(),
            "channel.k0_linear",
            "must be positive",
        )?;

        let r = &self.radio;
        check(r.noise_dbm.is_finite(), "radio.noise_dbm", "must be finite")?;
        check(
            r.bandwidth_hz > 0.0,
            "radio.bandwidth_hz",
            "must be positive",
        )?;
        check(
            r.sinr_threshold_db.is_finite(),
            "radio.sinr_threshold_db",
            "must be finite",
        )?;
        check(r.p_max_dbm.is_finite(), "radio.p_max_dbm", "must be finite")?;
        check(r.p0_dbm.is_finite(), "radio.p0_dbm", "must be finite")?;
        check(
            (0.0..=1.0).contains(&r.alpha_ol),
            "radio.alpha_ol",
            "must lie in [0, 1]",
        )?;
        check(
            r.resource_blocks >= 1,
            "radio.resource_blocks",
            "must be >= 1",
        )?;

        let w = &self.reward;
        check(w.mu_nr >= 0.0, "reward.mu_nr", "must be >= 0")?;
        check(w.mu_pr >= w.mu_nr, "reward.mu_pr", "must be >= mu_nr")?;

        let l = &self.learning;
        check(l.episodes >= 1, "learning.episodes", "must be >= 1")?;
        check(
            l.steps_per_episode >= 1,
            "learning.steps_per_episode",
            "must be >= 1",
        )?;
        check(
            l.step_size > 0.0 && l.step_size <= 1.0,
            "learning.step_size",
            "must lie in (0, 1]",
        )?;
        check(
            l.discount > 0.0 && l.discount < 1.0,
            "learning.discount",
            "must lie in (0, 1)",
        )?;
        check(
            (0.0..=1.0).contains(&l.epsilon_min)
                && l.epsilon_min <= l.epsilon_start
                && l.epsilon_start <= 1.0,
            "learning.epsilon_start",
            "need epsilon_min <= epsilon_start <= 1",
        )?;
        check(
            l.epsilon_decay > 0.0 && l.epsilon_decay <= 1.0,
            "learning.epsilon_decay",
            "must lie in (0, 1]",
        )?;

        let k = &self.condense;
        check(k.centroids >= 1, "condense.centroids", "must be >= 1")?;
        check(
            k.centroids <= k.candidates,
            "condense.centroids",
            "must not exceed condense.candidates",
        )?;
        check(k.t0 > 0.0, "condense.t0", "must be positive")?;
        check(
            k.t_min > 0.0 && k.t_min < k.t0,
            "condense.t_min",
            "need 0 < t_min < t0",
        )?;
        check(
            k.cooling > 0.0 && k.cooling < 1.0,
            "condense.cooling",
            "must lie in (0, 1)",
        )?;
        check(k.max_iters >= 1, "condense.max_iters", "must be >= 1")?;
        check(
            k.moves_per_level >= 1,
            "condense.moves_per_level",
            "must be >= 1",
        )?;
        check(
            (0.0..=1.0).contains(&k.jump_prob),
            "condense.jump_prob",
            "must lie in [0, 1]",
        )?;
        check(
            k.step_fraction >= 0.0,
            "condense.step_fraction",
            "must be >= 0",
        )?;
        check(k.tolerance >= 0.0, "condense.tolerance", "must be >= 0")?;
        check(k.window >= 1, "condense.window", "must be >= 1")?;
        check(
            k.snrp_min_separation_m >= 0.0,
            "condense.snrp_min_separation_m",
            "must be >= 0",
        )?;
        Ok(())
    }
}

fn check(ok: bool, field: &'static str, reason: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::invalid(field, reason))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_carry_reported_parameters() {
        let cfg = ScenarioConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.uavs.count, 3);
        assert_eq!(cfg.users.count, 100);
        assert_eq!(cfg.condense.centroids, 33);
        assert_eq!(cfg.uavs.altitude_m, 100.0);
        assert_eq!(cfg.radio.sinr_threshold_db, 5.0);
        assert_eq!(cfg.radio.p_max_dbm, 23.0);
        assert_eq!(cfg.radio.noise_dbm, -90.0);
        assert_eq!(cfg.channel.b1, 0.1);
        assert_eq!(cfg.channel.b2, 1.0);
        assert_eq!(cfg.channel.xi_deg, 5.0);
        assert_eq!(cfg.condense.t0, 100.0);
        assert_eq!(cfg.condense.t_min, 1e-3);
        assert_eq!(cfg.condense.cooling, 0.95);
        assert_eq!(cfg.condense.max_iters, 1000);
        assert_eq!(cfg.reward.mu_pr, 40.0);
        assert_eq!(cfg.learning.episodes, 400);
        assert_eq!(cfg.learning.steps_per_episode, 100);
    }

    #[test]
    fn empty_object_fills_defaults() {
        let cfg = ScenarioConfig::from_json("{}").unwrap();
        assert_eq!(cfg, ScenarioConfig::default());
        assert_eq!(cfg.seed, 0);
    }

    #[test]
    fn partial_section_keeps_other_defaults() {
        let cfg =
            ScenarioConfig::from_json(r#"{"condense": {"centroids": 12}, "seed": 9}"#).unwrap();
        assert_eq!(cfg.condense.centroids, 12);
        assert_eq!(cfg.condense.candidates, 400);
        assert_eq!(cfg.seed, 9);
    }

    #[test]
    fn zero_centroids_names_field() {
        let err = ScenarioConfig::from_json(r#"{"condense": {"centroids": 0}}"#).unwrap_err();
        match err {
            Error::Invalid { field, .. } => assert_eq!(field, "condense.centroids"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_and_unknown_fields_fail_to_parse() {
        assert!(matches!(
            ScenarioConfig::from_json("{ nope"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            ScenarioConfig::from_json(r#"{"uavs": {"cnt": 2}}"#),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn reference_loss_is_free_space_at_one_metre() {
        let k0 = ChannelConfig::default().k0();
        assert!((10.0 * k0.log10() - 38.4684).abs() < 1e-3);
    }

    #[test]
    fn epsilon_schedule_floors_at_minimum() {
        let l = LearningConfig::default();
        assert_eq!(l.epsilon_at(0), 1.0);
        assert!((l.epsilon_at(1) - 0.995).abs() < 1e-15);
        let l = LearningConfig {
            epsilon_decay: 0.5,
            ..l
        };
        assert_eq!(l.epsilon_at(50), 0.05);
    }

    #[test]
    fn hash_ignores_seed() {
        let a = ScenarioConfig::default();
        let b = ScenarioConfig {
            seed: 5,
            ..a.clone()
        };
        let c = ScenarioConfig {
            reward: RewardConfig {
                mu_pr: 15.0,
                mu_nr: 1.0,
            },
            ..a.clone()
        };
        assert_eq!(a.config_hash(), b.config_hash());
        assert_ne!(a.config_hash(), c.config_hash());
        assert_eq!(a.config_hash().len(), 16);
    }
}
