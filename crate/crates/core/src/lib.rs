//! Graph-condensed waypoint planning for multi-UAV uplink service.
//!
//! Candidate waypoints over the service area are condensed to a small set
//! of centroids (annealing, k-means or an SNR-proxy ranking), joined into a
//! motion graph whose edges respect the per-slot flight range, and then
//! independent tabular Q-learners move the UAVs over that graph to keep
//! priority and regular users out of outage.

pub mod channel;
pub mod cli;
pub mod condense;
pub mod config;
pub mod error;
pub mod geom;
pub mod radio;
pub mod rl;
pub mod rng;
pub mod scenario;
pub mod sim;

pub use condense::{CondensedGraph, Method};
pub use config::ScenarioConfig;
pub use error::{Error, Result};
pub use geom::{Area, Point2, Point3};
pub use sim::{compare, evaluate, sweep_mu, train, RunReport, TrainedRun, World};
