//! Seeded discrete-time simulator of peer-to-peer service sharing among
//! social IoT objects.
//!
//! A [`SimulationConfig`] fully determines a replicate together with its seed:
//! build a world with [`init_world`], advance it with [`World::step`], or use
//! [`run`] / [`run_batch`] to get per-day counters back.

pub mod config;
pub mod engine;
pub mod error;
pub mod metrics;
pub mod mobility;
pub mod output;
pub mod peer;
pub mod rng;
pub mod scenario;
pub mod social;
pub mod topology;

pub use config::{MobilityMode, Network, SimulationConfig, Strategy};
pub use engine::{init_world, run, run_batch, run_observed, BatchResult, Execution, World};
pub use error::{ConfigError, MetricsError};
pub use metrics::{Counter, DailyMetrics, RunResult};
pub use topology::{PeerId, Position};

/// Version string embedded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
