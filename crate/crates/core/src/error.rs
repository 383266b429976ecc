use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

/// A single breached configuration invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

impl Violation {
    pub fn new(field: &'static str, message: impl Into<String>) -> Self {
        Self {
            field,
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|v| format!("  - {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid configuration:\n{}", join_violations(.0))]
    Invalid(Vec<Violation>),

    #[error("unknown service id {0} (expected 0..=4)")]
    UnknownService(u8),

    #[error("empty sampling range for {field}: lo {lo} > hi {hi}")]
    EmptyRange {
        field: &'static str,
        lo: String,
        hi: String,
    },

    #[error("sampled up_time equals down_time ({0})")]
    DegenerateSchedule(u32),

    #[error("long links need at least 2 peers (got {0})")]
    TooFewPeers(usize),

    #[error("profile_radius must be positive (got {0})")]
    ProfileRadius(f64),

    #[error("cannot read config file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed config file: {0}")]
    Parse(#[from] toml::de::Error),
}

impl ConfigError {
    pub fn violations(&self) -> &[Violation] {
        match self {
            ConfigError::Invalid(v) => v,
            _ => &[],
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("day {day} outside horizon 1..={horizon}")]
    DayOutOfRange { day: u32, horizon: u32 },

    #[error("cannot aggregate an empty batch")]
    EmptyBatch,

    #[error("runs disagree on horizon: expected {expected} days, found {found}")]
    HorizonMismatch { expected: usize, found: usize },
}
