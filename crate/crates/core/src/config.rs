//! Experiment configuration, the service catalog and per-peer parameter sampling.
//!
//! Every knob the simulator exposes lives in [`SimulationConfig`]. Values are
//! checked by [`SimulationConfig::validate`], which reports every breached
//! invariant at once rather than stopping at the first.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{ConfigError, Violation};

/// One of the five services. `0` is the pseudo-service held while serving
/// another peer; `1..=4` are requestable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct ServiceId(u8);

impl ServiceId {
    pub const SERVE: ServiceId = ServiceId(0);
    pub const REQUESTABLE: [ServiceId; 4] =
        [ServiceId(1), ServiceId(2), ServiceId(3), ServiceId(4)];
    pub const COUNT: usize = 5;

    pub fn new(value: u8) -> Result<Self, ConfigError> {
        if (value as usize) < Self::COUNT {
            Ok(ServiceId(value))
        } else {
            Err(ConfigError::UnknownService(value))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_requestable(self) -> bool {
        self.0 != 0
    }
}

impl TryFrom<u8> for ServiceId {
    type Error = ConfigError;
    fn try_from(v: u8) -> Result<Self, Self::Error> {
        ServiceId::new(v)
    }
}

impl From<ServiceId> for u8 {
    fn from(s: ServiceId) -> u8 {
        s.0
    }
}

impl fmt::Display for ServiceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Serv{}", self.0)
    }
}

/// Service completion units (iterations of granted service) per service.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ServiceCatalog {
    scu: [u32; ServiceId::COUNT],
}

impl Default for ServiceCatalog {
    fn default() -> Self {
        Self {
            scu: [0, 25, 50, 75, 100],
        }
    }
}

impl ServiceCatalog {
    pub fn new(scu: [u32; ServiceId::COUNT]) -> Self {
        Self { scu }
    }

    pub fn scu_of(&self, service: ServiceId) -> u32 {
        self.scu[service.index()]
    }

    /// Lookup by raw id, for callers holding an unchecked integer.
    pub fn scu_of_raw(&self, service: u8) -> Result<u32, ConfigError> {
        ServiceId::new(service).map(|s| self.scu_of(s))
    }

    pub fn as_array(&self) -> [u32; ServiceId::COUNT] {
        self.scu
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Network {
    Mesh,
    Regular,
    SmallWorld,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Competitive,
    Cooperative,
    CooperativeRestricted,
}

impl Strategy {
    pub fn is_cooperative(self) -> bool {
        !matches!(self, Strategy::Competitive)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MobilityMode {
    #[serde(rename = "stationary")]
    Stationary,
    #[serde(rename = "random", alias = "random-walk")]
    RandomWalk,
    #[serde(rename = "profile", alias = "profile-based")]
    ProfileBased,
}

/// Which completion record makes a peer a possible provider.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProviderMemory {
    /// Online peers holding the service since their last wake-up (or innately).
    Daily,
    /// Any peer that has ever completed the service, online or not.
    Lifetime,
}

impl MobilityMode {
    pub const ALL: [MobilityMode; 3] = [
        MobilityMode::Stationary,
        MobilityMode::RandomWalk,
        MobilityMode::ProfileBased,
    ];
}

macro_rules! keyword_enum {
    ($ty:ty { $($variant:path => $name:literal $(| $alias:literal)*),+ $(,)? }) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($variant => $name),+ })
            }
        }

        impl FromStr for $ty {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($name $(| $alias)* => Ok($variant),)+
                    other => Err(format!(
                        "unknown value '{other}' (expected one of: {})",
                        [$($name),+].join(", ")
                    )),
                }
            }
        }
    };
}

keyword_enum!(Network {
    Network::Mesh => "mesh",
    Network::Regular => "regular",
    Network::SmallWorld => "small-world" | "small_world",
});

keyword_enum!(Strategy {
    Strategy::Competitive => "competitive",
    Strategy::Cooperative => "cooperative",
    Strategy::CooperativeRestricted => "cooperative-restricted" | "cooperative_restricted",
});

keyword_enum!(ProviderMemory {
    ProviderMemory::Daily => "daily",
    ProviderMemory::Lifetime => "lifetime",
});

keyword_enum!(MobilityMode {
    MobilityMode::Stationary => "stationary",
    MobilityMode::RandomWalk => "random" | "random-walk" | "random_walk",
    MobilityMode::ProfileBased => "profile" | "profile-based" | "profile_based",
});

/// A fraction in `[0, 1]`. Config files may write it as a number (`0.2`) or
/// in percent notation (`"20%"`).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Fraction(pub f64);

impl<'de> Deserialize<'de> for Fraction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Fraction(v)),
            Raw::Text(s) => parse_fraction(&s)
                .map(Fraction)
                .map_err(serde::de::Error::custom),
        }
    }
}

pub fn parse_fraction(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if let Some(pct) = s.strip_suffix('%') {
        pct.trim()
            .parse::<f64>()
            .map(|v| v / 100.0)
            .map_err(|e| format!("bad percentage '{s}': {e}"))
    } else {
        s.parse::<f64>()
            .map_err(|e| format!("bad fraction '{s}': {e}"))
    }
}

/// Inclusive sampling bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[T; 2]", into = "[T; 2]")]
pub struct Bounds<T: Copy> {
    pub lo: T,
    pub hi: T,
}

impl<T: Copy> Bounds<T> {
    pub const fn new(lo: T, hi: T) -> Self {
        Self { lo, hi }
    }
}

impl<T: Copy> From<[T; 2]> for Bounds<T> {
    fn from([lo, hi]: [T; 2]) -> Self {
        Self { lo, hi }
    }
}

impl<T: Copy> From<Bounds<T>> for [T; 2] {
    fn from(b: Bounds<T>) -> Self {
        [b.lo, b.hi]
    }
}

impl Bounds<Fraction> {
    fn raw(self) -> Bounds<f64> {
        Bounds::new(self.lo.0, self.hi.0)
    }
}

/// Per-peer behavioural parameters, fixed for the lifetime of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeerParams {
    /// Minute of day at which the peer joins the network.
    pub up_time: u32,
    /// Minute of day after which the peer leaves at its next opportunity.
    pub down_time: u32,
    /// Iterations spent idle between services.
    pub idle_time: u32,
    /// Per-tick probability of answering a request.
    pub consistency: f64,
    /// Fraction of `idle_time` spent in the serve state.
    pub serv0perc: f64,
}

impl PeerParams {
    /// Whether `minute` falls inside `[up_time, down_time)`, wrapping past midnight
    /// when `down_time < up_time`.
    pub fn is_on_window(&self, minute: u32) -> bool {
        if self.up_time < self.down_time {
            minute >= self.up_time && minute < self.down_time
        } else {
            minute >= self.up_time || minute < self.down_time
        }
    }

    /// Serve window length: `serv0perc * idle_time`, rounded half-up.
    pub fn serve_window(&self) -> u32 {
        (self.serv0perc * f64::from(self.idle_time) + 0.5).floor() as u32
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeerParamRanges {
    pub up_time: Bounds<u32>,
    pub down_time: Bounds<u32>,
    pub idle_time: Bounds<u32>,
    pub consistency: Bounds<Fraction>,
    pub serv0perc: Bounds<Fraction>,
}

impl Default for PeerParamRanges {
    fn default() -> Self {
        Self {
            up_time: Bounds::new(0, 479),
            down_time: Bounds::new(960, 1439),
            idle_time: Bounds::new(30, 120),
            consistency: Bounds::new(Fraction(0.5), Fraction(1.0)),
            serv0perc: Bounds::new(Fraction(0.1), Fraction(0.3)),
        }
    }
}

fn check_range<T: Copy + PartialOrd + fmt::Display>(
    field: &'static str,
    b: Bounds<T>,
) -> Result<(), ConfigError> {
    if b.lo > b.hi {
        Err(ConfigError::EmptyRange {
            field,
            lo: b.lo.to_string(),
            hi: b.hi.to_string(),
        })
    } else {
        Ok(())
    }
}

/// Draws one peer's parameters, each field independently and uniformly from its range.
pub fn sample_peer_params<R: Rng + ?Sized>(
    ranges: &PeerParamRanges,
    rng: &mut R,
) -> Result<PeerParams, ConfigError> {
    check_range("up_time", ranges.up_time)?;
    check_range("down_time", ranges.down_time)?;
    check_range("idle_time", ranges.idle_time)?;
    check_range("consistency", ranges.consistency.raw())?;
    check_range("serv0perc", ranges.serv0perc.raw())?;

    let up_time = rng.gen_range(ranges.up_time.lo..=ranges.up_time.hi);
    let down_time = rng.gen_range(ranges.down_time.lo..=ranges.down_time.hi);
    let idle_time = rng.gen_range(ranges.idle_time.lo..=ranges.idle_time.hi);
    let consistency = uniform_closed(rng, ranges.consistency.raw());
    let serv0perc = uniform_closed(rng, ranges.serv0perc.raw());

    if up_time == down_time {
        return Err(ConfigError::DegenerateSchedule(up_time));
    }
    Ok(PeerParams {
        up_time,
        down_time,
        idle_time,
        consistency,
        serv0perc,
    })
}

fn uniform_closed<R: Rng + ?Sized>(rng: &mut R, b: Bounds<f64>) -> f64 {
    if b.lo == b.hi {
        b.lo
    } else {
        rng.gen_range(b.lo..=b.hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobilityParams {
    /// Grid units moved per iteration in the moving modes.
    pub step_length: f64,
    pub waypoint_count: usize,
    pub profile_radius: f64,
    /// Iterations spent at each profile waypoint.
    pub dwell_iterations: u32,
}

impl Default for MobilityParams {
    fn default() -> Self {
        Self {
            step_length: 1.0,
            waypoint_count: 5,
            profile_radius: 20.0,
            dwell_iterations: 180,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationConfig {
    pub population: usize,
    pub radius: f64,
    pub network: Network,
    /// Long-link probability; only consulted for small-world networks.
    pub beta: f64,
    pub strategy: Strategy,
    pub mobility: MobilityMode,
    pub horizon_days: u32,
    pub minutes_per_day: u32,
    pub seed: u64,
    pub k: f64,
    pub m: f64,
    pub consolidate_frequency: u64,
    pub grid_width: f64,
    pub grid_height: f64,
    pub p_init_completed: f64,
    pub provider_memory: ProviderMemory,
    pub peer_param_ranges: PeerParamRanges,
    pub services: ServiceCatalog,
    pub motion: MobilityParams,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            population: 250,
            radius: 5.0,
            network: Network::SmallWorld,
            beta: 0.2,
            strategy: Strategy::Competitive,
            mobility: MobilityMode::ProfileBased,
            horizon_days: 30,
            minutes_per_day: 1440,
            seed: 42,
            k: 1.0,
            m: 1.0,
            consolidate_frequency: 1440,
            grid_width: 100.0,
            grid_height: 100.0,
            p_init_completed: 0.25,
            provider_memory: ProviderMemory::Lifetime,
            peer_param_ranges: PeerParamRanges::default(),
            services: ServiceCatalog::default(),
            motion: MobilityParams::default(),
        }
    }
}

fn unit(v: f64) -> bool {
    (0.0..=1.0).contains(&v)
}

impl SimulationConfig {
    pub fn horizon_iterations(&self) -> u64 {
        u64::from(self.horizon_days) * u64::from(self.minutes_per_day)
    }

    /// Checks every invariant and reports all violations together.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut v = Vec::new();
        let mut push = |field, msg: String| v.push(Violation::new(field, msg));

        if self.population == 0 {
            push("population", "population must be positive".into());
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            push(
                "radius",
                format!("radius must be positive (got {})", self.radius),
            );
        }
        if !(self.grid_width > 0.0 && self.grid_width.is_finite()) {
            push(
                "grid_width",
                format!("grid_width must be positive (got {})", self.grid_width),
            );
        }
        if !(self.grid_height > 0.0 && self.grid_height.is_finite()) {
            push(
                "grid_height",
                format!("grid_height must be positive (got {})", self.grid_height),
            );
        }
        let half = self.grid_width.min(self.grid_height) / 2.0;
        if self.radius >= half {
            push(
                "radius",
                format!(
                    "radius {} must be below half the smaller grid side ({half})",
                    self.radius
                ),
            );
        }
        if !unit(self.beta) {
            push("beta", format!("beta outside [0,1] (got {})", self.beta));
        }
        if self.network == Network::SmallWorld && self.beta > 0.0 && self.population < 2 {
            push(
                "population",
                "small-world long links need at least 2 peers".into(),
            );
        }
        if self.horizon_days == 0 {
            push("horizon_days", "horizon_days must be positive".into());
        }
        if self.minutes_per_day == 0 {
            push("minutes_per_day", "minutes_per_day must be positive".into());
        }
        if !unit(self.k) {
            push("k", format!("k outside [0,1] (got {})", self.k));
        }
        if !unit(self.m) {
            push("m", format!("m outside [0,1] (got {})", self.m));
        }
        if self.strategy == Strategy::CooperativeRestricted && !(self.k > 0.0 && self.m > 0.0) {
            push(
                "strategy",
                "cooperative-restricted requires k > 0 and m > 0".into(),
            );
        }
        if self.consolidate_frequency == 0 {
            push(
                "consolidate_frequency",
                "consolidate_frequency must be positive".into(),
            );
        }
        if !unit(self.p_init_completed) {
            push(
                "p_init_completed",
                format!(
                    "p_init_completed outside [0,1] (got {})",
                    self.p_init_completed
                ),
            );
        }

        let r = &self.peer_param_ranges;
        let mpd = self.minutes_per_day;
        for (field, b) in [("up_time", r.up_time), ("down_time", r.down_time)] {
            if b.lo > b.hi {
                push(field, format!("empty range [{}, {}]", b.lo, b.hi));
            }
            if b.hi >= mpd {
                push(
                    field,
                    format!("range end {} must be a minute of day below {mpd}", b.hi),
                );
            }
        }
        if r.up_time.lo <= r.down_time.hi && r.down_time.lo <= r.up_time.hi {
            push("down_time", "up_time and down_time ranges overlap".into());
        }
        if r.idle_time.lo > r.idle_time.hi {
            push(
                "idle_time",
                format!("empty range [{}, {}]", r.idle_time.lo, r.idle_time.hi),
            );
        }
        if r.idle_time.lo == 0 {
            push("idle_time", "idle_time must be positive".into());
        }
        for (field, b) in [
            ("consistency", r.consistency.raw()),
            ("serv0perc", r.serv0perc.raw()),
        ] {
            if b.lo > b.hi {
                push(field, format!("empty range [{}, {}]", b.lo, b.hi));
            }
            if !unit(b.lo) || !unit(b.hi) {
                push(field, format!("range [{}, {}] outside [0,1]", b.lo, b.hi));
            }
        }

        let scu = self.services.as_array();
        if scu[0] != 0 {
            push("scu", format!("Serv0 must take 0 SCU (got {})", scu[0]));
        }
        if scu[1..].iter().any(|&u| u == 0) {
            push("scu", "services 1-4 need a positive SCU".into());
        }

        let mo = &self.motion;
        if !(mo.step_length >= 0.0 && mo.step_length.is_finite()) {
            push(
                "step_length",
                format!("step_length must be non-negative (got {})", mo.step_length),
            );
        }
        if self.mobility == MobilityMode::ProfileBased {
            if mo.waypoint_count < 2 {
                push(
                    "waypoint_count",
                    format!(
                        "profile mobility needs at least 2 waypoints (got {})",
                        mo.waypoint_count
                    ),
                );
            }
            if !(mo.profile_radius > 0.0) {
                push(
                    "profile_radius",
                    format!(
                        "profile_radius must be positive (got {})",
                        mo.profile_radius
                    ),
                );
            }
        }

        if v.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(v))
        }
    }

    pub fn validated(self) -> Result<Self, ConfigError> {
        self.validate().map(|()| self)
    }

    /// Non-fatal observations about the configuration (e.g. ignored knobs).
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.network != Network::SmallWorld && self.beta != 0.0 {
            w.push(format!("beta ignored for {} network", self.network));
        }
        w
    }
}

/// Sectioned on-disk configuration. Every key is optional and overrides the
/// corresponding built-in default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub world: WorldSection,
    #[serde(default)]
    pub topology: TopologySection,
    #[serde(default)]
    pub peers: PeersSection,
    #[serde(default)]
    pub mobility: MobilitySection,
    #[serde(default)]
    pub social: SocialSection,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldSection {
    pub population: Option<usize>,
    pub radius: Option<f64>,
    pub grid_width: Option<f64>,
    pub grid_height: Option<f64>,
    pub horizon_days: Option<u32>,
    pub minutes_per_day: Option<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologySection {
    pub network: Option<Network>,
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeersSection {
    pub strategy: Option<Strategy>,
    pub p_init_completed: Option<Fraction>,
    pub provider_memory: Option<ProviderMemory>,
    pub up_time: Option<Bounds<u32>>,
    pub down_time: Option<Bounds<u32>>,
    pub idle_time: Option<Bounds<u32>>,
    pub consistency: Option<Bounds<Fraction>>,
    pub serv0perc: Option<Bounds<Fraction>>,
    pub scu: Option<ServiceCatalog>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MobilitySection {
    pub mode: Option<MobilityMode>,
    pub step_length: Option<f64>,
    pub waypoint_count: Option<usize>,
    pub profile_radius: Option<f64>,
    pub dwell_iterations: Option<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SocialSection {
    pub k: Option<f64>,
    pub m: Option<f64>,
    pub consolidate_frequency: Option<u64>,
}

macro_rules! set_if {
    ($dst:expr, $src:expr) => {
        if let Some(v) = $src {
            $dst = v;
        }
    };
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn apply_to(&self, cfg: &mut SimulationConfig) {
        set_if!(cfg.seed, self.seed);
        let w = &self.world;
        set_if!(cfg.population, w.population);
        set_if!(cfg.radius, w.radius);
        set_if!(cfg.grid_width, w.grid_width);
        set_if!(cfg.grid_height, w.grid_height);
        set_if!(cfg.horizon_days, w.horizon_days);
        set_if!(cfg.minutes_per_day, w.minutes_per_day);
        set_if!(cfg.network, self.topology.network);
        set_if!(cfg.beta, self.topology.beta);
        let p = &self.peers;
        set_if!(cfg.strategy, p.strategy);
        set_if!(cfg.p_init_completed, p.p_init_completed.map(|f| f.0));
        set_if!(cfg.provider_memory, p.provider_memory);
        set_if!(cfg.peer_param_ranges.up_time, p.up_time);
        set_if!(cfg.peer_param_ranges.down_time, p.down_time);
        set_if!(cfg.peer_param_ranges.idle_time, p.idle_time);
        set_if!(cfg.peer_param_ranges.consistency, p.consistency);
        set_if!(cfg.peer_param_ranges.serv0perc, p.serv0perc);
        set_if!(cfg.services, p.scu);
        let mo = &self.mobility;
        set_if!(cfg.mobility, mo.mode);
        set_if!(cfg.motion.step_length, mo.step_length);
        set_if!(cfg.motion.waypoint_count, mo.waypoint_count);
        set_if!(cfg.motion.profile_radius, mo.profile_radius);
        set_if!(cfg.motion.dwell_iterations, mo.dwell_iterations);
        set_if!(cfg.k, self.social.k);
        set_if!(cfg.m, self.social.m);
        set_if!(cfg.consolidate_frequency, self.social.consolidate_frequency);
    }

    /// Full snapshot of a config in file form, so it can be fed back via `--config`.
    pub fn from_config(cfg: &SimulationConfig) -> Self {
        let r = &cfg.peer_param_ranges;
        Self {
            seed: Some(cfg.seed),
            world: WorldSection {
                population: Some(cfg.population),
                radius: Some(cfg.radius),
                grid_width: Some(cfg.grid_width),
                grid_height: Some(cfg.grid_height),
                horizon_days: Some(cfg.horizon_days),
                minutes_per_day: Some(cfg.minutes_per_day),
            },
            topology: TopologySection {
                network: Some(cfg.network),
                beta: Some(cfg.beta),
            },
            peers: PeersSection {
                strategy: Some(cfg.strategy),
                p_init_completed: Some(Fraction(cfg.p_init_completed)),
                provider_memory: Some(cfg.provider_memory),
                up_time: Some(r.up_time),
                down_time: Some(r.down_time),
                idle_time: Some(r.idle_time),
                consistency: Some(r.consistency),
                serv0perc: Some(r.serv0perc),
                scu: Some(cfg.services),
            },
            mobility: MobilitySection {
                mode: Some(cfg.mobility),
                step_length: Some(cfg.motion.step_length),
                waypoint_count: Some(cfg.motion.waypoint_count),
                profile_radius: Some(cfg.motion.profile_radius),
                dwell_iterations: Some(cfg.motion.dwell_iterations),
            },
            social: SocialSection {
                k: Some(cfg.k),
                m: Some(cfg.m),
                consolidate_frequency: Some(cfg.consolidate_frequency),
            },
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config sections always serialize")
    }
}
