//! World construction, the fixed-phase iteration loop and batch replication.
//!
//! One iteration is one simulated minute. Each [`World::step`] runs, in order:
//! mobility, encounter recording, social consolidation (every
//! `consolidate_frequency` iterations), cooperative conflict pairing, peer
//! transitions in a freshly shuffled order, and metric accumulation.

use std::io::{self, Write};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{sample_peer_params, Network, ServiceId, SimulationConfig, Strategy};
use crate::error::{ConfigError, Violation};
use crate::metrics::{aggregate_batch, BatchAggregate, MetricsAccumulator, RunResult};
use crate::mobility::{init_mobility, step_position, MobilityState};
use crate::peer::{resolve_conflict, Event, Events, PartnerView, Peer, PeerStatus, ServiceSet};
use crate::rng::Streams;
use crate::social::SocialTables;
use crate::topology::{
    build_long_links, candidate_tier_into, LongLinkTable, Neighborhoods, PeerId, Position,
    SpatialIndex, Torus,
};

pub struct World {
    cfg: SimulationConfig,
    torus: Torus,
    peers: Vec<Peer>,
    positions: Vec<Position>,
    mobility: Vec<MobilityState>,
    social: Vec<SocialTables>,
    long_links: LongLinkTable,
    iteration: u64,
    rng: Streams,
    index: SpatialIndex,
    hood: Neighborhoods,
    metrics: MetricsAccumulator,
    granted: Vec<bool>,
    order: Vec<usize>,
    scratch: Vec<PeerId>,
    // Per-peer offered services, kept in step with `peers` during a tick.
    offer: Vec<ServiceSet>,
}

/// Builds the initial world for `cfg` (validated here). All peers start off.
pub fn init_world(cfg: &SimulationConfig) -> Result<World, ConfigError> {
    cfg.validate()?;
    let cfg = cfg.clone();
    let n = cfg.population;
    let torus = Torus::new(cfg.grid_width, cfg.grid_height);
    let mut rng = Streams::new(cfg.seed);

    let positions: Vec<Position> = (0..n)
        .map(|_| torus.random_position(&mut rng.placement))
        .collect();

    let mut peers = Vec::with_capacity(n);
    for i in 0..n {
        let params = sample_peer_params(&cfg.peer_param_ranges, &mut rng.params)?;
        let innate: ServiceSet = ServiceId::REQUESTABLE
            .into_iter()
            .filter(|_| rng.params.gen_bool(cfg.p_init_completed))
            .collect();
        peers.push(Peer::new(PeerId::from_index(i), params, innate));
    }

    let mobility = positions
        .iter()
        .map(|&p| init_mobility(p, cfg.mobility, &cfg.motion, &torus, &mut rng.mobility))
        .collect::<Result<Vec<_>, _>>()?;

    let long_links = match cfg.network {
        Network::SmallWorld => build_long_links(n, cfg.beta, &mut rng.long_links)?,
        Network::Mesh | Network::Regular => LongLinkTable::empty(n),
    };

    let social = (0..n)
        .map(|i| SocialTables::new(PeerId::from_index(i), n))
        .collect();
    let mut index = SpatialIndex::new(torus, cfg.radius);
    let hood = Neighborhoods::compute(cfg.network, &mut index, &positions);
    let metrics = MetricsAccumulator::new(cfg.horizon_days);

    let mut world = World {
        torus,
        peers,
        positions,
        mobility,
        social,
        long_links,
        iteration: 0,
        rng,
        index,
        hood,
        metrics,
        granted: vec![false; n],
        order: (0..n).collect(),
        scratch: Vec::new(),
        offer: Vec::new(),
        cfg,
    };
    world.refresh_offers();
    Ok(world)
}

/// One row of a positions/status snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SnapshotRow {
    pub peer_id: PeerId,
    pub status: u8,
    pub x: f64,
    pub y: f64,
}

impl World {
    pub fn config(&self) -> &SimulationConfig {
        &self.cfg
    }

    pub fn torus(&self) -> &Torus {
        &self.torus
    }

    pub fn peers(&self) -> &[Peer] {
        &self.peers
    }

    pub fn positions(&self) -> &[Position] {
        &self.positions
    }

    pub fn mobility_states(&self) -> &[MobilityState] {
        &self.mobility
    }

    pub fn social(&self) -> &[SocialTables] {
        &self.social
    }

    pub fn long_links(&self) -> &LongLinkTable {
        &self.long_links
    }

    pub fn neighborhoods(&self) -> &Neighborhoods {
        &self.hood
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub fn minute_of_day(&self) -> u32 {
        (self.iteration % u64::from(self.cfg.minutes_per_day)) as u32
    }

    /// 1-based day of the current iteration.
    pub fn day(&self) -> u32 {
        (self.iteration / u64::from(self.cfg.minutes_per_day)) as u32 + 1
    }

    pub fn is_finished(&self) -> bool {
        self.iteration >= self.cfg.horizon_iterations()
    }

    pub fn metrics(&self) -> &MetricsAccumulator {
        &self.metrics
    }

    /// Communication neighbourhood of `peer` at the current positions.
    pub fn neighbors_of(&self, peer: PeerId) -> Vec<PeerId> {
        self.hood.neighbors_of(peer, &self.long_links)
    }

    fn restricted(&self) -> bool {
        self.cfg.strategy == Strategy::CooperativeRestricted
    }

    /// Eligible providers of `service` for `peer`, local tier first, in id order.
    fn candidate_set(&self, peer: PeerId, service: ServiceId, out: &mut Vec<PeerId>) {
        let offer = &self.offer;
        let friends = self.restricted().then(|| &self.social[peer.index()]);
        let eligible =
            |j: PeerId| offer[j.index()].contains(service) && friends.is_none_or(|t| t.is_friend(j));
        candidate_tier_into(
            peer,
            self.hood.local_tier(peer),
            self.long_links.links(peer),
            eligible,
            out,
        );
    }

    /// Eligible providers of `service` for `peer` in the current state, in
    /// random order drawn from `rng` (the world's own streams are untouched).
    pub fn candidate_providers<R: Rng + ?Sized>(&self, peer: PeerId, service: ServiceId, rng: &mut R) -> Vec<PeerId> {
        let mut out = Vec::new();
        self.candidate_set(peer, service, &mut out);
        out.shuffle(rng);
        out
    }

    /// Advances one iteration.
    pub fn step(&mut self) {
        assert!(!self.is_finished(), "step past the configured horizon");
        let day = self.day();
        let mut events = Vec::new();

        // 1. mobility
        for i in 0..self.positions.len() {
            self.positions[i] = step_position(
                self.positions[i],
                &mut self.mobility[i],
                &self.torus,
                &mut self.rng.mobility,
            );
        }

        // 2. neighbourhoods and encounters
        self.hood.update(&mut self.index, &self.positions);
        self.record_encounters();

        // 3. consolidation
        if self.iteration % self.cfg.consolidate_frequency == 0 {
            for t in &mut self.social {
                t.consolidate(self.cfg.k, self.cfg.m, self.iteration, &mut self.rng.social);
            }
        }

        let minute = self.minute_of_day();
        for p in &mut self.peers {
            p.begin_tick();
            p.drop_out_if_down(minute);
        }
        self.granted.iter_mut().for_each(|g| *g = false);
        self.refresh_offers();

        // 4. conflict pairing
        if self.cfg.strategy.is_cooperative() {
            self.pair_conflicts(&mut events);
        }

        // 5. peer transitions
        let mut order = std::mem::take(&mut self.order);
        order.shuffle(&mut self.rng.state_machine);
        for &i in &order {
            let ev = self.step_peer(i);
            self.offer[i] = self.peers[i].offered(self.cfg.provider_memory);
            if !ev.is_empty() {
                events.push(ev);
            }
        }
        self.order = order;

        // 6. metrics
        for ev in events {
            self.metrics.record(day, ev).expect("day within horizon");
        }

        self.iteration += 1;
    }

    fn refresh_offers(&mut self) {
        let memory = self.cfg.provider_memory;
        self.offer.clear();
        self.offer.extend(self.peers.iter().map(|p| p.offered(memory)));
    }

    fn record_encounters(&mut self) {
        match self.cfg.network {
            Network::Mesh => self
                .social
                .iter_mut()
                .for_each(SocialTables::record_encounter_with_all),
            Network::Regular => {
                for (i, t) in self.social.iter_mut().enumerate() {
                    t.record_encounters(self.hood.within_radius(PeerId::from_index(i)));
                }
            }
            Network::SmallWorld => {
                for (i, t) in self.social.iter_mut().enumerate() {
                    let id = PeerId::from_index(i);
                    let near = self.hood.within_radius(id);
                    t.record_encounters(near);
                    self.scratch.clear();
                    self.scratch.extend(
                        self.long_links
                            .links(id)
                            .iter()
                            .filter(|l| near.binary_search(l).is_err()),
                    );
                    t.record_encounters(&self.scratch);
                }
            }
        }
    }

    fn has_available(&self, cands: &[PeerId]) -> bool {
        cands
            .iter()
            .any(|c| self.peers[c.index()].status.can_reply(true))
    }

    /// Pairs mutually searching peers that can each provide the other's
    /// service and have no idle or serving provider to turn to.
    fn pair_conflicts(&mut self, events: &mut Vec<Events>) {
        let mut searching: Vec<usize> = (0..self.peers.len())
            .filter(|&i| self.peers[i].status == PeerStatus::Search)
            .collect();
        if searching.len() < 2 {
            return;
        }
        // Candidate sets only depend on who is off, which pairing never changes.
        let mut cands: Vec<Option<Vec<PeerId>>> = vec![None; self.peers.len()];
        for &i in &searching {
            let service = self.peers[i].current_service.expect("searching peer has a service");
            let mut out = Vec::new();
            self.candidate_set(PeerId::from_index(i), service, &mut out);
            cands[i] = Some(out);
        }
        searching.shuffle(&mut self.rng.state_machine);
        let mut matched = vec![false; self.peers.len()];
        let mut order_a = Vec::new();
        for &a in &searching {
            let cands_a = cands[a].as_deref().unwrap_or_default();
            if matched[a] || cands_a.is_empty() || self.has_available(cands_a) {
                continue;
            }
            let a_id = PeerId::from_index(a);
            order_a.clear();
            order_a.extend_from_slice(cands_a);
            order_a.shuffle(&mut self.rng.state_machine);
            for &b_id in &order_a {
                let b = b_id.index();
                if matched[b] || self.peers[b].status != PeerStatus::Search {
                    continue;
                }
                let cands_b = cands[b].as_deref().unwrap_or_default();
                if cands_b.binary_search(&a_id).is_err() || self.has_available(cands_b) {
                    continue;
                }
                let (server, requester) = resolve_conflict(&self.peers[a], &self.peers[b]);
                let mut ev = self.peers[server.index()].enter_serve(requester);
                ev.events.push(Event::ConflictResolved);
                events.push(ev.events);
                self.peers[requester.index()].enter_request(server);
                matched[a] = true;
                matched[b] = true;
                break;
            }
        }
    }

    fn step_peer(&mut self, i: usize) -> Events {
        let minute = self.minute_of_day();
        let cooperative = self.cfg.strategy.is_cooperative();
        let mut ev = Events::default();
        match self.peers[i].status {
            PeerStatus::Off => {
                self.peers[i].step_off(minute);
            }
            PeerStatus::Idle => {
                if self.peers[i].step_idle(minute).new_status == PeerStatus::Assign {
                    ev.merge(
                        self.peers[i]
                            .assign_service(&mut self.rng.state_machine)
                            .events,
                    );
                }
            }
            PeerStatus::Assign => {
                ev.merge(
                    self.peers[i]
                        .assign_service(&mut self.rng.state_machine)
                        .events,
                );
            }
            PeerStatus::Search => {
                let id = PeerId::from_index(i);
                let service = self.peers[i]
                    .current_service
                    .expect("searching peer has a service");
                // A uniform pick equals the head of a uniformly shuffled list,
                // without paying for the shuffle on whole-space tiers.
                let mut cands = std::mem::take(&mut self.scratch);
                self.candidate_set(id, service, &mut cands);
                let out = if cooperative {
                    let peers = &self.peers;
                    let available = |c: &&PeerId| peers[c.index()].status.can_reply(true);
                    let n = cands.iter().filter(available).count();
                    let view: Vec<(PeerId, PeerStatus)> = if n > 0 {
                        let k = self.rng.state_machine.gen_range(0..n);
                        let c = *cands.iter().filter(available).nth(k).expect("k < n");
                        vec![(c, peers[c.index()].status)]
                    } else {
                        cands.iter().take(1).map(|&c| (c, peers[c.index()].status)).collect()
                    };
                    self.peers[i].search_cooperative(&view)
                } else if cands.is_empty() {
                    self.peers[i].search_competitive(&[])
                } else {
                    let c = cands[self.rng.state_machine.gen_range(0..cands.len())];
                    self.peers[i].search_competitive(&[c])
                };
                self.scratch = cands;
                ev.merge(out.events);
            }
            PeerStatus::Request => {
                let id = PeerId::from_index(i);
                let view = self.peers[i].partner.and_then(|p| {
                    let partner = self.peers.get(p.index())?;
                    Some(PartnerView {
                        status: partner.status,
                        consistency: partner.params.consistency,
                        granted_this_tick: self.granted[p.index()],
                        reachable: self.hood.reachable(id, p, &self.long_links),
                    })
                });
                let partner = self.peers[i].partner;
                let out = self.peers[i].step_request(
                    view,
                    cooperative,
                    &self.cfg.services,
                    &mut self.rng.state_machine,
                );
                if out.events.contains(Event::ScuGranted) {
                    if let Some(p) = partner {
                        self.granted[p.index()] = true;
                    }
                }
                ev.merge(out.events);
                if out.new_status == PeerStatus::Proceed {
                    self.peers[i].step_proceed(minute);
                }
            }
            PeerStatus::Proceed => {
                self.peers[i].step_proceed(minute);
            }
            PeerStatus::Serve => {
                self.peers[i].step_serve();
            }
        }
        ev
    }

    pub fn snapshot(&self) -> Vec<SnapshotRow> {
        self.peers
            .iter()
            .zip(&self.positions)
            .map(|(p, pos)| SnapshotRow {
                peer_id: p.id,
                status: p.status.code(),
                x: pos.x,
                y: pos.y,
            })
            .collect()
    }

    pub fn into_result(self) -> RunResult {
        RunResult {
            seed: self.cfg.seed,
            final_social_sizes: self.social.iter().map(SocialTables::sizes).collect(),
            daily: self.metrics.into_days(),
        }
    }
}

pub fn write_snapshot_csv<W: Write>(
    iteration: u64,
    rows: &[SnapshotRow],
    mut out: W,
) -> io::Result<()> {
    writeln!(out, "iteration,peer_id,status,x,y")?;
    for r in rows {
        writeln!(
            out,
            "{iteration},{},{},{},{}",
            r.peer_id, r.status, r.x, r.y
        )?;
    }
    Ok(())
}

pub fn write_positions_rows<W: Write>(
    iteration: u64,
    positions: &[Position],
    mut out: W,
) -> io::Result<()> {
    for (i, p) in positions.iter().enumerate() {
        writeln!(out, "{iteration},{i},{},{}", p.x, p.y)?;
    }
    Ok(())
}

/// Runs one replicate of `cfg` under `replicate_seed`.
pub fn run(cfg: &SimulationConfig, replicate_seed: u64) -> Result<RunResult, ConfigError> {
    run_observed(cfg, replicate_seed, |_| {})
}

/// Like [`run`], calling `observe` on the initial world and after every step.
pub fn run_observed<F: FnMut(&World)>(
    cfg: &SimulationConfig,
    replicate_seed: u64,
    mut observe: F,
) -> Result<RunResult, ConfigError> {
    let cfg = SimulationConfig {
        seed: replicate_seed,
        ..cfg.clone()
    };
    let mut world = init_world(&cfg)?;
    observe(&world);
    while !world.is_finished() {
        world.step();
        observe(&world);
    }
    Ok(world.into_result())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Serial,
    /// Replicates spread over a rayon pool; `None` uses the global pool.
    Parallel {
        workers: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchResult {
    pub runs: Vec<RunResult>,
    pub aggregate: BatchAggregate,
}

pub fn replicate_seed(base: u64, i: usize) -> u64 {
    base.wrapping_add(i as u64)
}

/// Runs `n_runs` replicates (seed `cfg.seed + i`) and averages them per day.
/// Results are ordered by replicate index whatever the execution mode.
pub fn run_batch(
    cfg: &SimulationConfig,
    n_runs: usize,
    exec: Execution,
) -> Result<BatchResult, ConfigError> {
    if n_runs == 0 {
        return Err(ConfigError::Invalid(vec![Violation::new(
            "runs",
            "runs must be at least 1",
        )]));
    }
    cfg.validate()?;
    let one = |i: usize| run(cfg, replicate_seed(cfg.seed, i));
    let runs: Result<Vec<_>, _> = match exec {
        Execution::Serial => (0..n_runs).map(one).collect(),
        Execution::Parallel { workers: None } => (0..n_runs).into_par_iter().map(one).collect(),
        Execution::Parallel { workers: Some(w) } => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .expect("rayon pool");
            pool.install(|| (0..n_runs).into_par_iter().map(one).collect())
        }
    };
    let runs = runs?;
    let aggregate = aggregate_batch(&runs).expect("non-empty batch of equal horizons");
    Ok(BatchResult { runs, aggregate })
}
