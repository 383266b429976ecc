//! The seven-status peer lifecycle.
//!
//! Transitions that need the rest of the world (provider search, replies,
//! conflict pairing) take a pre-computed view of it, so every rule here can
//! be exercised on a lone [`Peer`].

use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::config::{PeerParams, ProviderMemory, ServiceCatalog, ServiceId};
use crate::topology::PeerId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[repr(u8)]
pub enum PeerStatus {
    Off = 0,
    Idle = 1,
    Assign = 2,
    Search = 3,
    Request = 4,
    Proceed = 5,
    Serve = 6,
}

impl PeerStatus {
    pub const ALL: [PeerStatus; 7] = [
        PeerStatus::Off,
        PeerStatus::Idle,
        PeerStatus::Assign,
        PeerStatus::Search,
        PeerStatus::Request,
        PeerStatus::Proceed,
        PeerStatus::Serve,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn name(self) -> &'static str {
        match self {
            PeerStatus::Off => "off",
            PeerStatus::Idle => "idle",
            PeerStatus::Assign => "assign",
            PeerStatus::Search => "search",
            PeerStatus::Request => "request",
            PeerStatus::Proceed => "proceed",
            PeerStatus::Serve => "serve",
        }
    }

    /// Statuses a requester may draw service from under the given strategy family.
    pub fn can_reply(self, cooperative: bool) -> bool {
        match self {
            PeerStatus::Idle => true,
            PeerStatus::Serve => cooperative,
            _ => false,
        }
    }
}

impl fmt::Display for PeerStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Small bit set over the five service ids.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct ServiceSet(u8);

impl ServiceSet {
    pub const EMPTY: ServiceSet = ServiceSet(0);

    pub fn contains(self, s: ServiceId) -> bool {
        self.0 & (1 << s.get()) != 0
    }

    pub fn insert(&mut self, s: ServiceId) {
        self.0 |= 1 << s.get();
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = ServiceId> {
        (0..ServiceId::COUNT as u8)
            .filter(move |b| self.0 & (1 << b) != 0)
            .map(|b| ServiceId::new(b).unwrap())
    }
}

impl FromIterator<ServiceId> for ServiceSet {
    fn from_iter<I: IntoIterator<Item = ServiceId>>(iter: I) -> Self {
        let mut s = ServiceSet::EMPTY;
        for id in iter {
            s.insert(id);
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Event {
    RequestGenerated,
    RequestNotServed,
    ScuGranted,
    ServiceCompleted,
    ServeStarted,
    ConflictResolved,
}

impl Event {
    pub const ALL: [Event; 6] = [
        Event::RequestGenerated,
        Event::RequestNotServed,
        Event::ScuGranted,
        Event::ServiceCompleted,
        Event::ServeStarted,
        Event::ConflictResolved,
    ];
}

/// Events emitted by one transition; each kind occurs at most once.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Events(u8);

impl Events {
    pub fn push(&mut self, e: Event) {
        self.0 |= 1 << e as u8;
    }

    pub fn contains(self, e: Event) -> bool {
        self.0 & (1 << e as u8) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn merge(&mut self, other: Events) {
        self.0 |= other.0;
    }

    pub fn iter(self) -> impl Iterator<Item = Event> {
        Event::ALL.into_iter().filter(move |&e| self.contains(e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransitionOutcome {
    pub new_status: PeerStatus,
    pub events: Events,
}

/// What a requester can observe about its chosen partner this tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartnerView {
    pub status: PeerStatus,
    pub consistency: f64,
    /// The partner already granted a unit to someone this tick.
    pub granted_this_tick: bool,
    /// The partner is still within the requester's communication neighbourhood.
    pub reachable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Peer {
    pub id: PeerId,
    pub status: PeerStatus,
    /// Duration in current status.
    pub dics: u64,
    pub params: PeerParams,
    pub current_service: Option<ServiceId>,
    pub units_completed: u32,
    /// Services this peer can provide from the moment it joins each day.
    #[serde(skip)]
    pub innate: ServiceSet,
    /// Lifetime completions; informational only.
    #[serde(skip)]
    pub services_completed: ServiceSet,
    /// Provider eligibility, reset at every daily wake-up.
    #[serde(skip)]
    pub recent_services_completed: ServiceSet,
    pub partner: Option<PeerId>,
    pub serve_remaining: u32,
    pub idle_remaining: u32,
    #[serde(skip)]
    changed_this_tick: bool,
}

impl Peer {
    pub fn new(id: PeerId, params: PeerParams, innate: ServiceSet) -> Self {
        Self {
            id,
            status: PeerStatus::Off,
            dics: 0,
            params,
            current_service: None,
            units_completed: 0,
            innate,
            services_completed: innate,
            recent_services_completed: innate,
            partner: None,
            serve_remaining: 0,
            idle_remaining: 0,
            changed_this_tick: false,
        }
    }

    /// Marks the start of an iteration for DICS accounting.
    pub fn begin_tick(&mut self) {
        self.changed_this_tick = false;
    }

    pub fn changed_this_tick(&self) -> bool {
        self.changed_this_tick
    }

    fn set_status(&mut self, s: PeerStatus) {
        if s != self.status {
            self.status = s;
            self.dics = 0;
            self.changed_this_tick = true;
        }
    }

    fn settle(&mut self) -> TransitionOutcome {
        if !self.changed_this_tick {
            self.dics += 1;
        }
        self.outcome(Events::default())
    }

    fn outcome(&self, events: Events) -> TransitionOutcome {
        TransitionOutcome {
            new_status: self.status,
            events,
        }
    }

    /// Whether this peer can currently be offered as a provider of `s`.
    ///
    /// Daily memory offers only online peers that completed `s` since waking
    /// (or hold it innately); lifetime memory offers any peer that ever
    /// completed it, whatever its status. Off peers never reply either way.
    pub fn provides(&self, s: ServiceId, memory: ProviderMemory) -> bool {
        match memory {
            ProviderMemory::Daily => {
                self.status != PeerStatus::Off && self.recent_services_completed.contains(s)
            }
            ProviderMemory::Lifetime => self.services_completed.contains(s),
        }
    }

    /// The services this peer is offered for, as a set (see [`Peer::provides`]).
    pub fn offered(&self, memory: ProviderMemory) -> ServiceSet {
        match memory {
            ProviderMemory::Daily if self.status == PeerStatus::Off => ServiceSet::EMPTY,
            ProviderMemory::Daily => self.recent_services_completed,
            ProviderMemory::Lifetime => self.services_completed,
        }
    }

    fn enter_idle(&mut self) {
        self.set_status(PeerStatus::Idle);
        self.idle_remaining = self.params.idle_time;
        self.partner = None;
        self.current_service = None;
        self.units_completed = 0;
        self.serve_remaining = 0;
    }

    /// Off: join at `up_time`, starting the day with only the innate services.
    pub fn step_off(&mut self, minute_of_day: u32) -> TransitionOutcome {
        debug_assert_eq!(self.status, PeerStatus::Off);
        if minute_of_day == self.params.up_time {
            self.recent_services_completed = self.innate;
            self.enter_idle();
            self.outcome(Events::default())
        } else {
            self.settle()
        }
    }

    /// Idle: count down; on expiry leave the network if past `down_time`,
    /// otherwise move to assign.
    pub fn step_idle(&mut self, minute_of_day: u32) -> TransitionOutcome {
        debug_assert_eq!(self.status, PeerStatus::Idle);
        self.idle_remaining = self.idle_remaining.saturating_sub(1);
        if self.idle_remaining > 0 {
            return self.settle();
        }
        if self.params.is_on_window(minute_of_day) {
            self.set_status(PeerStatus::Assign);
        } else {
            self.set_status(PeerStatus::Off);
        }
        self.outcome(Events::default())
    }

    /// Assign (transit): draw a requestable service and start searching.
    pub fn assign_service<R: Rng + ?Sized>(&mut self, rng: &mut R) -> TransitionOutcome {
        debug_assert_eq!(self.status, PeerStatus::Assign);
        let s = ServiceId::REQUESTABLE[rng.gen_range(0..ServiceId::REQUESTABLE.len())];
        self.current_service = Some(s);
        self.units_completed = 0;
        self.set_status(PeerStatus::Search);
        let mut ev = Events::default();
        ev.push(Event::RequestGenerated);
        self.outcome(ev)
    }

    /// Competitive search: take the first (already shuffled) candidate, busy or not.
    pub fn search_competitive(&mut self, candidates: &[PeerId]) -> TransitionOutcome {
        debug_assert_eq!(self.status, PeerStatus::Search);
        match candidates.first() {
            Some(&p) => {
                self.partner = Some(p);
                self.set_status(PeerStatus::Request);
                self.outcome(Events::default())
            }
            None => {
                let mut out = self.settle();
                out.events.push(Event::RequestNotServed);
                out
            }
        }
    }

    /// Cooperative search: only idle or serving candidates are requested.
    /// With no candidate at all the tick counts as not served; with only busy
    /// candidates the peer keeps waiting.
    pub fn search_cooperative(&mut self, candidates: &[(PeerId, PeerStatus)]) -> TransitionOutcome {
        debug_assert_eq!(self.status, PeerStatus::Search);
        if let Some(&(p, _)) = candidates.iter().find(|(_, st)| st.can_reply(true)) {
            self.partner = Some(p);
            self.set_status(PeerStatus::Request);
            return self.outcome(Events::default());
        }
        let mut out = self.settle();
        if candidates.is_empty() {
            out.events.push(Event::RequestNotServed);
        }
        out
    }

    /// Request: one unit per reply; completion moves to proceed, silence back to search.
    pub fn step_request<R: Rng + ?Sized>(
        &mut self,
        partner: Option<PartnerView>,
        cooperative: bool,
        catalog: &ServiceCatalog,
        rng: &mut R,
    ) -> TransitionOutcome {
        debug_assert_eq!(self.status, PeerStatus::Request);
        let replied = partner.is_some_and(|p| {
            p.reachable
                && !p.granted_this_tick
                && p.status.can_reply(cooperative)
                && rng.gen_bool(p.consistency.clamp(0.0, 1.0))
        });
        if !replied {
            self.partner = None;
            self.set_status(PeerStatus::Search);
            return self.outcome(Events::default());
        }
        let mut ev = Events::default();
        ev.push(Event::ScuGranted);
        let service = self.current_service.expect("requesting peer has a service");
        self.units_completed += 1;
        if self.units_completed >= catalog.scu_of(service) {
            self.services_completed.insert(service);
            self.recent_services_completed.insert(service);
            self.set_status(PeerStatus::Proceed);
            ev.push(Event::ServiceCompleted);
            return self.outcome(ev);
        }
        let mut out = self.settle();
        out.events = ev;
        out
    }

    /// Proceed (transit): clear the finished service, then go idle or off.
    pub fn step_proceed(&mut self, minute_of_day: u32) -> TransitionOutcome {
        debug_assert_eq!(self.status, PeerStatus::Proceed);
        if self.params.is_on_window(minute_of_day) {
            self.enter_idle();
        } else {
            self.power_down();
        }
        self.outcome(Events::default())
    }

    fn power_down(&mut self) {
        self.partner = None;
        self.current_service = None;
        self.units_completed = 0;
        self.set_status(PeerStatus::Off);
    }

    /// A searching or requesting peer outside its on-window drops the
    /// unfinished service and goes off. Returns whether it did.
    pub fn drop_out_if_down(&mut self, minute_of_day: u32) -> bool {
        let active = matches!(self.status, PeerStatus::Search | PeerStatus::Request);
        if !active || self.params.is_on_window(minute_of_day) {
            return false;
        }
        self.power_down();
        true
    }

    /// Enter the serve state for `requester`, abandoning the own search.
    /// A zero-length window returns straight to idle.
    pub fn enter_serve(&mut self, requester: PeerId) -> TransitionOutcome {
        let window = self.params.serve_window();
        let mut ev = Events::default();
        ev.push(Event::ServeStarted);
        if window == 0 {
            self.enter_idle();
            return self.outcome(ev);
        }
        self.set_status(PeerStatus::Serve);
        self.partner = Some(requester);
        self.current_service = Some(ServiceId::SERVE);
        self.units_completed = 0;
        self.serve_remaining = window;
        self.outcome(ev)
    }

    /// Switch to request against an already chosen server.
    pub fn enter_request(&mut self, server: PeerId) -> TransitionOutcome {
        self.partner = Some(server);
        self.set_status(PeerStatus::Request);
        self.outcome(Events::default())
    }

    /// Serve: count down the window, then go idle.
    pub fn step_serve(&mut self) -> TransitionOutcome {
        debug_assert_eq!(self.status, PeerStatus::Serve);
        self.serve_remaining = self.serve_remaining.saturating_sub(1);
        if self.serve_remaining == 0 {
            self.enter_idle();
            self.outcome(Events::default())
        } else {
            self.settle()
        }
    }
}

/// Decides which of two mutually searching peers serves: the one with the
/// strictly larger DICS; on a tie, the lower id. Returns `(server, requester)`.
pub fn resolve_conflict(a: &Peer, b: &Peer) -> (PeerId, PeerId) {
    let a_serves = match a.dics.cmp(&b.dics) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => a.id < b.id,
    };
    if a_serves {
        (a.id, b.id)
    } else {
        (b.id, a.id)
    }
}
