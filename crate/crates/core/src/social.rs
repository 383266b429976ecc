//! Per-peer encounter, contact and friend tables.
//!
//! Encounters are counted every tick; contacts and friends are grown at
//! consolidation ticks by uniform random promotion, bounded by `k` and `m`.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::topology::PeerId;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SocialTables {
    owner: PeerId,
    // Dense encounter counts indexed by peer id; 0 means never met.
    encounters: Vec<u32>,
    // Encounters credited to every other peer at once (whole-space neighbourhoods).
    everyone: u32,
    distinct: usize,
    contacts: BTreeMap<PeerId, u64>,
    friends: BTreeMap<PeerId, u64>,
    // Dense mirror of `friends` for constant-time membership tests.
    is_friend: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SocialSizes {
    pub n_neighbors: usize,
    pub n_contacts: usize,
    pub n_friends: usize,
}

/// `floor(fraction * len)`, tolerant of representation error in `fraction`.
pub fn bounded_target(fraction: f64, len: usize) -> usize {
    (fraction * len as f64 + 1e-9).floor() as usize
}

impl SocialTables {
    pub fn new(owner: PeerId, population: usize) -> Self {
        Self {
            owner,
            encounters: vec![0; population],
            everyone: 0,
            distinct: 0,
            contacts: BTreeMap::new(),
            friends: BTreeMap::new(),
            is_friend: vec![false; population],
        }
    }

    pub fn owner(&self) -> PeerId {
        self.owner
    }

    /// Bumps the encounter count of every id in `current` (the owner is skipped).
    pub fn record_encounters(&mut self, current: &[PeerId]) {
        for &p in current {
            if p == self.owner {
                continue;
            }
            let slot = &mut self.encounters[p.index()];
            if *slot == 0 && self.everyone == 0 {
                self.distinct += 1;
            }
            *slot += 1;
        }
    }

    /// Records one encounter with every other peer.
    pub fn record_encounter_with_all(&mut self) {
        self.everyone += 1;
        self.distinct = self.encounters.len().saturating_sub(1);
    }

    pub fn repeated_encounters(&self, peer: PeerId) -> Option<u32> {
        if peer == self.owner {
            return None;
        }
        let c = self.encounters.get(peer.index())? + self.everyone;
        (c > 0).then_some(c)
    }

    pub fn neighbor_count(&self) -> usize {
        self.distinct
    }

    /// `myneighbors` keys in ascending id order.
    pub fn neighbors(&self) -> impl Iterator<Item = (PeerId, u32)> + '_ {
        self.encounters
            .iter()
            .enumerate()
            .filter_map(move |(i, &c)| {
                let id = PeerId::from_index(i);
                let c = c + self.everyone;
                (id != self.owner && c > 0).then_some((id, c))
            })
    }

    pub fn contacts(&self) -> &BTreeMap<PeerId, u64> {
        &self.contacts
    }

    pub fn friends(&self) -> &BTreeMap<PeerId, u64> {
        &self.friends
    }

    pub fn is_friend(&self, peer: PeerId) -> bool {
        self.is_friend.get(peer.index()).copied().unwrap_or(false)
    }

    pub fn sizes(&self) -> SocialSizes {
        SocialSizes {
            n_neighbors: self.neighbor_count(),
            n_contacts: self.contacts.len(),
            n_friends: self.friends.len(),
        }
    }

    /// Grows `mycontacts` to `floor(k * |myneighbors|)` with uniformly drawn
    /// neighbours. Never removes entries.
    pub fn consolidate_contacts<R: Rng + ?Sized>(&mut self, k: f64, iteration: u64, rng: &mut R) {
        let target = bounded_target(k, self.neighbor_count());
        if self.contacts.len() >= target {
            return;
        }
        let mut pool: Vec<PeerId> = self
            .neighbors()
            .map(|(id, _)| id)
            .filter(|id| !self.contacts.contains_key(id))
            .collect();
        promote(
            &mut pool,
            target - self.contacts.len(),
            &mut self.contacts,
            iteration,
            rng,
        );
    }

    /// Grows `myfriends` to `floor(m * |mycontacts|)` from contacts.
    pub fn consolidate_friends<R: Rng + ?Sized>(&mut self, m: f64, iteration: u64, rng: &mut R) {
        let target = bounded_target(m, self.contacts.len());
        if self.friends.len() >= target {
            return;
        }
        let mut pool: Vec<PeerId> = self
            .contacts
            .keys()
            .copied()
            .filter(|id| !self.friends.contains_key(id))
            .collect();
        promote(
            &mut pool,
            target - self.friends.len(),
            &mut self.friends,
            iteration,
            rng,
        );
        for id in self.friends.keys() {
            self.is_friend[id.index()] = true;
        }
    }

    /// Contacts first, then friends from the freshly grown contacts.
    pub fn consolidate<R: Rng + ?Sized>(&mut self, k: f64, m: f64, iteration: u64, rng: &mut R) {
        self.consolidate_contacts(k, iteration, rng);
        self.consolidate_friends(m, iteration, rng);
    }
}

fn promote<R: Rng + ?Sized>(
    pool: &mut [PeerId],
    count: usize,
    into: &mut BTreeMap<PeerId, u64>,
    iteration: u64,
    rng: &mut R,
) {
    let count = count.min(pool.len());
    let (chosen, _) = pool.partial_shuffle(rng, count);
    for &id in chosen.iter() {
        into.insert(id, iteration);
    }
}

/// Keeps only candidates present in `myfriends`, preserving their order.
pub fn filter_providers_by_friends(candidates: &[PeerId], tables: &SocialTables) -> Vec<PeerId> {
    candidates
        .iter()
        .copied()
        .filter(|&c| tables.is_friend(c))
        .collect()
}
