//! Torus geometry, radius neighbourhoods, small-world long links and
//! locality-first provider search.

use std::fmt;
use std::io::{self, Write};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::config::Network;
use crate::error::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct PeerId(pub u32);

impl PeerId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_index(i: usize) -> Self {
        PeerId(i as u32)
    }
}

impl fmt::Display for PeerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Continuous `[0, width) x [0, height)` world with wrap-around edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Torus {
    pub width: f64,
    pub height: f64,
}

fn wrap_axis(v: f64, len: f64) -> f64 {
    let w = v.rem_euclid(len);
    // rem_euclid can round up to `len` for tiny negative inputs.
    if w >= len {
        0.0
    } else {
        w
    }
}

fn axis_delta(from: f64, to: f64, len: f64) -> f64 {
    let mut d = to - from;
    let half = len / 2.0;
    if d > half {
        d -= len;
    } else if d < -half {
        d += len;
    }
    d
}

impl Torus {
    pub const fn new(width: f64, height: f64) -> Self {
        Self { width, height }
    }

    pub fn wrap(&self, p: Position) -> Position {
        Position::new(wrap_axis(p.x, self.width), wrap_axis(p.y, self.height))
    }

    pub fn contains(&self, p: Position) -> bool {
        (0.0..self.width).contains(&p.x) && (0.0..self.height).contains(&p.y)
    }

    /// Shortest displacement vector from `a` to `b` across the wrap.
    pub fn delta(&self, a: Position, b: Position) -> (f64, f64) {
        (
            axis_delta(a.x, b.x, self.width),
            axis_delta(a.y, b.y, self.height),
        )
    }

    pub fn distance(&self, a: Position, b: Position) -> f64 {
        let (dx, dy) = self.delta(a, b);
        // Deltas are bounded by half the grid, so the plain form cannot overflow.
        (dx * dx + dy * dy).sqrt()
    }

    pub fn random_position<R: Rng + ?Sized>(&self, rng: &mut R) -> Position {
        Position::new(
            rng.gen_range(0.0..self.width),
            rng.gen_range(0.0..self.height),
        )
    }
}

/// Euclidean distance under wrap-around.
pub fn torus_distance(a: Position, b: Position, grid: &Torus) -> f64 {
    grid.distance(a, b)
}

/// Static, symmetric long-distance links of a small-world network.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LongLinkTable {
    links: Vec<Vec<PeerId>>,
    drawn: usize,
}

impl LongLinkTable {
    pub fn empty(population: usize) -> Self {
        Self {
            links: vec![Vec::new(); population],
            drawn: 0,
        }
    }

    pub fn links(&self, peer: PeerId) -> &[PeerId] {
        self.links.get(peer.index()).map_or(&[], Vec::as_slice)
    }

    pub fn is_empty(&self) -> bool {
        self.links.iter().all(Vec::is_empty)
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    /// Number of peers that drew a link of their own (before symmetrising).
    pub fn drawn_count(&self) -> usize {
        self.drawn
    }

    pub fn contains(&self, a: PeerId, b: PeerId) -> bool {
        self.links(a).binary_search(&b).is_ok()
    }

    /// Undirected edges with `a < b`, in ascending order.
    pub fn edges(&self) -> Vec<(PeerId, PeerId)> {
        self.links
            .iter()
            .enumerate()
            .flat_map(|(a, bs)| {
                let a = PeerId::from_index(a);
                bs.iter().filter(move |&&b| a < b).map(move |&b| (a, b))
            })
            .collect()
    }

    /// One `a b` pair per line.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (a, b) in self.edges() {
            writeln!(out, "{a} {b}")?;
        }
        Ok(())
    }
}

/// Each peer, with probability `beta`, links to one uniformly chosen other
/// peer; the result is symmetrised.
pub fn build_long_links<R: Rng + ?Sized>(
    population: usize,
    beta: f64,
    rng: &mut R,
) -> Result<LongLinkTable, ConfigError> {
    if beta > 0.0 && population < 2 {
        return Err(ConfigError::TooFewPeers(population));
    }
    let mut links = vec![Vec::new(); population];
    let mut drawn = 0;
    if beta > 0.0 {
        for i in 0..population {
            if rng.gen_bool(beta.min(1.0)) {
                let mut j = rng.gen_range(0..population - 1);
                if j >= i {
                    j += 1;
                }
                drawn += 1;
                links[i].push(PeerId::from_index(j));
                links[j].push(PeerId::from_index(i));
            }
        }
    }
    for l in &mut links {
        l.sort_unstable();
        l.dedup();
    }
    Ok(LongLinkTable { links, drawn })
}

/// Uniform cell grid over the torus for fixed-radius queries.
#[derive(Debug, Clone)]
pub struct SpatialIndex {
    torus: Torus,
    radius: f64,
    cols: usize,
    rows: usize,
    cell_w: f64,
    cell_h: f64,
    cells: Vec<Vec<u32>>,
}

impl SpatialIndex {
    pub fn new(torus: Torus, radius: f64) -> Self {
        let cols = ((torus.width / radius).floor() as usize).max(1);
        let rows = ((torus.height / radius).floor() as usize).max(1);
        Self {
            torus,
            radius,
            cols,
            rows,
            cell_w: torus.width / cols as f64,
            cell_h: torus.height / rows as f64,
            cells: vec![Vec::new(); cols * rows],
        }
    }

    fn cell_of(&self, p: Position) -> (usize, usize) {
        let c = ((p.x / self.cell_w) as usize).min(self.cols - 1);
        let r = ((p.y / self.cell_h) as usize).min(self.rows - 1);
        (c, r)
    }

    pub fn rebuild(&mut self, positions: &[Position]) {
        for cell in &mut self.cells {
            cell.clear();
        }
        for (i, &p) in positions.iter().enumerate() {
            let (c, r) = self.cell_of(p);
            self.cells[r * self.cols + c].push(i as u32);
        }
    }

    fn offsets(n: usize) -> &'static [isize] {
        match n {
            1 => &[0],
            2 => &[0, 1],
            _ => &[-1, 0, 1],
        }
    }

    /// Ids within `radius` (inclusive) of `positions[peer]`, ascending, excluding `peer`.
    pub fn within_radius(&self, peer: PeerId, positions: &[Position]) -> Vec<PeerId> {
        let mut out = Vec::new();
        self.within_radius_into(peer, positions, &mut out);
        out
    }

    /// Appends the sorted radius neighbourhood of `peer` to `out`.
    pub fn within_radius_into(&self, peer: PeerId, positions: &[Position], out: &mut Vec<PeerId>) {
        let start = out.len();
        let origin = positions[peer.index()];
        let (c0, r0) = self.cell_of(origin);
        for &dr in Self::offsets(self.rows) {
            let r = (r0 as isize + dr).rem_euclid(self.rows as isize) as usize;
            for &dc in Self::offsets(self.cols) {
                let c = (c0 as isize + dc).rem_euclid(self.cols as isize) as usize;
                for &j in &self.cells[r * self.cols + c] {
                    if j as usize != peer.index()
                        && self.torus.distance(origin, positions[j as usize]) <= self.radius
                    {
                        out.push(PeerId(j));
                    }
                }
            }
        }
        out[start..].sort_unstable();
    }
}

/// Per-tick radius neighbourhoods plus the network rule that turns them
/// into communication neighbourhoods.
#[derive(Debug, Clone)]
pub struct Neighborhoods {
    network: Network,
    // Flattened radius lists: peer i owns ids[offsets[i]..offsets[i + 1]].
    offsets: Vec<usize>,
    ids: Vec<PeerId>,
}

/// The first provider tier: everyone (mesh) or an explicit id list.
#[derive(Debug, Clone, Copy)]
pub enum LocalTier<'a> {
    All(usize),
    Listed(&'a [PeerId]),
}

impl Neighborhoods {
    pub fn new(network: Network) -> Self {
        Self {
            network,
            offsets: vec![0],
            ids: Vec::new(),
        }
    }

    pub fn compute(network: Network, index: &mut SpatialIndex, positions: &[Position]) -> Self {
        let mut h = Self::new(network);
        h.update(index, positions);
        h
    }

    /// Recomputes every radius list for the given positions, reusing buffers.
    /// Mesh neighbourhoods never consult them, so they are left empty there.
    pub fn update(&mut self, index: &mut SpatialIndex, positions: &[Position]) {
        self.offsets.clear();
        self.ids.clear();
        self.offsets.push(0);
        if self.network == Network::Mesh {
            self.offsets.resize(positions.len() + 1, 0);
            return;
        }
        index.rebuild(positions);
        for i in 0..positions.len() {
            index.within_radius_into(PeerId::from_index(i), positions, &mut self.ids);
            self.offsets.push(self.ids.len());
        }
    }

    pub fn network(&self) -> Network {
        self.network
    }

    pub fn population(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Peers physically within radius (always empty for mesh).
    pub fn within_radius(&self, peer: PeerId) -> &[PeerId] {
        let i = peer.index();
        &self.ids[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn local_tier(&self, peer: PeerId) -> LocalTier<'_> {
        match self.network {
            Network::Mesh => LocalTier::All(self.population()),
            Network::Regular | Network::SmallWorld => LocalTier::Listed(self.within_radius(peer)),
        }
    }

    /// Full communication neighbourhood, ascending, never containing `peer`.
    pub fn neighbors_of(&self, peer: PeerId, long_links: &LongLinkTable) -> Vec<PeerId> {
        match self.network {
            Network::Mesh => (0..self.population())
                .filter(|&j| j != peer.index())
                .map(PeerId::from_index)
                .collect(),
            Network::Regular => self.within_radius(peer).to_vec(),
            Network::SmallWorld => {
                let mut v = self.within_radius(peer).to_vec();
                v.extend_from_slice(long_links.links(peer));
                v.sort_unstable();
                v.dedup();
                v
            }
        }
    }

    /// Whether `b` is currently reachable from `a`.
    pub fn reachable(&self, a: PeerId, b: PeerId, long_links: &LongLinkTable) -> bool {
        if a == b {
            return false;
        }
        match self.network {
            Network::Mesh => true,
            Network::Regular => self.within_radius(a).binary_search(&b).is_ok(),
            Network::SmallWorld => {
                self.within_radius(a).binary_search(&b).is_ok() || long_links.contains(a, b)
            }
        }
    }
}

/// Locality-first provider search.
///
/// Returns the eligible local peers in random order; only when none exists
/// are the eligible long-link peers returned instead.
pub fn candidate_providers<F, R>(
    peer: PeerId,
    local: LocalTier<'_>,
    long_links: &[PeerId],
    eligible: F,
    rng: &mut R,
) -> Vec<PeerId>
where
    F: FnMut(PeerId) -> bool,
    R: Rng + ?Sized,
{
    let mut out = Vec::new();
    candidate_tier_into(peer, local, long_links, eligible, &mut out);
    out.shuffle(rng);
    out
}

/// Unshuffled form of [`candidate_providers`]: the chosen tier in ascending id order.
pub fn candidate_tier_into<F>(
    peer: PeerId,
    local: LocalTier<'_>,
    long_links: &[PeerId],
    mut eligible: F,
    out: &mut Vec<PeerId>,
) where
    F: FnMut(PeerId) -> bool,
{
    out.clear();
    match local {
        LocalTier::All(n) => out.extend(
            (0..n)
                .map(PeerId::from_index)
                .filter(|&j| j != peer && eligible(j)),
        ),
        LocalTier::Listed(ids) => {
            out.extend(ids.iter().copied().filter(|&j| j != peer && eligible(j)))
        }
    }
    if out.is_empty() {
        out.extend(
            long_links
                .iter()
                .copied()
                .filter(|&j| j != peer && eligible(j)),
        );
    }
}
