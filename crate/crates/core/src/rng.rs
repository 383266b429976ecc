//! Named, independent randomness sub-streams.
//!
//! Each concern draws from its own ChaCha stream keyed by the replicate seed
//! and a fixed stream id, so extra draws in one concern never shift another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stream {
    Placement = 1,
    Params = 2,
    LongLinks = 3,
    Mobility = 4,
    StateMachine = 5,
    Social = 6,
}

pub fn stream(seed: u64, which: Stream) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(which as u64);
    rng
}

#[derive(Debug, Clone)]
pub struct Streams {
    pub placement: SimRng,
    pub params: SimRng,
    pub long_links: SimRng,
    pub mobility: SimRng,
    pub state_machine: SimRng,
    pub social: SimRng,
}

impl Streams {
    pub fn new(seed: u64) -> Self {
        Self {
            placement: stream(seed, Stream::Placement),
            params: stream(seed, Stream::Params),
            long_links: stream(seed, Stream::LongLinks),
            mobility: stream(seed, Stream::Mobility),
            state_machine: stream(seed, Stream::StateMachine),
            social: stream(seed, Stream::Social),
        }
    }
}
