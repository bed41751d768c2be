//! Seeded, splittable random streams.
//!
//! Every sampling routine in the crate takes a `&mut R: Rng`. Callers that
//! need reproducible parallel work derive one [`RngState`] per worker with
//! [`RngState::split`] and materialize it with [`RngState::rng`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub type StreamRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngState {
    pub seed: u64,
    pub stream: u64,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        Self { seed, stream: 0 }
    }

    /// Child stream `index` of this state. Children of distinct indices, and
    /// of distinct parents, land on distinct ChaCha streams.
    pub fn split(&self, index: u64) -> Self {
        Self {
            seed: self.seed,
            stream: splitmix64(self.stream ^ splitmix64(index.wrapping_add(0x9e37_79b9_7f4a_7c15))),
        }
    }

    pub fn rng(&self) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_state_same_stream() {
        let a: Vec<u64> = (0..8).map(|_| 0).scan(RngState::new(7).rng(), |r, _: u64| Some(r.gen())).collect();
        let b: Vec<u64> = (0..8).map(|_| 0).scan(RngState::new(7).rng(), |r, _: u64| Some(r.gen())).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn split_streams_differ() {
        let root = RngState::new(7);
        let x: u64 = root.split(0).rng().gen();
        let y: u64 = root.split(1).rng().gen();
        let z: u64 = root.rng().gen();
        assert_ne!(x, y);
        assert_ne!(x, z);
        assert_eq!(root.split(3), root.split(3));
    }
}
