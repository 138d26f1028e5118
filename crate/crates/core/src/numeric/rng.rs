use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A reproducible random stream identified by `(seed, index)`.
///
/// The generator is ChaCha8 keyed by `seed` with the 64-bit ChaCha stream id
/// set to `index`, so distinct indices never overlap. Shard `k` of a stream
/// uses index `(index << 24) | k`, which keeps shard substreams disjoint for up
/// to 2²⁴ shards and 2⁴⁰ parent indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub index: u64,
}

impl RngStream {
    pub const fn new(seed: u64) -> Self {
        Self { seed, index: 0 }
    }

    pub const fn with_index(seed: u64, index: u64) -> Self {
        Self { seed, index }
    }

    pub fn shard(&self, k: u64) -> Self {
        debug_assert!(k < (1 << 24));
        Self { seed: self.seed, index: (self.index << 24) | k }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.index);
        rng
    }
}
