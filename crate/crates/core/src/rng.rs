//! Named, independent random substreams.
//!
//! Each stream is a ChaCha8 generator keyed by `sha256(master_seed || name)`,
//! so draws on one stream never perturb another. Operations that need a
//! variable number of underlying draws (binomial, Poisson) take a single
//! `u64` from their stream and sample from a generator forked off it; the
//! stream therefore advances by exactly one word per logical sample.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type StreamRng = ChaCha8Rng;

pub fn stream_from_seed(seed: u64, name: &str) -> StreamRng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(name.as_bytes());
    let digest = hasher.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(key)
}

/// Takes one word from `stream` and returns a generator seeded by it.
pub fn fork(stream: &mut StreamRng) -> StreamRng {
    ChaCha8Rng::seed_from_u64(stream.next_u64())
}

#[derive(Clone, Debug)]
pub struct RngStreams {
    pub traffic: StreamRng,
    pub demand: StreamRng,
    pub leadtime: StreamRng,
    pub news: StreamRng,
    pub reviews: StreamRng,
    pub catalog: StreamRng,
}

impl RngStreams {
    pub const NAMES: [&'static str; 6] = ["traffic", "demand", "leadtime", "news", "reviews", "catalog"];

    pub fn new(master_seed: u64) -> Self {
        Self::with_news_seed(master_seed, master_seed)
    }

    /// The news stream may be keyed by its own seed; every other stream uses
    /// the master seed.
    pub fn with_news_seed(master_seed: u64, news_seed: u64) -> Self {
        RngStreams {
            traffic: stream_from_seed(master_seed, "traffic"),
            demand: stream_from_seed(master_seed, "demand"),
            leadtime: stream_from_seed(master_seed, "leadtime"),
            news: stream_from_seed(news_seed, "news"),
            reviews: stream_from_seed(master_seed, "reviews"),
            catalog: stream_from_seed(master_seed, "catalog"),
        }
    }

    /// Word positions of every stream, in [`RngStreams::NAMES`] order.
    pub fn positions(&self) -> [u128; 6] {
        [
            self.traffic.get_word_pos(),
            self.demand.get_word_pos(),
            self.leadtime.get_word_pos(),
            self.news.get_word_pos(),
            self.reviews.get_word_pos(),
            self.catalog.get_word_pos(),
        ]
    }
}
