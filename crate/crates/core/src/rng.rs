//! Splittable random streams.
//!
//! Every random draw in an experiment comes from a ChaCha8 stream keyed by the
//! root seed and a `(purpose, a, b)` triple, so replays and parallel replicas
//! see identical numbers regardless of evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Identity of the generator, recorded in run summaries.
pub const GENERATOR_ID: &str = "rand_chacha::ChaCha8Rng (rand_chacha 0.9, splitmix64 stream keys)";

/// What a stream is used for; part of the stream key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Purpose {
    Oracle = 1,
    Permutation = 2,
    Sphere = 3,
    Rounding = 4,
    GradientNoise = 5,
    Adversary = 6,
    Sampling = 7,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Root seed wrapper handing out independent streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedTree {
    root: u64,
}

impl SeedTree {
    pub fn new(root: u64) -> Self {
        SeedTree { root }
    }

    pub fn root(&self) -> u64 {
        self.root
    }

    pub fn stream(&self, purpose: Purpose, a: u64, b: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.root);
        let key = splitmix64(splitmix64(splitmix64(purpose as u64) ^ a) ^ b.rotate_left(17));
        rng.set_stream(key);
        rng
    }

    /// Derived tree for a sub-experiment (e.g. one adversary).
    pub fn child(&self, salt: u64) -> SeedTree {
        SeedTree::new(splitmix64(self.root ^ splitmix64(salt)))
    }
}
