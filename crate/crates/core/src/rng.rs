//! Named random streams derived from a scenario seed.
//!
//! Every consumer draws from its own stream, keyed by `(seed, stream, step)`,
//! so turning one consumer on or off never shifts the numbers another sees.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stream {
    Detector,
    Scorer,
    RandomWalk,
    Planner,
    Generator,
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::Detector => 0x6465_7465_6374,
            Stream::Scorer => 0x7363_6f72_6572,
            Stream::RandomWalk => 0x7261_6e64_776b,
            Stream::Planner => 0x706c_616e_6e72,
            Stream::Generator => 0x6765_6e65_7261,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic generator for one consumer at one step.
pub fn stream(seed: u64, which: Stream, step: u64) -> ChaCha8Rng {
    let a = splitmix64(seed ^ splitmix64(which.tag()));
    let b = splitmix64(a ^ step.wrapping_mul(0xD1B5_4A32_D192_ED03));
    ChaCha8Rng::seed_from_u64(b)
}
