//! Splittable seeding.
//!
//! Every random stream used by the harness is derived from a master seed and
//! a path of integers (grid index, trial index, purpose tag). Derivation is a
//! pure function of the path, so the draws of a trial never depend on which
//! other trials ran before it or on which thread ran it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used for every stream in the crate.
pub type StreamRng = ChaCha8Rng;

/// Purpose tags separating the streams belonging to one trial.
pub mod tag {
    pub const NOISE: u64 = 0x6e6f6973;
    pub const ALGORITHM: u64 = 0x616c676f;
    pub const DETECT: u64 = 0x64657463;
    pub const CLASSIFY: u64 = 0x636c6173;
    pub const BASELINE: u64 = 0x62617365;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A node in the seed tree. Children are derived by hashing, never by
/// drawing from a parent generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedPath(u64);

impl SeedPath {
    pub fn root(master_seed: u64) -> Self {
        SeedPath(splitmix64(master_seed))
    }

    pub fn child(self, index: u64) -> Self {
        SeedPath(splitmix64(
            self.0 ^ splitmix64(index.wrapping_add(0x5851_f42d_4c95_7f2d)),
        ))
    }

    pub fn key(self) -> u64 {
        self.0
    }

    pub fn rng(self) -> StreamRng {
        let mut seed = [0u8; 32];
        let mut state = self.0;
        for chunk in seed.chunks_mut(8) {
            state = splitmix64(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        StreamRng::from_seed(seed)
    }
}

/// Stream for `(master_seed, grid, trial, tag)`.
pub fn trial_stream(master_seed: u64, grid: u64, trial: u64, purpose: u64) -> StreamRng {
    SeedPath::root(master_seed)
        .child(grid)
        .child(trial)
        .child(purpose)
        .rng()
}
