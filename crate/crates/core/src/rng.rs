//! Seed handling. Every random stream is a `Xoshiro256PlusPlus` seeded from an
//! explicit 64-bit value; derived seeds go through the SplitMix64 finalizer.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

pub type Rng = Xoshiro256PlusPlus;

/// SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Combine a base seed with a label (trajectory id, stream id, size, ...).
pub fn derive_seed(base: u64, label: u64) -> u64 {
    splitmix64(splitmix64(base) ^ label.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

pub fn trajectory_seed(base_seed: u64, trajectory_id: u64) -> u64 {
    derive_seed(base_seed, trajectory_id)
}

pub fn rng_from_seed(seed: u64) -> Rng {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

/// Independent named sub-streams of one trajectory seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Parameters = 1,
    Sampling = 2,
    InitialState = 3,
    Annealing = 4,
}

pub fn stream(seed: u64, which: Stream) -> Rng {
    rng_from_seed(derive_seed(seed, which as u64))
}
