//! Reproducible random streams.
//!
//! Every sampler takes an explicit 64-bit seed. The stream behind a seed is
//! ChaCha20 (`rand_chacha::ChaCha20Rng::seed_from_u64`), and standard normals
//! are drawn with `rand_distr::StandardNormal`. Child seeds for replicates are
//! derived with the SplitMix64 finaliser: `child = splitmix64(parent ^ splitmix64(index))`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::scalar::Real;

/// Generator used throughout the crate.
pub type StreamRng = ChaCha20Rng;

pub fn stream(seed: u64) -> StreamRng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// SplitMix64 output function.
#[inline]
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent child seed from `parent` and a stream index.
#[inline]
pub fn derive_seed(parent: u64, index: u64) -> u64 {
    splitmix64(parent ^ splitmix64(index))
}

/// Fills `out` with i.i.d. standard normal draws.
pub fn fill_standard_normal<T: Real, R: Rng + ?Sized>(rng: &mut R, out: &mut [T]) {
    for v in out.iter_mut() {
        let z: f64 = rng.sample(StandardNormal);
        *v = T::lit(z);
    }
}
