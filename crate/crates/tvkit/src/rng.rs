//! Seeded randomness contract.
//!
//! Every stochastic routine takes an explicit u64 seed and draws from a
//! counter-based ChaCha8 stream, so reports are bit-reproducible across
//! runs and machines. Substreams are derived as (seed, stream index),
//! never by consuming the parent stream.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Root stream for a seed.
pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent substream `index` of `seed` (e.g. per experiment case or
/// per sampler side). The index is folded into the key by splitmix64
/// finalizers rather than the ChaCha stream counter, so substreams of
/// nearby indices share no key structure.
pub fn substream(seed: u64, index: u64) -> Rng {
    let k = mix(seed ^ mix(index.wrapping_add(0x9e37_79b9_7f4a_7c15)));
    ChaCha8Rng::seed_from_u64(k)
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Standard normal draw.
pub fn standard_normal(rng: &mut Rng) -> f64 {
    use rand_distr::Distribution;
    rand_distr::StandardNormal.sample(rng)
}

/// Uniform draw in [0, 1).
pub fn uniform(rng: &mut Rng) -> f64 {
    use rand::Rng as _;
    rng.random::<f64>()
}
