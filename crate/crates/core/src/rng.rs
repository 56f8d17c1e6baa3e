//! Counter-based splitting of a single experiment seed.
//!
//! Every random consumer derives its generator from the root seed plus a
//! path of stream labels, so parallel tasks draw identical numbers no
//! matter how they are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for the stream at `path` under `seed`.
pub fn stream_rng(seed: u64, path: &[u64]) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stream = path.iter().fold(0x5EED_u64, |acc, &p| splitmix(acc ^ splitmix(p)));
    rng.set_stream(stream);
    rng
}

/// Child seed for the stream at `path`, for APIs that take a plain `u64`.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix(seed), |acc, &p| splitmix(acc ^ splitmix(p)))
}
