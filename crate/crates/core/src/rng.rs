use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A ChaCha stream keyed by `(seed, a, b, tag)`; distinct keys give
/// independent streams regardless of call order.
pub(crate) fn keyed_rng(seed: u64, a: u64, b: u64, tag: &[u8; 8]) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&a.to_le_bytes());
    key[16..24].copy_from_slice(&b.to_le_bytes());
    key[24..].copy_from_slice(tag);
    ChaCha8Rng::from_seed(key)
}
