//! Labeled sub-seed derivation so one master seed drives the whole pipeline.

use sha2::{Digest, Sha256};

/// First 8 bytes (little endian) of the SHA-256 digest.
pub fn hash64(bytes: &[u8]) -> u64 {
    let digest = Sha256::digest(bytes);
    u64::from_le_bytes(digest[..8].try_into().unwrap())
}

/// Sub-seed for the component named `label`.
pub fn derive_seed(master: u64, label: &str) -> u64 {
    let mut buf = master.to_le_bytes().to_vec();
    buf.extend_from_slice(label.as_bytes());
    hash64(&buf)
}

pub fn rng(master: u64, label: &str) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(derive_seed(master, label))
}
