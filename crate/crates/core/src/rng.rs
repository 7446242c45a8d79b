//! Labeled RNG substreams.
//!
//! Every stochastic component derives its own stream from
//! `(master seed, component label, index)`. Streams never share mutable
//! state, so adding a component or reordering work cannot perturb the
//! draws of another component.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Derive a child seed for a named component, for passing down to code that
/// builds its own substreams.
pub fn derive_seed(master: u64, label: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    hasher.update([0x2f]);
    hasher.update(label.as_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest is long enough"))
}

/// Derive a deterministic RNG for `(master, label, index)`.
///
/// The seed is a SHA-256 digest, so distinct labels and indices map to
/// independent streams and the mapping is stable across platforms and
/// releases.
pub fn substream(master: u64, label: &str, index: u64) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    hasher.update([0x1f]);
    hasher.update(label.as_bytes());
    hasher.update([0x1f]);
    hasher.update(index.to_le_bytes());
    let digest = hasher.finalize();
    let mut seed = [0u8; 32];
    seed.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(seed)
}
