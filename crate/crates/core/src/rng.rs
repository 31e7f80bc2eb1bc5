//! Seed splitting. Every consumer of randomness derives its own stream from
//! the master seed and a stream name, so streams are independent of each
//! other and of the order in which modules draw from them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type StreamRng = ChaCha8Rng;

/// Derives a 32-byte seed from `(master, name)`.
pub fn derive_seed(master: u64, name: &str) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update((name.len() as u64).to_le_bytes());
    h.update(name.as_bytes());
    h.finalize().into()
}

pub fn stream(master: u64, name: &str) -> StreamRng {
    ChaCha8Rng::from_seed(derive_seed(master, name))
}

/// Stream for the `index`-th independent worker of a named stream.
pub fn substream(master: u64, name: &str, index: u64) -> StreamRng {
    stream(master, &format!("{name}#{index}"))
}
