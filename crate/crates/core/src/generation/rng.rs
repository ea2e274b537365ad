//! Per-parameter random streams.
//!
//! Each stream is a ChaCha8 generator keyed by SHA-256 over
//! `"docfuzz-rng-v1" || seed || api || case_index || param`, with integers
//! little-endian and strings length-prefixed (u64 LE). Streams are therefore
//! independent of platform, of thread scheduling and of the other
//! parameters of the API: adding a parameter never shifts another's values.
//! The case-level stream (adversarial choice, value strategy) uses the
//! empty parameter name.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub const RNG_DOMAIN: &[u8] = b"docfuzz-rng-v1";

pub fn stream_key(seed: u64, api: &str, case_index: u64, param: &str) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(RNG_DOMAIN);
    h.update(seed.to_le_bytes());
    h.update((api.len() as u64).to_le_bytes());
    h.update(api.as_bytes());
    h.update(case_index.to_le_bytes());
    h.update((param.len() as u64).to_le_bytes());
    h.update(param.as_bytes());
    h.finalize().into()
}

pub fn stream(seed: u64, api: &str, case_index: u64, param: &str) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(stream_key(seed, api, case_index, param))
}

/// The stream driving case-level decisions.
pub fn case_stream_rng(seed: u64, api: &str, case_index: u64) -> ChaCha8Rng {
    stream(seed, api, case_index, "")
}
