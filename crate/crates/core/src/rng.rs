//! Counter-based RNG substreams.
//!
//! Every random quantity in a simulation is drawn from a stream identified by
//! the master seed plus a short path of counters (round, device, purpose, ...).
//! Streams are derived by hashing the path, so results do not depend on the
//! order in which work items run or on how many threads execute them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// RNG type used throughout the crate.
pub type SimRng = ChaCha8Rng;

/// Stream purposes. Kept as constants so call sites stay readable.
pub mod tag {
    pub const DEPLOYMENT: u64 = 0x01;
    pub const DATA: u64 = 0x02;
    pub const GRADIENT: u64 = 0x03;
    pub const ENCODE: u64 = 0x04;
    pub const CHANNEL: u64 = 0x05;
    pub const NOISE: u64 = 0x06;
    pub const DETECT: u64 = 0x07;
    pub const TRIAL: u64 = 0x08;
    pub const INIT: u64 = 0x09;
    pub const MV: u64 = 0x0a;
    pub const LINK: u64 = 0x0b;
}

#[inline]
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Derives a 64-bit key from a master seed and a path of counters.
pub fn derive_key(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(master), |acc, &p| splitmix64(acc ^ splitmix64(p.wrapping_add(0x632b_e59b_d9b4_e019))))
}

/// Returns the RNG stream for `path` under `master`.
pub fn stream(master: u64, path: &[u64]) -> SimRng {
    let key = derive_key(master, path);
    let mut seed = [0u8; 32];
    let mut k = key;
    for chunk in seed.chunks_mut(8) {
        k = splitmix64(k);
        chunk.copy_from_slice(&k.to_le_bytes());
    }
    SimRng::from_seed(seed)
}
