//! Seed derivation. A single root seed fans out into per-purpose streams via
//! fixed offsets, so independent pipeline stages stay decorrelated while the
//! whole run remains reproducible from one integer.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Named sub-streams derived from a run's root seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    NetworkInit,
    Collocation,
    Boundary,
    Sampler,
    TestSet,
    QNetworkInit,
    MdpRollout,
    DqnBatch,
}

impl Stream {
    fn offset(self) -> u64 {
        match self {
            Stream::NetworkInit => 1,
            Stream::Collocation => 2,
            Stream::Boundary => 3,
            Stream::Sampler => 4,
            Stream::TestSet => 5,
            Stream::QNetworkInit => 6,
            Stream::MdpRollout => 7,
            Stream::DqnBatch => 8,
        }
    }
}

/// splitmix64 finalizer; decorrelates nearby seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive the seed for a sub-stream from the run's root seed.
pub fn derive_seed(root: u64, stream: Stream) -> u64 {
    mix(root.wrapping_mul(0x100_0000_01b3).wrapping_add(stream.offset()))
}

/// Seeded generator for a sub-stream. ChaCha8 keeps the byte stream identical
/// across platforms and releases.
pub fn stream_rng(root: u64, stream: Stream) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(root, stream))
}

/// Generator straight from an explicit seed.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
