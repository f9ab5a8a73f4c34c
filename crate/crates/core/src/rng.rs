//! Deterministic random-stream derivation.
//!
//! Every Monte-Carlo quantity draws from a ChaCha8 generator keyed by the
//! master seed and a [`Domain`]; the ChaCha stream index selects the path.
//! Hurst draws and path draws therefore never share a stream, and the
//! output of a run does not depend on how paths are split across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Disjoint stream families derived from one master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    Paths,
    Hurst,
    /// Auxiliary streams, e.g. one per named check.
    Aux(u64),
}

impl Domain {
    fn tag(self) -> u64 {
        match self {
            Domain::Paths => 0x5041_5448_0000_0001,
            Domain::Hurst => 0x4855_5253_0000_0002,
            Domain::Aux(k) => 0x4155_5800_0000_0000 ^ splitmix64(k),
        }
    }
}

pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for path (or draw) `index` of `domain` under `seed`.
pub fn stream(seed: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ domain.tag()));
    rng.set_stream(index);
    rng
}

/// Derives a child master seed from a label, used to give each named job
/// its own independent family of streams.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    // FNV-1a over the label, then mixed with the parent seed.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    splitmix64(seed ^ splitmix64(h))
}
