//! Counter-based, splittable random streams.
//!
//! A stream is identified by `(seed, stream_id)`. Its `i`-th 64-bit output
//! is a SplitMix64 finalizer applied to `key + (i + 1) * GOLDEN`, where the
//! key is a hash of the identity, so any position can be reached in O(1)
//! and child streams are derived without touching the parent's state.

use serde::{Deserialize, Serialize};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const STREAM_SALT: u64 = 0xD1B5_4A32_D192_ED03;

/// Name and version recorded in reports.
pub const GENERATOR_NAME: &str = "splitmix64-counter/1 + marsaglia-polar/1";

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic random stream. Cloning copies the position, so two clones
/// produce the same sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    #[serde(skip)]
    key: u64,
    #[serde(skip)]
    counter: u64,
    #[serde(skip)]
    spare_normal: Option<u64>,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let key = mix64(seed ^ mix64(stream_id.wrapping_add(STREAM_SALT)));
        RngStream {
            seed,
            stream_id,
            key,
            counter: 0,
            spare_normal: None,
        }
    }

    /// Root stream for a user seed.
    pub fn from_seed(seed: u64) -> Self {
        Self::new(seed, 0)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Child stream `index` of `self`. Depends only on the parent's
    /// identity, not on how many values the parent has produced.
    pub fn derive(&self, index: u64) -> RngStream {
        let child = mix64(self.stream_id ^ mix64(index.wrapping_add(GOLDEN)).rotate_left(17))
            .wrapping_add(index);
        RngStream::new(self.seed, child)
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal by the Marsaglia polar method. Each accepted pair
    /// yields two variates; the second is returned by the next call.
    pub fn next_normal(&mut self) -> f64 {
        if let Some(bits) = self.spare_normal.take() {
            return f64::from_bits(bits);
        }
        loop {
            let u = 2.0 * self.next_f64() - 1.0;
            let v = 2.0 * self.next_f64() - 1.0;
            let s = u * u + v * v;
            if s >= 1.0 || s == 0.0 {
                continue;
            }
            let factor = (-2.0 * s.ln() / s).sqrt();
            self.spare_normal = Some((v * factor).to_bits());
            return u * factor;
        }
    }
}

/// Free-function form of [`RngStream::derive`].
pub fn derive_stream(parent: &RngStream, index: u64) -> RngStream {
    parent.derive(index)
}
