use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Reproducible random stream identified by `(master_seed, stream_id)`.
///
/// Streams are ChaCha8 keystreams: the master seed selects the key and the
/// stream id selects the nonce, so distinct ids never overlap.
#[derive(Debug, Clone)]
pub struct SeededRandomSource {
    master_seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl SeededRandomSource {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_id);
        Self {
            master_seed,
            stream_id,
            rng,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform on `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform on `[lo, hi)`.
    #[inline]
    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Zero-mean Gaussian with the given variance.
    #[inline]
    pub fn normal(&mut self, variance: f64) -> f64 {
        variance.sqrt() * self.standard_normal()
    }

    pub fn raw_u64(&mut self) -> u64 {
        self.rng.random::<u64>()
    }
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Pseudo-random uniform on `[0, 1)` that is a pure function of `key`.
///
/// Encoder and decoder evaluate it at the same key to share randomized
/// rounding thresholds without exchanging bits.
pub fn keyed_uniform(key: &[u64]) -> f64 {
    let mut h = 0x6a09_e667_f3bc_c908u64;
    for &k in key {
        h = splitmix64(h ^ splitmix64(k));
    }
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
