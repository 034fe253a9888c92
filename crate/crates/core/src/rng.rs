//! Reproducible random streams for replication-parallel Monte Carlo.
//!
//! Every replication owns a ChaCha8 stream keyed by `(master seed, stream id)`.
//! ChaCha is a counter-based generator: the stream id selects an independent
//! keystream and no state is shared between replications, so results do not
//! depend on how replications are scheduled across workers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Independent random stream for one replication.
#[derive(Debug, Clone)]
pub struct Stream {
    rng: ChaCha8Rng,
}

impl Stream {
    /// Stream number `index` of the family keyed by `seed`.
    pub fn new(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Self { rng }
    }

    /// Derive a sub-family seed so that distinct experiment components
    /// (e.g. risk simulation vs. predicted-risk sampling) never share streams.
    pub fn derive_seed(seed: u64, salt: u64) -> u64 {
        splitmix64(seed ^ splitmix64(salt.wrapping_add(0x9E37_79B9_7F4A_7C15)))
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Uniform on the open interval (0, 1).
    pub fn uniform_open(&mut self) -> f64 {
        loop {
            let u: f64 = self.rng.gen();
            if u > 0.0 {
                return u;
            }
        }
    }

    pub fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
