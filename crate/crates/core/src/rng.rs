//! Counter-based random streams.
//!
//! Every draw is a pure function of `(seed, stream, counter)`, so parallel
//! generation is order-independent and regenerating with the same seed is
//! bit-identical. The generator is the splitmix64 finaliser applied to a
//! keyed counter; statistically ample for Monte Carlo at the sample sizes
//! used here.

use std::f64::consts::TAU;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A stateless stream of uniforms and Gaussians indexed by a counter.
#[derive(Clone, Copy, Debug)]
pub struct CounterRng {
    key: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self {
            key: mix(seed ^ 0x9e37_79b9_7f4a_7c15),
        }
    }

    /// An independent substream, e.g. one per walker or per noise field.
    pub fn substream(&self, index: u64) -> Self {
        Self {
            key: mix(self.key ^ index.wrapping_mul(0xd134_2543_de82_ef95)),
        }
    }

    #[inline]
    fn word(&self, counter: u64) -> u64 {
        mix(self.key ^ counter.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    /// Uniform in (0, 1]; never returns 0 so it is safe under `ln`.
    #[inline]
    pub fn uniform(&self, counter: u64) -> f64 {
        (((self.word(counter) >> 11) + 1) as f64) / (1u64 << 53) as f64
    }

    /// Standard normal via Box–Muller; one value per counter.
    #[inline]
    pub fn standard_normal(&self, counter: u64) -> f64 {
        let u1 = self.uniform(2 * counter);
        let u2 = self.uniform(2 * counter + 1);
        (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
    }
}
