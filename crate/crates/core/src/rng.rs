//! Counter-based random numbers.
//!
//! A draw is a pure function of `(master seed, replica, stream, lattice site,
//! word)`: there is no sequential state, so shifted fields, parallel replicas
//! and out-of-order evaluation all see the same values.

use serde::{Deserialize, Serialize};

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
const K_REPLICA: u64 = 0xd1b5_4a32_d192_ed03;
const K_STREAM: u64 = 0xa076_1d64_78bd_642f;
const K_WORD: u64 = 0xe703_7ed1_a0b4_28db;

/// Master seed plus replica index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master: u64,
    #[serde(default)]
    pub replica: u64,
}

impl SeedSpec {
    pub fn new(master: u64, replica: u64) -> Self {
        SeedSpec { master, replica }
    }

    pub fn replica(self, replica: u64) -> Self {
        SeedSpec { replica, ..self }
    }
}

/// SplitMix64 finalizer.
#[inline]
fn fmix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Keyed generator for one `(master, replica)` pair.
#[derive(Clone, Copy, Debug)]
pub struct CounterRng {
    key: u64,
}

impl CounterRng {
    pub fn new(seed: SeedSpec) -> Self {
        // For a fixed master seed, replica -> key is a bijection.
        let k = fmix(seed.master ^ GOLDEN);
        let key = fmix(k ^ fmix(seed.replica.wrapping_mul(K_REPLICA).wrapping_add(GOLDEN)));
        CounterRng { key }
    }

    /// 64 random bits at `(stream, site, word)`.
    #[inline]
    pub fn bits(&self, stream: u64, site: &[i64], word: u64) -> u64 {
        let mut h = fmix(self.key ^ stream.wrapping_mul(K_STREAM).wrapping_add(GOLDEN));
        for &c in site {
            h = fmix(h ^ (c as u64).wrapping_mul(GOLDEN).wrapping_add(K_REPLICA));
        }
        fmix(h ^ word.wrapping_mul(K_WORD).wrapping_add(K_STREAM))
    }

    /// Uniform on the open interval (0, 1).
    #[inline]
    pub fn uniform(&self, stream: u64, site: &[i64], word: u64) -> f64 {
        ((self.bits(stream, site, word) >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// ±1 with probability ½ each.
    #[inline]
    pub fn sign(&self, stream: u64, site: &[i64]) -> f64 {
        if self.bits(stream, site, 0) >> 63 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Standard normal via Box–Muller on words 0 and 1.
    #[inline]
    pub fn normal(&self, stream: u64, site: &[i64]) -> f64 {
        let u1 = self.uniform(stream, site, 0);
        let u2 = self.uniform(stream, site, 1);
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}
