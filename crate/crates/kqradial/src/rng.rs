//! Counter-based random numbers for reproducible parallel Monte Carlo.
//!
//! Every draw is a pure function of `(seed, stream, index)` through a
//! 10-round Philox-2x64 block, so paths can be executed in any order — or
//! concurrently — and still reproduce the sequential ensemble bit for bit.

const MULTIPLIER: u64 = 0xD2B7_4407_B1CE_6E93;
const WEYL: u64 = 0x9E37_79B9_7F4A_7C15;
const INV_2_53: f64 = 1.0 / 9007199254740992.0; // 2^-53

/// Keyed Philox-2x64-10 generator; copy-cheap and stateless per draw.
#[derive(Debug, Clone, Copy)]
pub struct CounterRng {
    seed: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        CounterRng { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// One Philox block on the counter `(stream, index)`.
    pub fn block(&self, stream: u64, index: u64) -> [u64; 2] {
        let mut ctr = [stream, index];
        let mut key = self.seed;
        for _ in 0..10 {
            let prod = u128::from(ctr[0]) * u128::from(MULTIPLIER);
            let hi = (prod >> 64) as u64;
            let lo = prod as u64;
            ctr = [hi ^ key ^ ctr[1], lo];
            key = key.wrapping_add(WEYL);
        }
        ctr
    }

    /// Uniform pair: first in (0, 1] (safe under `ln`), second in [0, 1).
    pub fn uniform_pair(&self, stream: u64, index: u64) -> (f64, f64) {
        let [a, b] = self.block(stream, index);
        (((a >> 11) + 1) as f64 * INV_2_53, (b >> 11) as f64 * INV_2_53)
    }

    /// Single uniform in [0, 1).
    pub fn uniform(&self, stream: u64, index: u64) -> f64 {
        (self.block(stream, index)[0] >> 11) as f64 * INV_2_53
    }

    /// One standard normal (Box–Muller, cosine leg).
    pub fn normal(&self, stream: u64, index: u64) -> f64 {
        let (u1, u2) = self.uniform_pair(stream, index);
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Two independent standard normals from one block.
    pub fn normal_pair(&self, stream: u64, index: u64) -> (f64, f64) {
        let (u1, u2) = self.uniform_pair(stream, index);
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        (radius * angle.cos(), radius * angle.sin())
    }
}
