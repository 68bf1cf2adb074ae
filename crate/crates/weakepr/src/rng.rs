//! Deterministic counter-derived random streams.
//!
//! Every stochastic step of a run draws from a stream identified by
//! (master seed, serial, stage code). Identical identifiers yield identical
//! draw sequences no matter in which order or on which thread the serials
//! are simulated, which is what makes ledgers bit-reproducible.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic random stream (xorshift64* core, splitmix64 key derivation).
///
/// Not cryptographically secure; statistical quality is sufficient for
/// Monte Carlo sampling and the derivation keeps distinct (seed, serial,
/// stage) tuples statistically independent.
#[derive(Debug, Clone)]
pub struct RandomStream {
    state: u64,
    spare_normal: Option<f64>,
}

impl RandomStream {
    /// Stream for one (master seed, serial, stage) triple.
    pub fn derive(master_seed: u64, serial: u64, stage: u64) -> Self {
        let mut s = master_seed ^ GOLDEN;
        let a = splitmix64(&mut s);
        let mut s = a ^ serial.wrapping_mul(0xD2B7_4407_B1CE_6E93);
        let b = splitmix64(&mut s);
        let mut s = b ^ stage.wrapping_mul(0xCA5A_8264_95F2_1157);
        let c = splitmix64(&mut s);
        Self {
            // xorshift locks up on zero state.
            state: if c == 0 { GOLDEN } else { c },
            spare_normal: None,
        }
    }

    /// Stream bound to a run rather than a particular serial.
    pub fn for_run(master_seed: u64, stage: u64) -> Self {
        Self::derive(master_seed, u64::MAX, stage)
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }

    /// True with probability `p`.
    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Standard normal deviate via Box-Muller, caching the paired draw.
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        // u1 in (0, 1] keeps the log finite.
        let u1 = ((self.next_u64() >> 11) as f64 + 1.0) * (1.0 / 9_007_199_254_740_992.0);
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        self.spare_normal = Some(r * s);
        r * c
    }

    /// Normal deviate with the given mean and standard deviation.
    #[inline]
    pub fn normal(&mut self, mean: f64, std_dev: f64) -> f64 {
        mean + std_dev * self.standard_normal()
    }

    /// Uniform integer in [0, n).
    pub fn next_range(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        // Rejection sampling removes modulo bias.
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % n;
            }
        }
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.next_range(i as u64 + 1) as usize;
            xs.swap(i, j);
        }
    }
}
