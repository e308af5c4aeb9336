//! Seeded generator for test fields.
//!
//! The stream is a plain 64-bit linear congruential generator so that other
//! implementations can reproduce every fixture:
//!
//! ```text
//! state_0     = seed XOR 0x9E3779B97F4A7C15
//! state_{k+1} = state_k * 6364136223846793005 + 1442695040888963407  (mod 2^64)
//! uniform     = (state_{k+1} >> 11) * 2^-53                          in [0, 1)
//! ```
//!
//! A complex draw takes the real part first, then the imaginary part, each
//! mapped to `[-1, 1)`.

use num_complex::Complex64;

const MUL: u64 = 6364136223846793005;
const INC: u64 = 1442695040888963407;

#[derive(Clone, Debug)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Self { state: seed ^ 0x9E37_79B9_7F4A_7C15 }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_mul(MUL).wrapping_add(INC);
        self.state
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[-1, 1)`.
    pub fn symmetric(&mut self) -> f64 {
        2.0 * self.uniform() - 1.0
    }

    pub fn complex(&mut self) -> Complex64 {
        let re = self.symmetric();
        let im = self.symmetric();
        Complex64::new(re, im)
    }

    /// Derive an independent stream, e.g. one per test pair.
    pub fn fork(&mut self) -> Self {
        Self::new(self.next_u64())
    }
}
