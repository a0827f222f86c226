//! Shared oracle machinery for the integration and acceptance suites.
//!
//! Everything here is deliberately independent of the library's production
//! paths: the ODE integrator re-derives the moment dynamics numerically, the
//! spectral/quadrature oracles evolve sampled states on grids.

#![allow(dead_code)]

pub mod ode;
pub mod quadrature;
pub mod spectral;

/// Relative deviation with a caller-chosen scale floor.
pub fn rel_scaled(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / b.abs().max(scale)
}

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Deterministic xorshift generator for randomized property tests: stable
/// across platforms and dependency versions.
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        Self(seed.max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn log_range(&mut self, lo: f64, hi: f64) -> f64 {
        (self.range(lo.ln(), hi.ln())).exp()
    }

    pub fn pick(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}
