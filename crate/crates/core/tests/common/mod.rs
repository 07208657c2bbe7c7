#![allow(dead_code)]

use num_complex::Complex64;
use pathsym_core::{Basis, PureSector, SpinSector};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub struct TestRng(ChaCha8Rng);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.0.next_u64() % n
    }

    /// Standard normal via Box-Muller.
    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform().max(1e-300);
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    /// Generic complex state; path symmetry fails with probability one.
    pub fn generic_state(&mut self, n: u32, basis: Basis) -> PureSector {
        let amps = (0..=n)
            .map(|_| Complex64::new(self.normal(), self.normal()))
            .collect();
        PureSector::normalized(SpinSector::new(n), basis, amps).unwrap()
    }

    /// Real counting amplitudes times a random global phase.
    pub fn symmetric_state(&mut self, n: u32) -> PureSector {
        let amps: Vec<f64> = (0..=n).map(|_| self.normal()).collect();
        let theta = self.range(0.0, 2.0 * std::f64::consts::PI);
        PureSector::from_real(SpinSector::new(n), Basis::CountingJ1, &amps)
            .unwrap()
            .with_global_phase(theta)
    }
}

/// Central-difference Fisher information from probabilities alone.
pub fn cfi_finite_difference(state: &PureSector, phi: f64, h: f64) -> f64 {
    let p = pathsym_core::estimation::counting_probabilities(state, phi);
    let plus = pathsym_core::estimation::counting_probabilities(state, phi + h);
    let minus = pathsym_core::estimation::counting_probabilities(state, phi - h);
    p.iter()
        .zip(plus.iter().zip(&minus))
        .filter(|(p, _)| **p > 1e-12)
        .map(|(p, (a, b))| {
            let dp = (a - b) / (2.0 * h);
            dp * dp / p
        })
        .sum()
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
