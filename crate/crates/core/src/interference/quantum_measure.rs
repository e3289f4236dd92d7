//! Measure on asymptotic velocities of free particles released from a point.
//!
//! Without interaction the asymptotic velocity of particle `i` is its momentum
//! over `m_i`, so the measure of a velocity region is the Lebesgue measure of
//! its momentum image, up to a constant.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{domain, Result};

/// Axis-aligned box in the `3N`-dimensional velocity space, particle-major.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl VelocityBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() || !lo.len().is_multiple_of(3) {
            return Err(domain("box bounds need matching lengths that are a multiple of 3"));
        }
        if lo.iter().chain(&hi).any(|c| !c.is_finite()) {
            return Err(domain("velocity regions must be bounded"));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(b >= a)) {
            return Err(domain("box needs lo <= hi in every coordinate"));
        }
        Ok(Self { lo, hi })
    }

    pub fn translated(&self, shift: &[f64]) -> Result<Self> {
        if shift.len() != self.lo.len() {
            return Err(domain("shift dimension mismatch"));
        }
        Self::new(
            self.lo.iter().zip(shift).map(|(a, s)| a + s).collect(),
            self.hi.iter().zip(shift).map(|(a, s)| a + s).collect(),
        )
    }

    fn overlaps(&self, other: &Self) -> bool {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(other.lo.iter().zip(&other.hi))
            .all(|((a0, a1), (b0, b1))| a0.max(*b0) < a1.min(*b1))
    }
}

/// `(2 pi)^(-3N)`, the constant relating momentum volume to probability in
/// units where Planck's reduced constant is one.
pub fn free_measure_normalization(particles: usize) -> f64 {
    libm::pow(2.0 * PI, -3.0 * particles as f64)
}

/// Lebesgue measure of the momentum image `m Delta` of a disjoint box union.
pub fn momentum_volume(region: &[VelocityBox], masses: &[f64]) -> Result<f64> {
    if masses.is_empty() || masses.iter().any(|m| !(*m > 0.0 && m.is_finite())) {
        return Err(domain("masses must be positive"));
    }
    let dim = 3 * masses.len();
    if region.iter().any(|b| b.lo.len() != dim) {
        return Err(domain("box dimension must be three per particle"));
    }
    for (i, a) in region.iter().enumerate() {
        if region[i + 1..].iter().any(|b| a.overlaps(b)) {
            return Err(domain("boxes of a region must not overlap"));
        }
    }
    let mut total = 0.0;
    for b in region {
        let mut vol = 1.0;
        for (k, (lo, hi)) in b.lo.iter().zip(&b.hi).enumerate() {
            vol *= masses[k / 3] * (hi - lo);
        }
        total += vol;
    }
    Ok(total)
}

/// Measure of the velocity region for free particles released at one point.
pub fn free_quantum_momentum_measure(region: &[VelocityBox], masses: &[f64]) -> Result<f64> {
    Ok(momentum_volume(region, masses)? * free_measure_normalization(masses.len()))
}
