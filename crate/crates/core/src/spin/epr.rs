//! Spin correlations of particle pairs as ratios of measures of trajectory
//! classes.
//!
//! A pair experiment has a setting on each side (`a` or `a'`, `b` or `b'`)
//! and a result `+1` or `-1` on each side. The measure is given directly by
//! its weights on the sixteen classes of trajectories
//! `(setting_A, result_A, setting_B, result_B)`; index `0` stands for the
//! unprimed setting and for the result `+1`.

use alloc::vec::Vec;

use rand::Rng;

use super::spinor::Vec3;
use super::stern_gerlach::SgBranch;
use crate::error::{domain, Error, Result};
use crate::rng::stream;

fn unit(v: &Vec3) -> Result<Vec3> {
    let n = libm::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if !(n > 0.0 && n.is_finite()) {
        return Err(domain("setting direction must be non-zero"));
    }
    Ok([v[0] / n, v[1] / n, v[2] / n])
}

fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EprSettings {
    pub a: Vec3,
    pub a_prime: Vec3,
    pub b: Vec3,
    pub b_prime: Vec3,
}

impl EprSettings {
    pub fn new(a: Vec3, a_prime: Vec3, b: Vec3, b_prime: Vec3) -> Result<Self> {
        Ok(Self {
            a: unit(&a)?,
            a_prime: unit(&a_prime)?,
            b: unit(&b)?,
            b_prime: unit(&b_prime)?,
        })
    }

    /// Settings in one plane given by angles in radians.
    pub fn planar(a: f64, a_prime: f64, b: f64, b_prime: f64) -> Self {
        let dir = |t: f64| [libm::cos(t), libm::sin(t), 0.0];
        Self {
            a: dir(a),
            a_prime: dir(a_prime),
            b: dir(b),
            b_prime: dir(b_prime),
        }
    }

    pub fn alice(&self, oa: usize) -> Vec3 {
        if oa == 0 {
            self.a
        } else {
            self.a_prime
        }
    }

    pub fn bob(&self, ob: usize) -> Vec3 {
        if ob == 0 {
            self.b
        } else {
            self.b_prime
        }
    }
}

/// Weights over `(R_A, R_B)` in the order `(++, +-, -+, --)` for a singlet
/// pair measured along `a` and `b`: `(1 - R_A R_B a.b) / 4`.
pub fn singlet_measure(a: &Vec3, b: &Vec3) -> [f64; 4] {
    let c = dot(a, b);
    [0.25 * (1.0 - c), 0.25 * (1.0 + c), 0.25 * (1.0 + c), 0.25 * (1.0 - c)]
}

fn cell(oa: usize, ra: usize, ob: usize, rb: usize) -> usize {
    ((oa * 2 + ra) * 2 + ob) * 2 + rb
}

/// Measure on the sixteen trajectory classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EprMeasure {
    weights: [f64; 16],
}

impl EprMeasure {
    pub fn new(weights: [f64; 16]) -> Result<Self> {
        if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(domain("class weights must be finite and non-negative"));
        }
        Ok(Self { weights })
    }

    /// Each setting pair gets weight 1/4, split over results by `pair`.
    pub fn from_pair_weights<F: Fn(usize, usize) -> [f64; 4]>(pair: F) -> Result<Self> {
        let mut w = [0.0; 16];
        for oa in 0..2 {
            for ob in 0..2 {
                let p = pair(oa, ob);
                for ra in 0..2 {
                    for rb in 0..2 {
                        w[cell(oa, ra, ob, rb)] = 0.25 * p[ra * 2 + rb];
                    }
                }
            }
        }
        Self::new(w)
    }

    pub fn singlet(settings: &EprSettings) -> Self {
        Self::from_pair_weights(|oa, ob| singlet_measure(&settings.alice(oa), &settings.bob(ob)))
            .expect("singlet weights are non-negative")
    }

    pub fn uniform() -> Self {
        Self { weights: [1.0 / 16.0; 16] }
    }

    pub fn weight(&self, oa: usize, ra: usize, ob: usize, rb: usize) -> f64 {
        self.weights[cell(oa, ra, ob, rb)]
    }

    pub fn weights(&self) -> &[f64; 16] {
        &self.weights
    }

    pub fn conditional(&self, oa: usize, ob: usize) -> Result<[f64; 4]> {
        epr_conditional_probabilities(self, oa, ob)
    }

    /// `E = sum R_A R_B p(R_A, R_B | O_A, O_B)`.
    pub fn correlator(&self, oa: usize, ob: usize) -> Result<f64> {
        let p = self.conditional(oa, ob)?;
        Ok(p[0] - p[1] - p[2] + p[3])
    }

    /// `(p(R_A = +), p(R_A = -))` given both settings.
    pub fn alice_marginal(&self, oa: usize, ob: usize) -> Result<[f64; 2]> {
        let p = self.conditional(oa, ob)?;
        Ok([p[0] + p[1], p[2] + p[3]])
    }

    pub fn bob_marginal(&self, oa: usize, ob: usize) -> Result<[f64; 2]> {
        let p = self.conditional(oa, ob)?;
        Ok([p[0] + p[2], p[1] + p[3]])
    }
}

/// `p(R_A, R_B | O_A, O_B)`: the measure of each result class divided by the
/// measure of the setting class, in the order `(++, +-, -+, --)`.
pub fn epr_conditional_probabilities(measure: &EprMeasure, oa: usize, ob: usize) -> Result<[f64; 4]> {
    if oa > 1 || ob > 1 {
        return Err(domain("settings are indexed 0 or 1"));
    }
    let mut w = [0.0; 4];
    for ra in 0..2 {
        for rb in 0..2 {
            w[ra * 2 + rb] = measure.weight(oa, ra, ob, rb);
        }
    }
    let total: f64 = w.iter().sum();
    if !(total > 0.0) {
        return Err(Error::UnconditionedSetting);
    }
    Ok(w.map(|x| x / total))
}

/// `S = E(a,b) + E(a,b') + E(a',b) - E(a',b')`.
pub fn chsh_value(measure: &EprMeasure) -> Result<f64> {
    Ok(measure.correlator(0, 0)? + measure.correlator(0, 1)? + measure.correlator(1, 0)? - measure.correlator(1, 1)?)
}

/// The sixteen local deterministic assignments: each side's result is a
/// fixed function of its own setting.
pub fn deterministic_strategies() -> Vec<EprMeasure> {
    (0..16u32)
        .map(|bits| {
            let alice = |oa: usize| ((bits >> oa) & 1) as usize;
            let bob = |ob: usize| ((bits >> (2 + ob)) & 1) as usize;
            EprMeasure::from_pair_weights(|oa, ob| {
                let mut p = [0.0; 4];
                p[alice(oa) * 2 + bob(ob)] = 1.0;
                p
            })
            .expect("deterministic weights are valid")
        })
        .collect()
}

/// Observed class counts of a run of pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EprCounts {
    pub counts: [u64; 16],
}

impl EprCounts {
    pub fn record(&mut self, oa: usize, ra: usize, ob: usize, rb: usize) {
        self.counts[cell(oa, ra, ob, rb)] += 1;
    }

    /// Counts the pair by the branches its two particles took through magnets
    /// set to `oa` and `ob`.
    pub fn record_branches(&mut self, oa: usize, alice: &SgBranch, ob: usize, bob: &SgBranch) {
        let r = |b: &SgBranch| if b.sign > 0 { 0 } else { 1 };
        self.record(oa, r(alice), ob, r(bob));
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn to_measure(&self) -> Result<EprMeasure> {
        let n = self.total();
        if n == 0 {
            return Err(Error::UnconditionedSetting);
        }
        EprMeasure::new(self.counts.map(|c| c as f64 / n as f64))
    }

    /// CHSH estimate and its standard error, from `Var(E) = (1 - E^2) / n`
    /// per setting pair.
    pub fn chsh_estimate(&self) -> Result<(f64, f64)> {
        let m = self.to_measure()?;
        let mut var = 0.0;
        for oa in 0..2 {
            for ob in 0..2 {
                let n: u64 = (0..4).map(|k| self.counts[cell(oa, k / 2, ob, k % 2)]).sum();
                let e = m.correlator(oa, ob)?;
                var += (1.0 - e * e) / n as f64;
            }
        }
        Ok((chsh_value(&m)?, libm::sqrt(var)))
    }
}

/// Draws `n_pairs` singlet pairs, cycling through the four setting pairs;
/// pair `i` uses stream `(seed, i)`.
pub fn sample_singlet_pairs(settings: &EprSettings, n_pairs: usize, seed: u64) -> EprCounts {
    let mut counts = EprCounts::default();
    let tables: Vec<[f64; 4]> = (0..4)
        .map(|k| singlet_measure(&settings.alice(k / 2), &settings.bob(k % 2)))
        .collect();
    for i in 0..n_pairs {
        let k = i % 4;
        let u: f64 = stream(seed, i as u64).random();
        let p = &tables[k];
        let mut acc = 0.0;
        let mut pick = 3;
        for (j, w) in p.iter().enumerate() {
            acc += w;
            if u < acc {
                pick = j;
                break;
            }
        }
        counts.record(k / 2, pick / 2, k % 2, pick % 2);
    }
    counts
}
