//! Asymptotic velocities `lim x(t)/t` of particles that start together.
//!
//! Particles interact through bounded repulsive pair potentials and may feel
//! a compactly supported external bump. The coincident start at `t = 0` is
//! replaced by positions `v t0` at a small `t0 > 0`. Integration uses a
//! fourth-order symplectic composition of velocity Verlet while anything can
//! still interact, and exact straight-line jumps once every pair and every
//! particle is receding from all interaction regions.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairPotential {
    None,
    /// `strength * exp(-r^2 / (2 width^2))`.
    Gaussian { strength: f64, width: f64 },
}

/// `strength * (1 - |x - center|^2 / radius^2)^2` inside the ball, zero outside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub center: [f64; 3],
    pub strength: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NBodySystem {
    masses: Vec<f64>,
    pair: PairPotential,
    external: Option<Bump>,
}

/// Past this many widths a Gaussian pair force is below `exp(-72)` of its scale.
const GAUSSIAN_CUTOFF: f64 = 12.0;

impl NBodySystem {
    pub fn new(masses: Vec<f64>, pair: PairPotential) -> Result<Self> {
        if masses.is_empty() || masses.iter().any(|m| !(*m > 0.0 && m.is_finite())) {
            return Err(domain("masses must be positive"));
        }
        if let PairPotential::Gaussian { strength, width } = pair {
            if !(strength.is_finite() && width > 0.0 && width.is_finite()) {
                return Err(domain("pair potential needs finite strength and positive width"));
            }
        }
        Ok(Self { masses, pair, external: None })
    }

    pub fn with_bump(mut self, bump: Bump) -> Result<Self> {
        if !(bump.radius > 0.0 && bump.strength.is_finite()) {
            return Err(domain("bump needs a positive radius"));
        }
        self.external = Some(bump);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    fn pair_range(&self) -> Option<f64> {
        match self.pair {
            PairPotential::None => None,
            PairPotential::Gaussian { width, .. } => Some(GAUSSIAN_CUTOFF * width),
        }
    }

    fn pair_value(&self, r2: f64) -> f64 {
        match self.pair {
            PairPotential::None => 0.0,
            PairPotential::Gaussian { strength, width } => strength * libm::exp(-0.5 * r2 / (width * width)),
        }
    }

    pub fn potential_energy(&self, x: &[[f64; 3]]) -> f64 {
        let mut e = 0.0;
        for i in 0..x.len() {
            for j in i + 1..x.len() {
                e += self.pair_value(dist2(&x[i], &x[j]));
            }
            if let Some(b) = self.external {
                let q = dist2(&x[i], &b.center) / (b.radius * b.radius);
                if q < 1.0 {
                    e += b.strength * (1.0 - q) * (1.0 - q);
                }
            }
        }
        e
    }

    pub fn kinetic_energy(&self, v: &[[f64; 3]]) -> f64 {
        self.masses.iter().zip(v).map(|(m, v)| 0.5 * m * dot(v, v)).sum()
    }

    fn accelerations(&self, x: &[[f64; 3]], a: &mut [[f64; 3]]) {
        for ai in a.iter_mut() {
            *ai = [0.0; 3];
        }
        let n = x.len();
        if let PairPotential::Gaussian { strength, width } = self.pair {
            let w2 = width * width;
            for i in 0..n {
                for j in i + 1..n {
                    let d = sub(&x[i], &x[j]);
                    // -dV/dr / r
                    let f = strength * libm::exp(-0.5 * dot(&d, &d) / w2) / w2;
                    for k in 0..3 {
                        a[i][k] += f * d[k] / self.masses[i];
                        a[j][k] -= f * d[k] / self.masses[j];
                    }
                }
            }
        }
        if let Some(b) = self.external {
            let r2 = b.radius * b.radius;
            for i in 0..n {
                let d = sub(&x[i], &b.center);
                let q = dot(&d, &d) / r2;
                if q < 1.0 {
                    let f = 4.0 * b.strength * (1.0 - q) / r2;
                    for k in 0..3 {
                        a[i][k] += f * d[k] / self.masses[i];
                    }
                }
            }
        }
    }

    /// True when no force acts now and none ever will under free motion.
    fn never_interacts(&self, x: &[[f64; 3]], v: &[[f64; 3]]) -> bool {
        let n = x.len();
        if let Some(range) = self.pair_range() {
            for i in 0..n {
                for j in i + 1..n {
                    let d = sub(&x[i], &x[j]);
                    let w = sub(&v[i], &v[j]);
                    if dot(&d, &d) < range * range || dot(&d, &w) < 0.0 {
                        return false;
                    }
                }
            }
        }
        if let Some(b) = self.external {
            for i in 0..n {
                let d = sub(&x[i], &b.center);
                if dot(&d, &d) < b.radius * b.radius || dot(&d, &v[i]) < 0.0 {
                    return false;
                }
            }
        }
        true
    }

    /// Time until free motion could first bring something into interaction
    /// range; zero when something already interacts.
    fn free_time(&self, x: &[[f64; 3]], v: &[[f64; 3]]) -> f64 {
        let mut t = f64::INFINITY;
        let mut gap = |d: [f64; 3], w: [f64; 3], range: f64| {
            let r = libm::sqrt(dot(&d, &d));
            let s = libm::sqrt(dot(&w, &w));
            let g = if r <= range { 0.0 } else if s > 0.0 { (r - range) / s } else { f64::INFINITY };
            t = t.min(g);
        };
        let n = x.len();
        if let Some(range) = self.pair_range() {
            for i in 0..n {
                for j in i + 1..n {
                    gap(sub(&x[i], &x[j]), sub(&v[i], &v[j]), range);
                }
            }
        }
        if let Some(b) = self.external {
            for i in 0..n {
                gap(sub(&x[i], &b.center), v[i], b.radius);
            }
        }
        t
    }

    fn interaction_length(&self) -> f64 {
        let mut l = f64::INFINITY;
        if let PairPotential::Gaussian { width, .. } = self.pair {
            l = l.min(width);
        }
        if let Some(b) = self.external {
            l = l.min(b.radius);
        }
        l
    }

    fn max_potential(&self) -> f64 {
        let n = self.masses.len() as f64;
        let pair = match self.pair {
            PairPotential::None => 0.0,
            PairPotential::Gaussian { strength, .. } => strength.abs() * n * (n - 1.0) / 2.0,
        };
        pair + self.external.map_or(0.0, |b| b.strength.abs() * n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticConfig {
    /// Regularization time at which the particles sit at `v t0`.
    pub t0: f64,
    pub t_max: f64,
    pub tolerance: f64,
    /// Ratio between successive checkpoint times.
    pub checkpoint_ratio: f64,
    /// Step as a fraction of the time to cross the shortest interaction length.
    pub step_fraction: f64,
}

impl Default for AsymptoticConfig {
    fn default() -> Self {
        Self {
            t0: 1e-3,
            t_max: 1e12,
            tolerance: 1e-9,
            checkpoint_ratio: 2.0,
            step_fraction: 2e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticVelocityResult {
    /// `x(t)/t` at the last checkpoint, particle-major.
    pub v_plus: Vec<f64>,
    pub convergence_history: Vec<(f64, Vec<f64>)>,
    pub converged: bool,
    /// Actual velocities at the last checkpoint.
    pub final_velocity: Vec<[f64; 3]>,
    pub final_position: Vec<[f64; 3]>,
    pub final_time: f64,
}

/// Fourth-order Yoshida coefficients.
const W1: f64 = 1.351_207_191_959_657_8;
const W0: f64 = -1.702_414_383_919_315_3;

/// Integrates from `x = v t0` and records `x(t)/t` at `t0 r^k`, stopping when
/// successive records agree to `tolerance` in max-norm with no interaction
/// left ahead, or `t_max` is reached.
pub fn asymptotic_velocity(
    system: &NBodySystem,
    initial_velocity: &[[f64; 3]],
    cfg: &AsymptoticConfig,
) -> Result<AsymptoticVelocityResult> {
    let n = system.len();
    if initial_velocity.len() != n {
        return Err(domain("one initial velocity per particle"));
    }
    if initial_velocity.iter().flatten().any(|c| !c.is_finite()) {
        return Err(domain("initial velocities must be finite"));
    }
    if !(cfg.t0 > 0.0 && cfg.t_max > cfg.t0 && cfg.checkpoint_ratio > 1.0 && cfg.tolerance > 0.0) {
        return Err(domain("need 0 < t0 < t_max, checkpoint ratio > 1, tolerance > 0"));
    }
    if !(cfg.step_fraction > 0.0 && cfg.step_fraction <= 1.0) {
        return Err(domain("step fraction must lie in (0, 1]"));
    }
    let mut x: Vec<[f64; 3]> = initial_velocity.iter().map(|v| scale(v, cfg.t0)).collect();
    let mut v: Vec<[f64; 3]> = initial_velocity.to_vec();
    let mut a = vec![[0.0; 3]; n];
    let mut t = cfg.t0;
    let m_min = system.masses.iter().copied().fold(f64::INFINITY, f64::min);
    let length = system.interaction_length();

    let mut history: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut converged = false;
    let mut k = 1;
    loop {
        let target = cfg.t0 * libm::pow(cfg.checkpoint_ratio, k as f64);
        if target > cfg.t_max {
            break;
        }
        while t < target {
            if system.never_interacts(&x, &v) {
                let dt = target - t;
                for (xi, vi) in x.iter_mut().zip(&v) {
                    for c in 0..3 {
                        xi[c] += vi[c] * dt;
                    }
                }
                t = target;
                break;
            }
            let speed = v.iter().map(|w| libm::sqrt(dot(w, w))).fold(0.0, f64::max)
                + libm::sqrt(2.0 * system.max_potential() / m_min);
            let base = if speed > 0.0 { cfg.step_fraction * length / speed } else { target - t };
            let dt = base.max(0.5 * system.free_time(&x, &v)).min(target - t);
            for w in [W1, W0, W1] {
                verlet(system, &mut x, &mut v, &mut a, w * dt);
            }
            t = if target - t <= dt { target } else { t + dt };
        }
        let ratio: Vec<f64> = x.iter().flat_map(|xi| xi.iter().map(|c| c / t)).collect();
        if let Some((_, prev)) = history.last() {
            let diff = prev.iter().zip(&ratio).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            // agreement before the last interaction is not convergence
            if diff < cfg.tolerance && system.never_interacts(&x, &v) {
                converged = true;
            }
        }
        history.push((t, ratio));
        if converged {
            break;
        }
        k += 1;
    }
    let v_plus = history.last().map_or_else(
        || x.iter().flat_map(|xi| xi.iter().map(|c| c / t)).collect(),
        |(_, r)| r.clone(),
    );
    Ok(AsymptoticVelocityResult {
        v_plus,
        convergence_history: history,
        converged,
        final_velocity: v,
        final_position: x,
        final_time: t,
    })
}

fn verlet(system: &NBodySystem, x: &mut [[f64; 3]], v: &mut [[f64; 3]], a: &mut [[f64; 3]], dt: f64) {
    system.accelerations(x, a);
    for (vi, ai) in v.iter_mut().zip(a.iter()) {
        for c in 0..3 {
            vi[c] += 0.5 * dt * ai[c];
        }
    }
    for (xi, vi) in x.iter_mut().zip(v.iter()) {
        for c in 0..3 {
            xi[c] += dt * vi[c];
        }
    }
    system.accelerations(x, a);
    for (vi, ai) in v.iter_mut().zip(a.iter()) {
        for c in 0..3 {
            vi[c] += 0.5 * dt * ai[c];
        }
    }
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn scale(a: &[f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn dist2(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let d = sub(a, b);
    dot(&d, &d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_particles_are_exact() {
        let sys = NBodySystem::new(vec![1.0, 2.0, 0.5], PairPotential::None).unwrap();
        let v = [[0.5, -0.25, 1.0], [0.125, 0.0, -2.0], [-1.5, 0.75, 0.0625]];
        let cfg = AsymptoticConfig { t0: 1.0, t_max: 1024.0, ..Default::default() };
        let r = asymptotic_velocity(&sys, &v, &cfg).unwrap();
        let flat: Vec<f64> = v.iter().flatten().copied().collect();
        assert!(r.converged);
        for (_, h) in &r.convergence_history {
            assert_eq!(h, &flat);
        }
    }

    #[test]
    fn receding_particle_misses_bump() {
        let sys = NBodySystem::new(vec![1.0], PairPotential::None)
            .unwrap()
            .with_bump(Bump { center: [-3.0, 0.0, 0.0], strength: 5.0, radius: 1.0 })
            .unwrap();
        let v = [[0.75, 0.5, 0.0]];
        let cfg = AsymptoticConfig { t0: 0.5, t_max: 64.0, ..Default::default() };
        let r = asymptotic_velocity(&sys, &v, &cfg).unwrap();
        assert_eq!(r.v_plus, vec![0.75, 0.5, 0.0]);
        assert_eq!(r.final_velocity, v.to_vec());
    }

    #[test]
    fn bump_deflects_but_conserves_energy() {
        let sys = NBodySystem::new(vec![1.0], PairPotential::None)
            .unwrap()
            .with_bump(Bump { center: [2.0, 0.3, 0.0], strength: 0.2, radius: 1.0 })
            .unwrap();
        let v = [[1.0, 0.0, 0.0]];
        let r = asymptotic_velocity(&sys, &v, &AsymptoticConfig::default()).unwrap();
        assert!(r.converged);
        let vp = &r.v_plus;
        let ke = 0.5 * (vp[0] * vp[0] + vp[1] * vp[1] + vp[2] * vp[2]);
        assert!((ke - 0.5).abs() < 1e-7, "{ke}");
        assert!(vp[1] < -1e-3, "pushed away from the bump center");
    }

    #[test]
    fn repulsion_converts_potential_energy() {
        let (m1, m2) = (1.0, 3.0);
        let sys = NBodySystem::new(vec![m1, m2], PairPotential::Gaussian { strength: 0.7, width: 0.5 }).unwrap();
        let v = [[0.3, 0.1, 0.0], [-0.1, 0.05, 0.02]];
        let cfg = AsymptoticConfig::default();
        let x0: Vec<[f64; 3]> = v.iter().map(|w| scale(w, cfg.t0)).collect();
        let total = sys.kinetic_energy(&v) + sys.potential_energy(&x0);
        let r = asymptotic_velocity(&sys, &v, &cfg).unwrap();
        assert!(r.converged);
        let mu = m1 * m2 / (m1 + m2);
        let p = |i: usize| [r.v_plus[3 * i], r.v_plus[3 * i + 1], r.v_plus[3 * i + 2]];
        let rel = sub(&p(0), &p(1));
        let cm_speed2 = {
            let c: Vec<f64> = (0..3).map(|k| (m1 * v[0][k] + m2 * v[1][k]) / (m1 + m2)).collect();
            c.iter().map(|c| c * c).sum::<f64>()
        };
        let internal = total - 0.5 * (m1 + m2) * cm_speed2;
        let ke_rel = 0.5 * mu * dot(&rel, &rel);
        assert!((ke_rel / internal - 1.0).abs() < 1e-6, "{ke_rel} {internal}");
    }

    #[test]
    fn history_is_cauchy() {
        let sys = NBodySystem::new(vec![1.0, 1.0, 1.0], PairPotential::Gaussian { strength: 1.0, width: 1.0 }).unwrap();
        let v = [[0.2, 0.0, 0.0], [-0.1, 0.17, 0.0], [-0.1, -0.17, 0.05]];
        let r = asymptotic_velocity(&sys, &v, &AsymptoticConfig::default()).unwrap();
        assert!(r.converged);
        let diffs: Vec<f64> = r
            .convergence_history
            .windows(2)
            .map(|w| w[0].1.iter().zip(&w[1].1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .collect();
        let tail = &diffs[diffs.len() / 2..];
        for w in tail.windows(2) {
            assert!(w[1] <= w[0] + 1e-10);
        }
    }

    #[test]
    fn short_horizon_reports_not_converged() {
        let sys = NBodySystem::new(vec![1.0, 1.0], PairPotential::Gaussian { strength: 1.0, width: 1.0 }).unwrap();
        let v = [[0.1, 0.0, 0.0], [-0.1, 0.0, 0.0]];
        let cfg = AsymptoticConfig { t_max: 1.0, ..Default::default() };
        let r = asymptotic_velocity(&sys, &v, &cfg).unwrap();
        assert!(!r.converged);
        assert!(!r.convergence_history.is_empty());
    }
}
