//! Sequential scattering through many well-separated centers.
//!
//! The scene is a periodic box: a ray leaving through one face re-enters
//! through the opposite one, so a trajectory keeps meeting centers for as
//! long as needed. Between encounters the motion is free; each encounter
//! rotates the direction by the deflection angle of the center's potential
//! in the plane spanned by the incoming direction and the impact vector.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, RngCore};

use super::deflection::Deflection;
use super::potential::PotentialSpec;
use crate::error::{domain, Result};
use crate::rng::stream;
use crate::tcore::{ensemble_statistics, EnsembleConfig, Experiment, MeasureSpec, RateStatistics};

type Vec3 = [f64; 3];

fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn axpy(a: f64, x: &Vec3, y: &Vec3) -> Vec3 {
    [a * x[0] + y[0], a * x[1] + y[1], a * x[2] + y[2]]
}

fn normalize(v: &Vec3) -> Vec3 {
    let n = libm::sqrt(dot(v, v));
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Orthonormal pair perpendicular to the unit vector `u`.
fn transverse_frame(u: &Vec3) -> (Vec3, Vec3) {
    let axis = if u[0].abs() <= u[1].abs() && u[0].abs() <= u[2].abs() {
        [1.0, 0.0, 0.0]
    } else if u[1].abs() <= u[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let e1 = normalize(&cross(u, &axis));
    let e2 = cross(u, &e1);
    (e1, e2)
}

fn random_direction(rng: &mut dyn RngCore) -> Vec3 {
    let z: f64 = 2.0 * rng.random::<f64>() - 1.0;
    let phi = 2.0 * PI * rng.random::<f64>();
    let rho = libm::sqrt((1.0 - z * z).max(0.0));
    [rho * libm::cos(phi), rho * libm::sin(phi), z]
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlipperScene {
    cell: Vec3,
    centers: Vec<Vec3>,
    potential: PotentialSpec,
    energy: f64,
    min_spacing: f64,
    max_path: f64,
}

impl FlipperScene {
    pub const DEFAULT_SPACING_FACTOR: f64 = 10.0;

    /// Builds a scene in the periodic box `[0, cell)`. Every center must sit
    /// at least one action range inside the box, and all center pairs
    /// (periodic images included) must be `spacing_factor` action ranges
    /// apart.
    pub fn new(cell: Vec3, centers: Vec<Vec3>, potential: PotentialSpec, energy: f64, spacing_factor: f64) -> Result<Self> {
        let r0 = potential.action_range();
        if cell.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(domain("cell extents must be positive and finite"));
        }
        if centers.is_empty() {
            return Err(domain("scene needs at least one center"));
        }
        if !(energy > 0.0 && energy.is_finite()) {
            return Err(domain("energy must be positive and finite"));
        }
        if !(spacing_factor > 2.0) {
            return Err(domain("spacing factor must exceed 2 so action ranges cannot overlap"));
        }
        let d_min = spacing_factor * r0;
        if cell.iter().any(|l| *l < d_min) {
            return Err(domain("cell side shorter than the minimum center spacing"));
        }
        for c in &centers {
            for a in 0..3 {
                if !(c[a] >= r0 && c[a] <= cell[a] - r0) {
                    return Err(domain("centers must lie one action range inside the cell"));
                }
            }
        }
        let mut spacing = f64::INFINITY;
        for (i, a) in centers.iter().enumerate() {
            for b in &centers[i + 1..] {
                let mut d2 = 0.0;
                for k in 0..3 {
                    let mut d = (a[k] - b[k]).abs();
                    d = d.min(cell[k] - d);
                    d2 += d * d;
                }
                spacing = spacing.min(libm::sqrt(d2));
            }
        }
        if spacing < d_min {
            return Err(domain("centers closer than the minimum spacing"));
        }
        Ok(Self {
            cell,
            centers,
            potential,
            energy,
            min_spacing: spacing.min(cell[0]).min(cell[1]).min(cell[2]),
            max_path: 1e3 * cell.iter().fold(0.0f64, |m, l| m.max(*l)),
        })
    }

    /// `per_side^3` centers on a cubic lattice of the given spacing, each
    /// displaced uniformly by up to `jitter` along every axis.
    pub fn jittered_lattice(
        per_side: usize,
        spacing: f64,
        jitter: f64,
        potential: PotentialSpec,
        energy: f64,
        seed: u64,
    ) -> Result<Self> {
        if per_side == 0 || !(spacing > 0.0) || !(jitter >= 0.0) {
            return Err(domain("lattice needs positive size and spacing and non-negative jitter"));
        }
        let mut rng = stream(seed, 0);
        let mut centers = Vec::with_capacity(per_side.pow(3));
        for i in 0..per_side {
            for j in 0..per_side {
                for k in 0..per_side {
                    let mut c = [0.0; 3];
                    for (a, idx) in [i, j, k].into_iter().enumerate() {
                        c[a] = (idx as f64 + 0.5) * spacing + jitter * (2.0 * rng.random::<f64>() - 1.0);
                    }
                    centers.push(c);
                }
            }
        }
        let l = per_side as f64 * spacing;
        Self::new([l, l, l], centers, potential, energy, Self::DEFAULT_SPACING_FACTOR)
    }

    /// Free path length after which a trajectory without a further encounter
    /// is stopped.
    pub fn with_max_path(mut self, max_path: f64) -> Self {
        self.max_path = max_path;
        self
    }

    pub fn centers(&self) -> &[Vec3] {
        &self.centers
    }

    pub fn cell(&self) -> Vec3 {
        self.cell
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// Smallest distance between two centers, periodic images included.
    pub fn min_spacing(&self) -> f64 {
        self.min_spacing
    }

    /// Encounters along the trajectory that starts with `ray`.
    pub fn walk(&self, ray: &IncidentRay) -> Result<FlipperWalk<'_>> {
        if ray.center >= self.centers.len() {
            return Err(domain("incident ray names a center outside the scene"));
        }
        Ok(FlipperWalk {
            scene: self,
            deflection: Deflection::new(self.potential, self.energy)?,
            first: Some(*ray),
            position: [0.0; 3],
            direction: [0.0; 3],
            done: false,
        })
    }
}

/// Start of a trajectory, given at its first encounter: the center hit, the
/// incoming direction and the impact vector (perpendicular to the direction,
/// shorter than the action range).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncidentRay {
    pub center: usize,
    pub direction: Vec3,
    pub impact: Vec3,
}

/// Uniform incidence: a uniformly chosen center, an isotropic direction and a
/// uniform point on the disc of radius `r0` across the direction.
pub fn uniform_incidence(scene: &FlipperScene) -> Result<MeasureSpec<IncidentRay>> {
    let n = scene.centers.len();
    let r0 = scene.potential.action_range();
    let density = 1.0 / (n as f64 * 4.0 * PI * PI * r0 * r0);
    MeasureSpec::new(
        5,
        move |ray: &IncidentRay| {
            if ray.center < n && dot(&ray.impact, &ray.impact) < r0 * r0 {
                density
            } else {
                0.0
            }
        },
        move |rng: &mut dyn RngCore| {
            let center = rng.random_range(0..n);
            let direction = random_direction(rng);
            let (e1, e2) = transverse_frame(&direction);
            let rho = r0 * libm::sqrt(rng.random::<f64>());
            let phi = 2.0 * PI * rng.random::<f64>();
            let impact = axpy(rho * libm::cos(phi), &e1, &axpy(rho * libm::sin(phi), &e2, &[0.0; 3]));
            IncidentRay {
                center,
                direction,
                impact,
            }
        },
        1.0,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Encounter {
    pub center: usize,
    pub impact: f64,
    /// Polar scattering angle in `[0, pi]`.
    pub theta: f64,
    /// `theta` signed by the side of the impact vector in the local frame of
    /// the incoming direction; lies in `[-pi, pi]`.
    pub signed_theta: f64,
}

/// Outcome bin of a signed angle: bin `i` covers
/// `[-pi + 2 pi i / n, -pi + 2 pi (i + 1) / n)`, the last bin also takes `pi`.
pub fn angle_bin(signed_theta: f64, n_outcomes: usize) -> usize {
    let x = (signed_theta + PI) / (2.0 * PI) * n_outcomes as f64;
    (libm::floor(x).max(0.0) as usize).min(n_outcomes - 1)
}

/// Iterator over the encounters of one trajectory.
#[derive(Debug)]
pub struct FlipperWalk<'a> {
    scene: &'a FlipperScene,
    deflection: Deflection,
    first: Option<IncidentRay>,
    position: Vec3,
    direction: Vec3,
    done: bool,
}

impl FlipperWalk<'_> {
    fn scatter(&mut self, center_index: usize, center: Vec3, u: Vec3, impact: Vec3) -> Option<Encounter> {
        let s = libm::sqrt(dot(&impact, &impact));
        let theta = match self.deflection.angle(s) {
            Ok(t) => t,
            Err(_) => {
                self.done = true;
                return None;
            }
        };
        let (e1, e2) = transverse_frame(&u);
        let s_hat = if s > 0.0 {
            [impact[0] / s, impact[1] / s, impact[2] / s]
        } else {
            e1
        };
        let side = libm::atan2(dot(&s_hat, &e2), dot(&s_hat, &e1));
        let signed_theta = if side >= 0.0 { theta } else { -theta };
        let (sin_t, cos_t) = (libm::sin(theta), libm::cos(theta));
        self.direction = normalize(&axpy(cos_t, &u, &axpy(sin_t, &s_hat, &[0.0; 3])));
        // closest point of the outgoing asymptote, wrapped into the cell
        let p = axpy(-s * sin_t, &u, &axpy(s * cos_t, &s_hat, &center));
        for (a, x) in self.position.iter_mut().enumerate() {
            let l = self.scene.cell[a];
            *x = p[a] - l * libm::floor(p[a] / l);
        }
        Some(Encounter {
            center: center_index,
            impact: s,
            theta,
            signed_theta,
        })
    }

    /// Next center whose action range the current ray enters, as
    /// (index, unwrapped image position, distance along the ray).
    fn next_encounter(&self) -> Option<(usize, Vec3, f64)> {
        let scene = self.scene;
        let r0 = scene.potential.action_range();
        let (p, u) = (self.position, self.direction);
        let mut cell = [0i64; 3];
        let mut step = [0i64; 3];
        let mut t_max = [f64::INFINITY; 3];
        let mut t_delta = [f64::INFINITY; 3];
        for a in 0..3 {
            let l = scene.cell[a];
            cell[a] = libm::floor(p[a] / l) as i64;
            if u[a] > 0.0 {
                step[a] = 1;
                t_max[a] = ((cell[a] + 1) as f64 * l - p[a]) / u[a];
                t_delta[a] = l / u[a];
            } else if u[a] < 0.0 {
                step[a] = -1;
                t_max[a] = (cell[a] as f64 * l - p[a]) / u[a];
                t_delta[a] = -l / u[a];
            }
        }
        let eps = 1e-6 * r0;
        loop {
            let shift = [
                cell[0] as f64 * scene.cell[0],
                cell[1] as f64 * scene.cell[1],
                cell[2] as f64 * scene.cell[2],
            ];
            let mut best: Option<(usize, Vec3, f64)> = None;
            for (i, c) in scene.centers.iter().enumerate() {
                let image = [c[0] + shift[0], c[1] + shift[1], c[2] + shift[2]];
                let d = [image[0] - p[0], image[1] - p[1], image[2] - p[2]];
                let t_mid = dot(&d, &u);
                if t_mid <= eps {
                    continue;
                }
                let miss2 = dot(&d, &d) - t_mid * t_mid;
                if miss2 < r0 * r0 && best.is_none_or(|b| t_mid < b.2) {
                    best = Some((i, image, t_mid));
                }
            }
            if best.is_some() {
                return best;
            }
            let a = if t_max[0] <= t_max[1] && t_max[0] <= t_max[2] {
                0
            } else if t_max[1] <= t_max[2] {
                1
            } else {
                2
            };
            if t_max[a] > scene.max_path {
                return None;
            }
            cell[a] += step[a];
            t_max[a] += t_delta[a];
        }
    }
}

impl Iterator for FlipperWalk<'_> {
    type Item = Encounter;

    fn next(&mut self) -> Option<Encounter> {
        if self.done {
            return None;
        }
        if let Some(ray) = self.first.take() {
            let u = normalize(&ray.direction);
            // keep only the part of the impact vector across the direction
            let along = dot(&ray.impact, &u);
            let impact = axpy(-along, &u, &ray.impact);
            let center = self.scene.centers[ray.center];
            return self.scatter(ray.center, center, u, impact);
        }
        let Some((index, image, t_mid)) = self.next_encounter() else {
            self.done = true;
            return None;
        };
        let u = self.direction;
        let closest = axpy(t_mid, &u, &self.position);
        let impact = [closest[0] - image[0], closest[1] - image[1], closest[2] - image[2]];
        self.scatter(index, image, u, impact)
    }
}

/// Ensemble rates of the scattering-angle bins together with the cross
/// sections `<f_i> * pi r0^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlipperCrossSection {
    pub stats: RateStatistics,
    pub cross_section: Vec<f64>,
}

/// Each trajectory is followed for exactly `n_min_trials` encounters; those
/// that stop earlier (a free path beyond the scene's cap) are excluded.
pub fn flipper_cross_section(
    scene: &FlipperScene,
    source: &MeasureSpec<IncidentRay>,
    n_outcomes: usize,
    n_traj: usize,
    n_min_trials: usize,
    seed: u64,
) -> Result<FlipperCrossSection> {
    if n_min_trials == 0 {
        return Err(domain("at least one encounter per trajectory is required"));
    }
    let experiment = Experiment::every_event(n_outcomes, move |e: &Encounter| angle_bin(e.signed_theta, n_outcomes))?;
    let config = EnsembleConfig {
        n_traj,
        n_min_trials,
        horizon: n_min_trials,
        seed,
    };
    let stats = ensemble_statistics(
        source,
        |ray| scene.walk(ray).into_iter().flatten(),
        &experiment,
        config,
    )?;
    let r0 = scene.potential.action_range();
    let cross_section = stats.mean.iter().map(|f| f * PI * r0 * r0).collect();
    Ok(FlipperCrossSection { stats, cross_section })
}
