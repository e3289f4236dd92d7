//! A particle of mass `m1` decaying into two free particles `m2`, `m3`.
//!
//! Trajectories are straight in each sector; the decay vertex `(x_d, t_d)` is
//! fixed by requiring the action between the initial position of particle 1
//! and the final positions of the products to be minimal. Stationarity is
//! momentum conservation (three equations) and energy conservation (one
//! equation) at the vertex.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{Matrix4, SymmetricEigen, Vector4};

use crate::error::{domain, Error, Result};
use crate::numeric::{nelder_mead, CompensatedSum};
use crate::rng::stream;
use crate::tcore::{MeasureSpec, Segment, Trajectory};

pub type Vec3 = [f64; 3];

fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn norm2(a: &Vec3) -> f64 {
    a[0] * a[0] + a[1] * a[1] + a[2] * a[2]
}

/// Masses and the speed constant `c` entering the rest-energy terms.
///
/// `new` enforces `m1 > m2 + m3`; degenerate configurations for testing can
/// be written as struct literals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayMasses {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub c: f64,
}

impl DecayMasses {
    pub fn new(m1: f64, m2: f64, m3: f64, c: f64) -> Result<Self> {
        if !(m1 > 0.0 && m2 > 0.0 && m3 > 0.0 && c > 0.0) || ![m1, m2, m3, c].iter().all(|v| v.is_finite()) {
            return Err(domain("masses and c must be positive and finite"));
        }
        if !(m1 > m2 + m3) {
            return Err(domain("a decaying particle needs m1 > m2 + m3"));
        }
        Ok(Self { m1, m2, m3, c })
    }

    /// Rest energy released in the decay, `(m1 - m2 - m3) c^2`.
    pub fn released_energy(&self) -> f64 {
        (self.m1 - self.m2 - self.m3) * self.c * self.c
    }
}

/// Particle 1 at `x1` at time `t_i`; the products at `x2`, `x3` at `t_f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayBoundary {
    pub x1: Vec3,
    pub t_i: f64,
    pub x2: Vec3,
    pub x3: Vec3,
    pub t_f: f64,
}

impl DecayBoundary {
    pub fn new(x1: Vec3, t_i: f64, x2: Vec3, x3: Vec3, t_f: f64) -> Result<Self> {
        if !(t_f > t_i) {
            return Err(domain("final time must follow the initial time"));
        }
        Ok(Self { x1, t_i, x2, x3, t_f })
    }

    pub fn duration(&self) -> f64 {
        self.t_f - self.t_i
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayVertex {
    pub x_d: Vec3,
    pub t_d: f64,
}

impl DecayVertex {
    fn to_vector(self) -> Vector4<f64> {
        Vector4::new(self.x_d[0], self.x_d[1], self.x_d[2], self.t_d)
    }

    fn from_vector(z: &Vector4<f64>) -> Self {
        Self {
            x_d: [z[0], z[1], z[2]],
            t_d: z[3],
        }
    }
}

/// Pieces shared by the action and its derivatives.
struct Legs {
    a: f64,
    b: f64,
    u: Vec3,
    w2: Vec3,
    w3: Vec3,
}

fn legs(b: &DecayBoundary, v: &DecayVertex) -> Legs {
    Legs {
        a: v.t_d - b.t_i,
        b: b.t_f - v.t_d,
        u: sub(&v.x_d, &b.x1),
        w2: sub(&b.x2, &v.x_d),
        w3: sub(&b.x3, &v.x_d),
    }
}

fn interior(b: &DecayBoundary, v: &DecayVertex) -> Result<()> {
    if v.t_d > b.t_i && v.t_d < b.t_f {
        Ok(())
    } else {
        Err(domain("decay time must lie strictly between the boundary times"))
    }
}

fn action_unchecked(b: &DecayBoundary, m: &DecayMasses, v: &DecayVertex) -> f64 {
    let l = legs(b, v);
    let c2 = m.c * m.c;
    -m.m1 * c2 * l.a + 0.5 * m.m1 * norm2(&l.u) / l.a - (m.m2 + m.m3) * c2 * l.b
        + 0.5 * (m.m2 * norm2(&l.w2) + m.m3 * norm2(&l.w3)) / l.b
}

/// Action of the two-sector straight-line trajectory through `vertex`.
pub fn decay_action(boundary: &DecayBoundary, masses: &DecayMasses, vertex: &DecayVertex) -> Result<f64> {
    interior(boundary, vertex)?;
    Ok(action_unchecked(boundary, masses, vertex))
}

/// Left-hand sides of the momentum and energy conservation equations, i.e.
/// the gradient of the action with respect to `(x_d, t_d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservationResiduals {
    pub momentum: Vec3,
    pub energy: f64,
    /// Sum of the magnitudes of the momentum terms.
    pub momentum_scale: f64,
    /// Sum of the magnitudes of the energy terms.
    pub energy_scale: f64,
}

impl ConservationResiduals {
    /// Largest residual component relative to the size of its terms.
    pub fn scaled(&self) -> f64 {
        let p = libm::sqrt(norm2(&self.momentum)) / self.momentum_scale.max(f64::MIN_POSITIVE);
        let e = self.energy.abs() / self.energy_scale.max(f64::MIN_POSITIVE);
        p.max(e)
    }

    fn gradient(&self) -> Vector4<f64> {
        Vector4::new(self.momentum[0], self.momentum[1], self.momentum[2], self.energy)
    }
}

/// Residuals at `vertex`, which must lie strictly inside the time interval
/// (the terms diverge at its ends).
pub fn conservation_residuals(boundary: &DecayBoundary, masses: &DecayMasses, vertex: &DecayVertex) -> ConservationResiduals {
    let l = legs(boundary, vertex);
    let DecayMasses { m1, m2, m3, c } = *masses;
    let c2 = c * c;
    let mut momentum = [0.0; 3];
    for k in 0..3 {
        momentum[k] = m1 * l.u[k] / l.a - m2 * l.w2[k] / l.b - m3 * l.w3[k] / l.b;
    }
    let k1 = 0.5 * m1 * norm2(&l.u) / (l.a * l.a);
    let k23 = 0.5 * (m2 * norm2(&l.w2) + m3 * norm2(&l.w3)) / (l.b * l.b);
    let energy = -m1 * c2 - k1 + (m2 + m3) * c2 + k23;
    ConservationResiduals {
        momentum,
        energy,
        momentum_scale: (m1 * libm::sqrt(norm2(&l.u)) / l.a)
            + (m2 * libm::sqrt(norm2(&l.w2)) + m3 * libm::sqrt(norm2(&l.w3))) / l.b,
        energy_scale: (m1 + m2 + m3) * c2 + k1 + k23,
    }
}

/// Analytic Hessian of the action in `(x_d, t_d)`.
pub fn action_hessian(boundary: &DecayBoundary, masses: &DecayMasses, vertex: &DecayVertex) -> Matrix4<f64> {
    let l = legs(boundary, vertex);
    let DecayMasses { m1, m2, m3, .. } = *masses;
    let mut h = Matrix4::zeros();
    let xx = m1 / l.a + (m2 + m3) / l.b;
    for k in 0..3 {
        h[(k, k)] = xx;
        let xt = -m1 * l.u[k] / (l.a * l.a) - (m2 * l.w2[k] + m3 * l.w3[k]) / (l.b * l.b);
        h[(k, 3)] = xt;
        h[(3, k)] = xt;
    }
    h[(3, 3)] = m1 * norm2(&l.u) / (l.a * l.a * l.a) + (m2 * norm2(&l.w2) + m3 * norm2(&l.w3)) / (l.b * l.b * l.b);
    h
}

/// Slope of the action, minimized over `x_d`, as the decay time approaches
/// `t_i`. The action is jointly convex in `(x_d, t_d)` and grows without
/// bound towards `t_f` when the products end apart, so an interior minimum
/// exists exactly when this slope is negative.
pub fn initial_action_slope(boundary: &DecayBoundary, masses: &DecayMasses) -> f64 {
    let t = boundary.duration();
    let DecayMasses { m1, m2, m3, .. } = *masses;
    let w2 = sub(&boundary.x2, &boundary.x1);
    let w3 = sub(&boundary.x3, &boundary.x1);
    let p = [
        (m2 * w2[0] + m3 * w3[0]) / t,
        (m2 * w2[1] + m3 * w3[1]) / t,
        (m2 * w2[2] + m3 * w3[2]) / t,
    ];
    let k23 = 0.5 * (m2 * norm2(&w2) + m3 * norm2(&w3)) / (t * t);
    -masses.released_energy() - norm2(&p) / (2.0 * m1) + k23
}

/// Solver output with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecaySolution {
    pub vertex: DecayVertex,
    pub action: f64,
    pub residuals: ConservationResiduals,
    /// Smallest eigenvalue of the finite-difference Hessian of the action.
    pub min_hessian_eigenvalue: f64,
    /// Multistart seed that produced the vertex, or `None` for the simplex
    /// fallback.
    pub start_index: Option<usize>,
}

const N_STARTS: usize = 8;
const RESIDUAL_TOL: f64 = 1e-9;

pub fn solve_decay_vertex(boundary: &DecayBoundary, masses: &DecayMasses) -> Result<DecayVertex> {
    Ok(solve_decay_vertex_detailed(boundary, masses)?.vertex)
}

pub fn solve_decay_vertex_detailed(boundary: &DecayBoundary, masses: &DecayMasses) -> Result<DecaySolution> {
    if !(boundary.t_f > boundary.t_i) {
        return Err(domain("final time must follow the initial time"));
    }
    let slope = initial_action_slope(boundary, masses);
    if slope >= 0.0 {
        return Err(Error::NoSolution(format!(
            "the products carry more kinetic energy than the decay can supply (initial action slope {slope:.3e})"
        )));
    }
    let t = boundary.duration();
    let msum = masses.m2 + masses.m3;
    let centroid = [
        (masses.m2 * boundary.x2[0] + masses.m3 * boundary.x3[0]) / msum,
        (masses.m2 * boundary.x2[1] + masses.m3 * boundary.x3[1]) / msum,
        (masses.m2 * boundary.x2[2] + masses.m3 * boundary.x3[2]) / msum,
    ];
    let seed = |k: usize| {
        let f = (k as f64 + 0.5) / N_STARTS as f64;
        let x_d = [
            boundary.x1[0] + f * (centroid[0] - boundary.x1[0]),
            boundary.x1[1] + f * (centroid[1] - boundary.x1[1]),
            boundary.x1[2] + f * (centroid[2] - boundary.x1[2]),
        ];
        DecayVertex {
            x_d,
            t_d: boundary.t_i + f * t,
        }
    };

    let mut best: Option<(DecayVertex, f64, Option<usize>)> = None;
    for k in 0..N_STARTS {
        if let Some(v) = newton(boundary, masses, seed(k)) {
            let s = action_unchecked(boundary, masses, &v);
            if best.is_none_or(|(_, bs, _)| s < bs) {
                best = Some((v, s, Some(k)));
            }
        }
    }
    if best.is_none() {
        best = simplex_fallback(boundary, masses, seed(N_STARTS / 2)).map(|v| (v, action_unchecked(boundary, masses, &v), None));
    }
    let Some((vertex, action, start_index)) = best else {
        return Err(Error::NoSolution(
            "Newton iterations failed from every start and the simplex fallback did not converge".into(),
        ));
    };
    let margin = 1e-12 * t;
    if !(vertex.t_d > boundary.t_i + margin && vertex.t_d < boundary.t_f - margin) {
        return Err(Error::NoSolution(format!("decay time {} left the boundary interval", vertex.t_d)));
    }
    let residuals = conservation_residuals(boundary, masses, &vertex);
    let min_eig = finite_difference_min_eigenvalue(boundary, masses, &vertex);
    let scale = action_hessian(boundary, masses, &vertex).abs().max().max(1.0);
    if min_eig < -1e-8 * scale {
        return Err(Error::NotAMinimum(min_eig));
    }
    Ok(DecaySolution {
        vertex,
        action,
        residuals,
        min_hessian_eigenvalue: min_eig,
        start_index,
    })
}

/// Damped Newton on the stationarity system, keeping `t_d` inside the
/// boundary interval.
fn newton(b: &DecayBoundary, m: &DecayMasses, start: DecayVertex) -> Option<DecayVertex> {
    let mut z = start.to_vector();
    for _ in 0..100 {
        let v = DecayVertex::from_vector(&z);
        let r = conservation_residuals(b, m, &v);
        if r.scaled() < 1e-13 {
            return Some(v);
        }
        let g = r.gradient();
        let step = action_hessian(b, m, &v).lu().solve(&(-g))?;
        let mut alpha: f64 = 1.0;
        if step[3] < 0.0 {
            alpha = alpha.min(0.9 * (v.t_d - b.t_i) / -step[3]);
        } else if step[3] > 0.0 {
            alpha = alpha.min(0.9 * (b.t_f - v.t_d) / step[3]);
        }
        let s0 = action_unchecked(b, m, &v);
        let descent = g.dot(&step);
        let slack = 1e-14 * s0.abs().max(1.0);
        loop {
            let trial = DecayVertex::from_vector(&(z + step * alpha));
            if action_unchecked(b, m, &trial) <= s0 + 1e-4 * alpha * descent + slack {
                break;
            }
            alpha *= 0.5;
            if alpha < 1e-12 {
                break;
            }
        }
        let next = z + step * alpha;
        if (next - z).amax() <= 1e-16 * z.amax().max(1.0) {
            break;
        }
        z = next;
    }
    let v = DecayVertex::from_vector(&z);
    (v.t_d > b.t_i && v.t_d < b.t_f && conservation_residuals(b, m, &v).scaled() < RESIDUAL_TOL).then_some(v)
}

fn simplex_fallback(b: &DecayBoundary, m: &DecayMasses, start: DecayVertex) -> Option<DecayVertex> {
    let t = b.duration();
    let span = norm2(&sub(&b.x2, &b.x1)).max(norm2(&sub(&b.x3, &b.x1))).max(f64::MIN_POSITIVE);
    let dx = 0.1 * libm::sqrt(span);
    let f = |p: &[f64]| {
        let v = DecayVertex {
            x_d: [p[0], p[1], p[2]],
            t_d: p[3],
        };
        if v.t_d > b.t_i && v.t_d < b.t_f {
            action_unchecked(b, m, &v)
        } else {
            f64::INFINITY
        }
    };
    let s = start.to_vector();
    let (p, _) = nelder_mead(f, s.as_slice(), &[dx, dx, dx, 0.1 * t], 1e-15, 20_000);
    let v = DecayVertex {
        x_d: [p[0], p[1], p[2]],
        t_d: p[3],
    };
    newton(b, m, v)
}

/// Smallest eigenvalue of the Hessian of the action obtained by central
/// differences of the conservation residuals.
pub fn finite_difference_min_eigenvalue(b: &DecayBoundary, m: &DecayMasses, v: &DecayVertex) -> f64 {
    let z = v.to_vector();
    let t = b.duration();
    let len = libm::sqrt(norm2(&sub(&b.x2, &b.x1)).max(norm2(&sub(&b.x3, &b.x1))).max(norm2(&sub(&v.x_d, &b.x1))));
    let h = [1e-6 * len.max(1e-300), 1e-6 * len.max(1e-300), 1e-6 * len.max(1e-300), 1e-6 * t];
    let mut hess = Matrix4::zeros();
    for j in 0..4 {
        let mut zp = z;
        let mut zm = z;
        zp[j] += h[j];
        zm[j] -= h[j];
        let gp = conservation_residuals(b, m, &DecayVertex::from_vector(&zp)).gradient();
        let gm = conservation_residuals(b, m, &DecayVertex::from_vector(&zm)).gradient();
        let col = (gp - gm) / (2.0 * h[j]);
        hess.set_column(j, &col);
    }
    let sym = (hess + hess.transpose()) * 0.5;
    SymmetricEigen::new(sym).eigenvalues.min()
}

/// Builds a boundary whose minimizing vertex is known: particle 1 leaves
/// `x1` at `t_i` with velocity `v1` and decays at `t_d`; the products
/// separate along `direction` with the relative momentum fixed by momentum
/// and energy conservation, and are observed at `t_f`.
pub fn boundary_from_decay(
    masses: &DecayMasses,
    x1: Vec3,
    v1: Vec3,
    t_i: f64,
    t_d: f64,
    t_f: f64,
    direction: Vec3,
) -> Result<(DecayBoundary, DecayVertex)> {
    if !(t_i < t_d && t_d < t_f) {
        return Err(domain("need t_i < t_d < t_f"));
    }
    let n = libm::sqrt(norm2(&direction));
    if !(n > 0.0) {
        return Err(domain("separation direction must be non-zero"));
    }
    let DecayMasses { m1, m2, m3, .. } = *masses;
    let msum = m2 + m3;
    let reduced = m2 * m3 / msum;
    // kinetic energy of relative motion left after momentum conservation
    let relative = masses.released_energy() + 0.5 * m1 * norm2(&v1) * (1.0 - m1 / msum);
    if !(relative > 0.0) {
        return Err(domain("particle 1 is too fast for this decay to conserve energy"));
    }
    let p = libm::sqrt(2.0 * reduced * relative);
    let x_d = [
        x1[0] + v1[0] * (t_d - t_i),
        x1[1] + v1[1] * (t_d - t_i),
        x1[2] + v1[2] * (t_d - t_i),
    ];
    let mut x2 = [0.0; 3];
    let mut x3 = [0.0; 3];
    for k in 0..3 {
        let cm = m1 * v1[k] / msum;
        let dir = direction[k] / n;
        x2[k] = x_d[k] + (cm + p * dir / m2) * (t_f - t_d);
        x3[k] = x_d[k] + (cm - p * dir / m3) * (t_f - t_d);
    }
    Ok((DecayBoundary { x1, t_i, x2, x3, t_f }, DecayVertex { x_d, t_d }))
}

/// The straight two-sector trajectory through `vertex`: particle 1 in sector
/// 1 (three coordinates), then both products in sector 2 (six coordinates).
pub fn decay_trajectory(boundary: &DecayBoundary, vertex: &DecayVertex) -> Result<Trajectory> {
    interior(boundary, vertex)?;
    let l = legs(boundary, vertex);
    let before = Segment::affine(
        boundary.t_i,
        vertex.t_d,
        boundary.x1.to_vec(),
        l.u.iter().map(|x| x / l.a).collect(),
    )
    .with_sector(1);
    let mut origin = vertex.x_d.to_vec();
    origin.extend_from_slice(&vertex.x_d);
    let velocity: Vec<f64> = l.w2.iter().chain(&l.w3).map(|x| x / l.b).collect();
    let after = Segment::affine(vertex.t_d, boundary.t_f, origin, velocity).with_sector(2);
    Trajectory::new(vec![before, after])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanLife {
    pub tau: f64,
    pub standard_error: f64,
    pub n_samples: usize,
}

/// Monte Carlo estimate of the mean decay time under a normalized measure on
/// decay times; sample `i` is drawn from stream `(seed, i)`.
pub fn mean_life(decay_time_measure: &MeasureSpec<f64>, n_samples: usize, seed: u64) -> Result<MeanLife> {
    let mass = decay_time_measure.total_mass();
    if (mass - 1.0).abs() > 1e-9 {
        return Err(Error::DegenerateMeasure(mass));
    }
    if n_samples == 0 {
        return Err(domain("mean life needs at least one sample"));
    }
    let samples: Vec<f64> = (0..n_samples)
        .map(|i| decay_time_measure.sample(&mut stream(seed, i as u64)))
        .collect();
    if samples.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
        return Err(domain("decay times must be finite and non-negative"));
    }
    let n = n_samples as f64;
    let mut sum = CompensatedSum::default();
    samples.iter().for_each(|t| sum.add(*t));
    let tau = sum.value() / n;
    let mut sq = CompensatedSum::default();
    samples.iter().for_each(|t| sq.add((t - tau) * (t - tau)));
    let standard_error = if n_samples > 1 {
        libm::sqrt(sq.value() / (n - 1.0) / n)
    } else {
        0.0
    };
    Ok(MeanLife {
        tau,
        standard_error,
        n_samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tcore::{check_determinism, DeterminismCheck};
    use proptest::prelude::*;

    fn masses() -> DecayMasses {
        DecayMasses::new(1.0, 0.3, 0.4, 1.0).unwrap()
    }

    fn fd_gradient(b: &DecayBoundary, m: &DecayMasses, v: &DecayVertex) -> [f64; 4] {
        let z = v.to_vector();
        let mut g = [0.0; 4];
        for (j, gj) in g.iter_mut().enumerate() {
            let h = 1e-5;
            let (mut zp, mut zm) = (z, z);
            zp[j] += h;
            zm[j] -= h;
            *gj = (action_unchecked(b, m, &DecayVertex::from_vector(&zp))
                - action_unchecked(b, m, &DecayVertex::from_vector(&zm)))
                / (2.0 * h);
        }
        g
    }

    #[test]
    fn degenerate_decay_action_is_vertex_independent() {
        let m = DecayMasses {
            m1: 2.0,
            m2: 2.0,
            m3: 0.0,
            c: 3.0,
        };
        let b = DecayBoundary::new([0.0; 3], 0.0, [4.0, 2.0, 0.0], [9.0, 9.0, 9.0], 2.0).unwrap();
        let line = |t: f64| DecayVertex {
            x_d: [2.0 * t, t, 0.0],
            t_d: t,
        };
        let straight = -2.0 * 9.0 * 2.0 + 0.5 * 2.0 * 20.0 / 2.0;
        for t in [0.1, 0.7, 1.9] {
            assert!((decay_action(&b, &m, &line(t)).unwrap() - straight).abs() < 1e-12);
        }
    }

    #[test]
    fn action_is_linear_in_masses() {
        let m = masses();
        let m2 = DecayMasses {
            m1: 2.0 * m.m1,
            m2: 2.0 * m.m2,
            m3: 2.0 * m.m3,
            c: m.c,
        };
        let b = DecayBoundary::new([0.1, 0.2, 0.3], 0.0, [1.0, 0.0, 0.0], [-1.0, 0.5, 0.0], 3.0).unwrap();
        let v = DecayVertex {
            x_d: [0.0, 0.1, 0.2],
            t_d: 1.3,
        };
        let s1 = decay_action(&b, &m, &v).unwrap();
        let s2 = decay_action(&b, &m2, &v).unwrap();
        assert!((s2 - 2.0 * s1).abs() < 1e-12 * s1.abs());
    }

    #[test]
    fn endpoint_vertex_is_rejected() {
        let b = DecayBoundary::new([0.0; 3], 0.0, [1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], 1.0).unwrap();
        let v = DecayVertex { x_d: [0.0; 3], t_d: 0.0 };
        assert!(decay_action(&b, &masses(), &v).is_err());
    }

    #[test]
    fn symmetric_closed_form() {
        let m = DecayMasses::new(1.0, 0.3, 0.3, 1.0).unwrap();
        let (d, t) = (0.5, 4.0);
        let b = DecayBoundary::new([0.0; 3], 0.0, [d, 0.0, 0.0], [-d, 0.0, 0.0], t).unwrap();
        let sol = solve_decay_vertex_detailed(&b, &m).unwrap();
        let expected = t - d * libm::sqrt(0.6 / (2.0 * 0.4));
        assert!((sol.vertex.t_d - expected).abs() < 1e-9);
        assert!(norm2(&sol.vertex.x_d) < 1e-18);
        let perturbed = DecayVertex {
            x_d: [0.01, 0.0, 0.0],
            t_d: expected - 0.05,
        };
        assert!(sol.action < decay_action(&b, &m, &perturbed).unwrap());
    }

    #[test]
    fn analytic_gradient_and_hessian_match_finite_differences() {
        let m = masses();
        let b = DecayBoundary::new([0.1, 0.2, 0.3], 0.0, [1.0, 0.4, 0.0], [-1.0, 0.5, 0.2], 3.0).unwrap();
        let v = DecayVertex {
            x_d: [0.2, 0.1, 0.2],
            t_d: 1.3,
        };
        let r = conservation_residuals(&b, &m, &v);
        let g = fd_gradient(&b, &m, &v);
        for (a, f) in r.gradient().iter().zip(g) {
            assert!((a - f).abs() < 1e-6 * a.abs().max(1e-3));
        }
        let h = action_hessian(&b, &m, &v);
        let eig = SymmetricEigen::new(h).eigenvalues.min();
        assert!((eig - finite_difference_min_eigenvalue(&b, &m, &v)).abs() < 1e-6);
        assert!(eig > 0.0);
    }

    #[test]
    fn energy_residual_grows_linearly_off_solution() {
        let m = masses();
        let (b, v) = boundary_from_decay(&m, [0.0; 3], [0.1, 0.0, 0.0], 0.0, 1.0, 2.5, [0.0, 1.0, 0.3]).unwrap();
        let e = |dt: f64| {
            conservation_residuals(
                &b,
                &m,
                &DecayVertex {
                    x_d: v.x_d,
                    t_d: v.t_d + dt,
                },
            )
            .energy
        };
        let slope = (e(1e-6) - e(-1e-6)) / 2e-6;
        for dt in [1e-5, 2e-5, 4e-5] {
            assert!((e(dt) / dt - slope).abs() < 1e-3 * slope.abs());
        }
    }

    #[test]
    fn infeasible_boundary_reports_no_solution() {
        // products too far apart for the released energy
        let b = DecayBoundary::new([0.0; 3], 0.0, [100.0, 0.0, 0.0], [-100.0, 0.0, 0.0], 1.0).unwrap();
        assert!(matches!(solve_decay_vertex(&b, &masses()), Err(Error::NoSolution(_))));
    }

    #[test]
    fn scale_invariance() {
        let m = masses();
        let (b, _) = boundary_from_decay(&m, [0.3, 0.0, 0.0], [0.1, 0.2, 0.0], 0.0, 0.6, 1.0, [1.0, 1.0, 0.0]).unwrap();
        let alpha = 7.5;
        let scale = |x: Vec3| [alpha * x[0], alpha * x[1], alpha * x[2]];
        let bs = DecayBoundary::new(scale(b.x1), 0.0, scale(b.x2), scale(b.x3), alpha * b.t_f).unwrap();
        let r1 = solve_decay_vertex(&b, &m).unwrap().t_d / b.t_f;
        let r2 = solve_decay_vertex(&bs, &m).unwrap().t_d / bs.t_f;
        assert!((r1 - r2).abs() < 1e-10);
    }

    #[test]
    fn shared_initial_data_different_futures() {
        let m = masses();
        let v1 = [0.2, -0.1, 0.05];
        let (b1, _) = boundary_from_decay(&m, [0.0; 3], v1, 0.0, 0.8, 2.0, [0.0, 1.0, 0.0]).unwrap();
        let (b2, _) = boundary_from_decay(&m, [0.0; 3], v1, 0.0, 1.4, 2.5, [1.0, 0.0, 1.0]).unwrap();
        let s1 = solve_decay_vertex(&b1, &m).unwrap();
        let s2 = solve_decay_vertex(&b2, &m).unwrap();
        assert!((s2.t_d - s1.t_d).abs() > 0.1);
        let tr = [decay_trajectory(&b1, &s1).unwrap(), decay_trajectory(&b2, &s2).unwrap()];
        // the sector-1 segments carry the same initial velocity
        let a = tr[0].evaluate(0.5).unwrap();
        let b = tr[1].evaluate(0.5).unwrap();
        assert!(a.distance(&b) < 1e-12);
        let check = DeterminismCheck {
            window: 0.3,
            tolerance: 1e-9,
            grid_step: 0.01,
        };
        assert!(!check_determinism(&tr, check));
    }

    #[test]
    fn mean_life_examples() {
        let point = mean_life(&MeasureSpec::point_mass(2.0).unwrap(), 100, 1).unwrap();
        assert_eq!(point.tau, 2.0);
        let u = mean_life(&MeasureSpec::uniform(0.0, 2.0).unwrap(), 20_000, 2).unwrap();
        assert!((u.tau - 1.0).abs() < 3.0 * u.standard_error);
        let unnormalized = MeasureSpec::new(1, |_: &f64| 1.0, |_: &mut dyn rand::RngCore| 1.0, 3.0).unwrap();
        assert!(mean_life(&unnormalized, 10, 0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn solver_recovers_generating_vertex(
            x in prop::array::uniform3(-1.0f64..1.0),
            v in prop::array::uniform3(-0.3f64..0.3),
            dir in prop::array::uniform3(-1.0f64..1.0),
            td in 0.1f64..0.9,
            tf in 1.0f64..3.0,
        ) {
            prop_assume!(norm2(&dir) > 1e-2);
            let m = masses();
            let (b, truth) = boundary_from_decay(&m, x, v, 0.0, td * tf, tf, dir).unwrap();
            let sol = solve_decay_vertex_detailed(&b, &m).unwrap();
            prop_assert!(sol.residuals.scaled() < 1e-9);
            prop_assert!((sol.vertex.t_d - truth.t_d).abs() < 1e-8 * tf);
            for k in 0..3 {
                prop_assert!((sol.vertex.x_d[k] - truth.x_d[k]).abs() < 1e-8);
            }
            let g = fd_gradient(&b, &m, &sol.vertex);
            prop_assert!(g.iter().all(|c| c.abs() < 1e-6));
            prop_assert!(sol.min_hessian_eigenvalue > -1e-8);
        }
    }
}
