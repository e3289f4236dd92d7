//! Spin trajectories through a Stern-Gerlach magnet.
//!
//! The beam runs along `+x`. Between the entry plane `x = entry` and the exit
//! plane `x = exit` the field is `B = (b0 + g n.r) n` with `n` perpendicular
//! to the beam; elsewhere it vanishes. On entering the field the spin variable
//! aligns with `B` with either sign, and the particle then moves under the
//! force `-+ mu grad|B|`. Outside the field the spin variable is held
//! constant.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::spinor::{align_spin, rayleigh_quotient, SpinVariable, Vec3};
use crate::error::{domain, Error, Result};
use crate::tcore::{BranchId, Segment, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinConstants {
    /// Magnetic moment; `hbar`, `e`, `m_e` and `c` enter only through it.
    pub mu: f64,
    pub mass: f64,
}

impl SpinConstants {
    pub fn new(mu: f64, mass: f64) -> Result<Self> {
        if !(mu > 0.0 && mass > 0.0 && mu.is_finite() && mass.is_finite()) {
            return Err(domain("magnetic moment and mass must be positive"));
        }
        Ok(Self { mu, mass })
    }
}

/// A static magnetic field with the gradient of its magnitude.
pub trait FieldMap {
    fn field(&self, x: &Vec3) -> Vec3;
    fn grad_abs(&self, x: &Vec3) -> Vec3;
}

fn norm(v: &Vec3) -> f64 {
    libm::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
}

fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Largest relative deviation between `grad_abs` and central differences of
/// `|B|` at `x`.
pub fn gradient_check(field: &dyn FieldMap, x: &Vec3, h: f64) -> f64 {
    let g = field.grad_abs(x);
    let scale = norm(&g).max(f64::MIN_POSITIVE);
    let mut worst: f64 = 0.0;
    for k in 0..3 {
        let (mut p, mut m) = (*x, *x);
        p[k] += h;
        m[k] -= h;
        let fd = (norm(&field.field(&p)) - norm(&field.field(&m))) / (2.0 * h);
        worst = worst.max((fd - g[k]).abs() / scale);
    }
    worst
}

/// `L = m v^2 / 2 - mu <s|sigma.B|s> / <s|s>`.
pub fn spin_lagrangian(
    x_dot: &Vec3,
    x: &Vec3,
    s: &SpinVariable,
    field: &dyn FieldMap,
    constants: &SpinConstants,
) -> f64 {
    0.5 * constants.mass * dot(x_dot, x_dot) - constants.mu * rayleigh_quotient(&s.components(), &field.field(x))
}

/// Action of a discretized path: kinetic term per interval, potential by
/// the trapezoid rule with the spin value attached to each node. Spins need
/// not be normalized.
pub fn spin_action(
    times: &[f64],
    positions: &[Vec3],
    spins: &[[Complex64; 2]],
    field: &dyn FieldMap,
    constants: &SpinConstants,
) -> Result<f64> {
    if times.len() < 2 || positions.len() != times.len() || spins.len() != times.len() {
        return Err(domain("need matching times, positions and spins, at least two nodes"));
    }
    let potential = |k: usize| constants.mu * rayleigh_quotient(&spins[k], &field.field(&positions[k]));
    let mut s = 0.0;
    for k in 0..times.len() - 1 {
        let dt = times[k + 1] - times[k];
        if !(dt > 0.0) {
            return Err(domain("times must increase"));
        }
        let d = [
            positions[k + 1][0] - positions[k][0],
            positions[k + 1][1] - positions[k][1],
            positions[k + 1][2] - positions[k][2],
        ];
        s += 0.5 * constants.mass * dot(&d, &d) / dt - 0.5 * dt * (potential(k) + potential(k + 1));
    }
    Ok(s)
}

/// Uniform-gradient magnet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgDevice {
    entry: f64,
    exit: f64,
    screen: f64,
    orientation: Vec3,
    b0: f64,
    gradient: f64,
}

impl SgDevice {
    pub fn new(entry: f64, exit: f64, screen: f64, orientation: Vec3, b0: f64, gradient: f64) -> Result<Self> {
        if !(entry < exit && exit < screen) {
            return Err(domain("need entry < exit < screen along the beam"));
        }
        let n = norm(&orientation);
        if !(n > 0.0 && n.is_finite()) {
            return Err(domain("field orientation must be non-zero"));
        }
        let o = [orientation[0] / n, orientation[1] / n, orientation[2] / n];
        if o[0].abs() > 1e-12 {
            return Err(domain("field orientation must be perpendicular to the beam"));
        }
        if !(b0.is_finite() && gradient.is_finite()) {
            return Err(domain("field parameters must be finite"));
        }
        Ok(Self {
            entry,
            exit,
            screen,
            orientation: [0.0, o[1], o[2]],
            b0,
            gradient,
        })
    }

    /// Device whose field points along `(0, sin(angle), cos(angle))`.
    pub fn in_plane(entry: f64, exit: f64, screen: f64, angle: f64, b0: f64, gradient: f64) -> Result<Self> {
        Self::new(entry, exit, screen, [0.0, libm::sin(angle), libm::cos(angle)], b0, gradient)
    }

    pub fn orientation(&self) -> Vec3 {
        self.orientation
    }

    pub fn entry(&self) -> f64 {
        self.entry
    }

    pub fn exit(&self) -> f64 {
        self.exit
    }

    pub fn screen(&self) -> f64 {
        self.screen
    }

    pub fn gradient(&self) -> f64 {
        self.gradient
    }

    fn inside(&self, x: &Vec3) -> bool {
        x[0] >= self.entry && x[0] <= self.exit
    }

    /// Signed field strength `b0 + g n.r` inside the magnet.
    fn strength(&self, x: &Vec3) -> f64 {
        self.b0 + self.gradient * dot(&self.orientation, x)
    }
}

impl FieldMap for SgDevice {
    fn field(&self, x: &Vec3) -> Vec3 {
        if !self.inside(x) {
            return [0.0; 3];
        }
        let b = self.strength(x);
        [b * self.orientation[0], b * self.orientation[1], b * self.orientation[2]]
    }

    fn grad_abs(&self, x: &Vec3) -> Vec3 {
        let b = self.strength(x);
        if !self.inside(x) || b == 0.0 {
            return [0.0; 3];
        }
        let g = self.gradient * b.signum();
        [g * self.orientation[0], g * self.orientation[1], g * self.orientation[2]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub t: f64,
    pub x: Vec3,
    pub v: Vec3,
}

/// One spin-sign continuation through the magnet.
#[derive(Debug, Clone, PartialEq)]
pub struct SgBranch {
    /// `+1` when the spin aligned with eigenvalue `+|B|`, else `-1`.
    pub sign: i32,
    pub spin: SpinVariable,
    /// Coordinates `(x, y, z, Re s_up, Im s_up, Re s_down, Im s_down)`.
    pub trajectory: Trajectory,
    /// Just inside the entry plane and just inside the exit plane.
    pub entry: PhasePoint,
    pub exit: PhasePoint,
    pub screen: PhasePoint,
    pub transit_time: f64,
    /// Displacement along the field orientation at the exit plane relative
    /// to the field-free continuation.
    pub deflection: f64,
}

impl SgBranch {
    /// `m v^2 / 2 + sign mu |B|` at a phase point inside the field, or just
    /// the kinetic energy outside it.
    pub fn energy(&self, device: &SgDevice, constants: &SpinConstants, p: &PhasePoint, in_field: bool) -> f64 {
        let kinetic = 0.5 * constants.mass * dot(&p.v, &p.v);
        if in_field {
            kinetic + self.sign as f64 * constants.mu * device.strength(&p.x).abs()
        } else {
            kinetic
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SgBranches {
    pub plus: SgBranch,
    pub minus: SgBranch,
}

const INSIDE_SAMPLES: usize = 64;

fn config(x: &Vec3, s: &SpinVariable) -> Vec<f64> {
    let mut c = x.to_vec();
    c.extend_from_slice(&s.coordinates());
    c
}

fn branch(
    x0: &Vec3,
    v0: &Vec3,
    s_in: &SpinVariable,
    device: &SgDevice,
    constants: &SpinConstants,
    sign: i32,
) -> Result<SgBranch> {
    let m = constants.mass;
    let sg = sign as f64;
    let n = device.orientation;

    let t_a = (device.entry - x0[0]) / v0[0];
    let mut x_a = [x0[0] + v0[0] * t_a, x0[1] + v0[1] * t_a, x0[2] + v0[2] * t_a];
    x_a[0] = device.entry;
    let b_a = device.field(&x_a);
    let (s_plus, s_minus) = align_spin(s_in, &b_a)?;
    let spin = if sign > 0 { s_plus } else { s_minus };
    let strength_a = device.strength(&x_a);

    // the potential step at the entry plane acts along the beam only
    let vx2 = v0[0] * v0[0] - 2.0 * sg * constants.mu * strength_a.abs() / m;
    if !(vx2 > 0.0) {
        return Err(domain("particle is reflected at the field entry"));
    }
    let v_in = [libm::sqrt(vx2), v0[1], v0[2]];
    let tau = (device.exit - device.entry) / v_in[0];
    let acc = -sg * constants.mu * device.gradient * strength_a.signum() / m;
    let a = [0.0, acc * n[1], acc * n[2]];
    let at = |t: f64| -> (Vec3, Vec3) {
        let mut x = [0.0; 3];
        let mut v = [0.0; 3];
        for k in 0..3 {
            x[k] = x_a[k] + v_in[k] * t + 0.5 * a[k] * t * t;
            v[k] = v_in[k] + a[k] * t;
        }
        x[0] = device.entry + v_in[0] * t;
        (x, v)
    };
    // |B| must not pass through zero inside the magnet
    let q = |t: f64| device.strength(&at(t).0);
    let mut crit = vec![0.0, tau];
    let vn = dot(&v_in, &n);
    if acc != 0.0 {
        let t_star = -vn / acc;
        if t_star > 0.0 && t_star < tau {
            crit.push(t_star);
        }
    }
    if crit.iter().any(|t| q(*t) * strength_a <= 0.0) {
        return Err(Error::NoAlignment);
    }
    let (mut x_b, v_b) = at(tau);
    x_b[0] = device.exit;
    let vx_out2 = v_b[0] * v_b[0] + 2.0 * sg * constants.mu * device.strength(&x_b).abs() / m;
    if !(vx_out2 > 0.0) {
        return Err(domain("particle is reflected at the field exit"));
    }
    let v_out = [libm::sqrt(vx_out2), v_b[1], v_b[2]];
    let t_b = t_a + tau;
    let dt_s = (device.screen - device.exit) / v_out[0];
    let x_s = [device.screen, x_b[1] + v_out[1] * dt_s, x_b[2] + v_out[2] * dt_s];
    let free = [x_a[0] + v_in[0] * tau, x_a[1] + v_in[1] * tau, x_a[2] + v_in[2] * tau];
    let deflection = dot(&n, &[x_b[0] - free[0], x_b[1] - free[1], x_b[2] - free[2]]);

    let zero_spin = [0.0; 4];
    let mut vel_before = v0.to_vec();
    vel_before.extend_from_slice(&zero_spin);
    let before = Segment::affine(0.0, t_a, config(x0, s_in), vel_before);
    let mut times = Vec::with_capacity(INSIDE_SAMPLES + 1);
    let mut points = Vec::with_capacity(INSIDE_SAMPLES + 1);
    for k in 0..=INSIDE_SAMPLES {
        let t = tau * k as f64 / INSIDE_SAMPLES as f64;
        times.push(t_a + t);
        points.push(config(&at(t).0, &spin));
    }
    *times.last_mut().expect("non-empty") = t_b;
    *points.last_mut().expect("non-empty") = config(&x_b, &spin);
    let inside = Segment::sampled(times, points);
    let mut vel_after = v_out.to_vec();
    vel_after.extend_from_slice(&zero_spin);
    let after = Segment::affine(t_b, t_b + dt_s, config(&x_b, &spin), vel_after);
    let trajectory = Trajectory::new(vec![before, inside, after])?.with_branch(BranchId(sign));

    Ok(SgBranch {
        sign,
        spin,
        trajectory,
        entry: PhasePoint { t: t_a, x: x_a, v: v_in },
        exit: PhasePoint { t: t_b, x: x_b, v: v_b },
        screen: PhasePoint {
            t: t_b + dt_s,
            x: x_s,
            v: v_out,
        },
        transit_time: tau,
        deflection,
    })
}

/// Both branch trajectories of a particle starting at `x0` with velocity
/// `v0` (at time 0) in the field-free region before the magnet.
pub fn propagate_sg(
    x0: Vec3,
    v0: Vec3,
    s_in: &SpinVariable,
    device: &SgDevice,
    constants: &SpinConstants,
) -> Result<SgBranches> {
    if !(x0[0] < device.entry) {
        return Err(domain("particle must start before the entry plane"));
    }
    if !(v0[0] > 0.0) {
        return Err(domain("particle must move towards the magnet"));
    }
    Ok(SgBranches {
        plus: branch(&x0, &v0, s_in, device, constants, 1)?,
        minus: branch(&x0, &v0, s_in, device, constants, -1)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tcore::{check_determinism, DeterminismCheck};

    fn setup(g: f64) -> (SgDevice, SpinConstants) {
        (
            SgDevice::new(1.0, 3.0, 6.0, [0.0, 0.0, 1.0], 10.0, g).unwrap(),
            SpinConstants::new(0.01, 1.0).unwrap(),
        )
    }

    #[test]
    fn exit_deflection_is_constant_acceleration_kinematics() {
        let (d, c) = setup(2.0);
        let b = propagate_sg([0.0; 3], [1.0, 0.0, 0.0], &SpinVariable::from_real(1.0, 1.0).unwrap(), &d, &c).unwrap();
        for br in [&b.plus, &b.minus] {
            let expected = -(br.sign as f64) * 0.5 * c.mu * 2.0 / c.mass * br.transit_time.powi(2);
            assert!((br.deflection - expected).abs() < 1e-12);
            assert!((br.exit.x[2] - expected).abs() < 1e-12);
        }
        assert!(b.plus.deflection < 0.0 && b.minus.deflection > 0.0);
    }

    #[test]
    fn zero_gradient_gives_straight_lines() {
        let (d, c) = setup(0.0);
        let b = propagate_sg([0.0; 3], [1.0, 0.0, 0.2], &SpinVariable::up(), &d, &c).unwrap();
        for br in [&b.plus, &b.minus] {
            assert_eq!(br.deflection, 0.0);
            assert!((br.screen.x[2] - 0.2 * br.screen.t).abs() < 1e-12);
            assert_eq!(br.screen.v[2], 0.2);
        }
    }

    #[test]
    fn separation_grows_with_gradient() {
        let mut prev = 0.0;
        for g in [0.5, 1.0, 2.0, 4.0] {
            let (d, c) = setup(g);
            let b = propagate_sg([0.0; 3], [1.0, 0.0, 0.0], &SpinVariable::up(), &d, &c).unwrap();
            let sep = b.minus.screen.x[2] - b.plus.screen.x[2];
            assert!(sep > prev);
            prev = sep;
        }
    }

    #[test]
    fn energy_conserved_across_planes() {
        let (d, c) = setup(3.0);
        let v0 = [1.0, 0.1, -0.05];
        let b = propagate_sg([0.0, 0.0, 0.3], v0, &SpinVariable::up(), &d, &c).unwrap();
        let e0 = 0.5 * c.mass * dot(&v0, &v0);
        for br in [&b.plus, &b.minus] {
            for (p, inside) in [(&br.entry, true), (&br.exit, true), (&br.screen, false)] {
                let e = br.energy(&d, &c, p, inside);
                assert!((e - e0).abs() < 1e-8 * e0);
            }
        }
    }

    #[test]
    fn branches_share_the_source_segment_and_split_after_entry() {
        let (d, c) = setup(2.0);
        let b = propagate_sg([0.0; 3], [1.0, 0.0, 0.0], &SpinVariable::from_real(0.6, 0.8).unwrap(), &d, &c).unwrap();
        assert_eq!(b.plus.trajectory.segments()[0], b.minus.trajectory.segments()[0]);
        // alignment happens at the entry plane itself
        for k in 0..10 {
            let t = 0.1 * k as f64 * b.plus.entry.t;
            let p = b.plus.trajectory.evaluate(t).unwrap();
            let m = b.minus.trajectory.evaluate(t).unwrap();
            assert_eq!(p, m);
        }
        let t = b.plus.exit.t;
        assert!(b.plus.trajectory.evaluate(t).unwrap().distance(&b.minus.trajectory.evaluate(t).unwrap()) > 1e-3);
        let check = DeterminismCheck {
            window: 0.5,
            tolerance: 1e-12,
            grid_step: 0.01,
        };
        assert!(!check_determinism(&[b.plus.trajectory, b.minus.trajectory], check));
    }

    #[test]
    fn analytic_gradient_of_field_magnitude() {
        let (d, _) = setup(2.0);
        for x in [[1.5, 0.0, 0.1], [2.0, 0.3, -2.0], [2.5, -1.0, 0.7]] {
            assert!(gradient_check(&d, &x, 1e-6) < 1e-4);
        }
    }

    #[test]
    fn sign_change_of_field_is_rejected() {
        let d = SgDevice::new(1.0, 3.0, 6.0, [0.0, 0.0, 1.0], 0.1, 2.0).unwrap();
        let c = SpinConstants::new(0.01, 1.0).unwrap();
        let r = propagate_sg([0.0, 0.0, 0.0], [1.0, 0.0, -0.02], &SpinVariable::up(), &d, &c);
        assert_eq!(r.unwrap_err(), Error::NoAlignment);
    }

    #[test]
    fn lagrangian_without_field_is_kinetic() {
        let (d, c) = setup(2.0);
        let v = [1.0, 2.0, 0.5];
        let l = spin_lagrangian(&v, &[0.0; 3], &SpinVariable::up(), &d, &c);
        assert_eq!(l, 0.5 * dot(&v, &v));
        let inside = spin_lagrangian(&v, &[2.0, 0.0, 0.0], &SpinVariable::up(), &d, &c);
        assert!((inside - (0.5 * dot(&v, &v) - c.mu * 10.0)).abs() < 1e-12);
    }

    #[test]
    fn branch_path_is_stationary_for_the_discrete_action() {
        let (d, c) = setup(2.0);
        let b = propagate_sg([0.0; 3], [1.0, 0.1, 0.05], &SpinVariable::from_real(0.6, 0.8).unwrap(), &d, &c).unwrap();
        for br in [&b.plus, &b.minus] {
            let n = 40;
            let times: Vec<f64> = (0..=n)
                .map(|k| br.entry.t + br.transit_time * k as f64 / n as f64)
                .collect();
            let positions: Vec<Vec3> = times
                .iter()
                .map(|t| {
                    let p = br.trajectory.evaluate(*t).unwrap();
                    [p.coords[0], p.coords[1], p.coords[2]]
                })
                .collect();
            // evaluate the parabola exactly rather than through the sampled path
            let positions: Vec<Vec3> = times
                .iter()
                .zip(&positions)
                .map(|(t, p)| {
                    let dt = t - br.entry.t;
                    let acc = -(br.sign as f64) * c.mu * d.gradient / c.mass;
                    [p[0], br.entry.x[1] + br.entry.v[1] * dt, br.entry.x[2] + br.entry.v[2] * dt + 0.5 * acc * dt * dt]
                })
                .collect();
            let spins = vec![br.spin.components(); times.len()];
            let s0 = spin_action(&times, &positions, &spins, &d, &c).unwrap();
            let h = 1e-5;
            for k in [5, 20, 33] {
                for axis in 1..3 {
                    let mut pp = positions.clone();
                    let mut pm = positions.clone();
                    pp[k][axis] += h;
                    pm[k][axis] -= h;
                    let g = (spin_action(&times, &pp, &spins, &d, &c).unwrap()
                        - spin_action(&times, &pm, &spins, &d, &c).unwrap())
                        / (2.0 * h);
                    assert!(g.abs() < 1e-8, "path gradient {g}");
                }
                for comp in 0..4 {
                    let bump = |eps: f64| {
                        let mut sp = spins.clone();
                        let z = if comp % 2 == 0 {
                            Complex64::new(eps, 0.0)
                        } else {
                            Complex64::new(0.0, eps)
                        };
                        sp[k][comp / 2] += z;
                        spin_action(&times, &positions, &sp, &d, &c).unwrap()
                    };
                    let g = (bump(h) - bump(-h)) / (2.0 * h);
                    assert!(g.abs() < 1e-8 * s0.abs().max(1.0), "spin gradient {g}");
                }
            }
        }
    }
}
