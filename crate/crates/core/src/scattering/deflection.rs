use alloc::format;

use super::potential::{PotentialKind, PotentialSpec};
use crate::error::{domain, Error, Result};
use crate::numeric::{bisect, GaussLegendre};
use crate::ode::Dopri5;
use core::f64::consts::PI;

/// How the deflection of a smooth potential is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DeflectionMethod {
    /// Quadrature of the classical deflection integral.
    #[default]
    Integral,
    /// Adaptive integration of the planar equations of motion.
    Trajectory,
}

/// Scattering angle in `[0, pi]` for impact parameter `impact` at energy
/// `energy` (unit mass).
pub fn deflection_angle(potential: &PotentialSpec, energy: f64, impact: f64) -> Result<f64> {
    deflection_angle_with(potential, energy, impact, DeflectionMethod::Integral)
}

pub fn deflection_angle_with(
    potential: &PotentialSpec,
    energy: f64,
    impact: f64,
    method: DeflectionMethod,
) -> Result<f64> {
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(domain("energy must be positive and finite"));
    }
    if !(impact >= 0.0 && impact.is_finite()) {
        return Err(domain("impact parameter must be non-negative and finite"));
    }
    if let PotentialKind::HardSphere { radius } = potential.kind() {
        return Ok(if impact >= radius {
            0.0
        } else {
            2.0 * libm::acos(impact / radius)
        });
    }
    if impact == 0.0 {
        return Ok(PI);
    }
    match method {
        DeflectionMethod::Integral => deflection_integral(potential, energy, impact),
        DeflectionMethod::Trajectory => Ok(integrate_planar(potential, energy, impact, &Dopri5::default())?.deflection),
    }
}

/// `F(u) = 1 - V(1/u)/E - s^2 u^2` with `u = 1/r`.
fn radial_function(p: &PotentialSpec, energy: f64, impact: f64, u: f64) -> f64 {
    let v = if u == 0.0 { 0.0 } else { p.value(1.0 / u) };
    1.0 - v / energy - impact * impact * u * u
}

/// Inverse distance of closest approach.
fn turning_point(p: &PotentialSpec, energy: f64, impact: f64) -> Result<f64> {
    let f = |u: f64| radial_function(p, energy, impact, u);
    let mut hi = 1.0 / p.length_scale(energy).min(impact);
    let mut tries = 0;
    while f(hi) >= 0.0 {
        hi *= 2.0;
        tries += 1;
        if tries > 200 {
            return Err(Error::IntegrationFailure(format!(
                "no turning point for s = {impact}, E = {energy}"
            )));
        }
    }
    bisect(f, 0.0, hi, 0.0).ok_or_else(|| Error::IntegrationFailure(format!("turning point bracket failed for s = {impact}")))
}

fn deflection_integral(p: &PotentialSpec, energy: f64, impact: f64) -> Result<f64> {
    let u0 = turning_point(p, energy, impact)?;
    let v0 = p.value(1.0 / u0);
    // u = u0 (1 - tau^2) removes the inverse square root singularity at u0.
    let g = |tau: f64| {
        let t2 = tau * tau;
        let kinetic = impact * impact * u0 * u0 * t2 * (2.0 - t2);
        let potential = match p.kind() {
            PotentialKind::RepulsivePower { strength, exponent } => {
                strength * libm::pow(u0, exponent) * -libm::expm1(exponent * libm::log1p(-t2)) / energy
            }
            _ => {
                let u = u0 * (1.0 - t2);
                let vu = if u == 0.0 { 0.0 } else { p.value(1.0 / u) };
                (v0 - vu) / energy
            }
        };
        kinetic + potential
    };
    let integrand = |tau: f64| {
        let gt = g(tau);
        if gt > 0.0 {
            2.0 * u0 * tau / libm::sqrt(gt)
        } else {
            0.0
        }
    };
    let integral = GaussLegendre::new(32).integrate(integrand, 0.0, 1.0, 8);
    let theta = PI - 2.0 * impact * integral;
    if !theta.is_finite() {
        return Err(Error::IntegrationFailure(format!("non-finite deflection for s = {impact}")));
    }
    Ok(theta.clamp(0.0, PI))
}

/// Result of integrating one planar scattering orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarRun {
    pub deflection: f64,
    /// Largest `|E(t) - E| / E` over accepted steps.
    pub max_energy_error: f64,
    pub steps: usize,
    pub closest_approach: f64,
}

/// Integrates the outgoing half of the orbit from the point of closest
/// approach; the incoming half is its mirror image.
pub fn integrate_planar(potential: &PotentialSpec, energy: f64, impact: f64, solver: &Dopri5) -> Result<PlanarRun> {
    if matches!(potential.kind(), PotentialKind::HardSphere { .. }) {
        return Err(Error::Unsupported("hard spheres have no equations of motion to integrate".into()));
    }
    if !(energy > 0.0 && impact > 0.0) {
        return Err(domain("planar integration needs positive energy and impact parameter"));
    }
    let u0 = turning_point(potential, energy, impact)?;
    let r0 = 1.0 / u0;
    let v_inf = libm::sqrt(2.0 * energy);
    let v_p = impact * v_inf / r0;
    let scale = potential.length_scale(energy).max(impact);
    let force = |_: f64, y: &[f64; 4]| {
        let r = libm::hypot(y[0], y[1]);
        let a = -potential.derivative(r) / r;
        [y[2], y[3], a * y[0], a * y[1]]
    };
    let energy_of = |y: &[f64; 4]| 0.5 * (y[2] * y[2] + y[3] * y[3]) + potential.value(libm::hypot(y[0], y[1]));
    let start = [r0, 0.0, 0.0, v_p];
    let e0 = energy_of(&start);
    let mut max_err: f64 = 0.0;
    let stop = |_: f64, y: &[f64; 4]| {
        max_err = max_err.max((energy_of(y) - e0).abs() / e0);
        let r = libm::hypot(y[0], y[1]);
        r > 1e3 * scale && potential.value(r) < 1e-13 * energy && y[0] * y[2] + y[1] * y[3] > 0.0
    };
    let solver = Dopri5 {
        initial_step: 1e-3 * r0 / v_inf.max(v_p),
        ..*solver
    };
    let path = solver.integrate(force, 0.0, start, stop).map_err(|e| match e {
        Error::IntegrationFailure(m) => Error::IntegrationFailure(format!("s = {impact}, E = {energy}: {m}")),
        other => other,
    })?;
    let (_, end) = path[path.len() - 1];
    let psi = libm::atan2(end[3], end[2]);
    Ok(PlanarRun {
        deflection: (PI - 2.0 * psi).clamp(0.0, PI),
        max_energy_error: max_err,
        steps: path.len() - 1,
        closest_approach: r0,
    })
}

/// Deflection function `theta(s)` at fixed energy, with its derivative and
/// inverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deflection {
    potential: PotentialSpec,
    energy: f64,
    method: DeflectionMethod,
}

impl Deflection {
    pub fn new(potential: PotentialSpec, energy: f64) -> Result<Self> {
        Self::with_method(potential, energy, DeflectionMethod::Integral)
    }

    pub fn with_method(potential: PotentialSpec, energy: f64, method: DeflectionMethod) -> Result<Self> {
        if !(energy > 0.0 && energy.is_finite()) {
            return Err(domain("energy must be positive and finite"));
        }
        Ok(Self {
            potential,
            energy,
            method,
        })
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn angle(&self, impact: f64) -> Result<f64> {
        deflection_angle_with(&self.potential, self.energy, impact, self.method)
    }

    /// Largest impact parameter that is deflected at all, if finite.
    pub fn max_impact(&self) -> Option<f64> {
        match self.potential.kind() {
            PotentialKind::HardSphere { radius } => Some(radius),
            _ => None,
        }
    }

    /// `d theta / d s`.
    pub fn slope(&self, impact: f64) -> Result<f64> {
        if let PotentialKind::HardSphere { radius } = self.potential.kind() {
            if impact >= radius {
                return Ok(0.0);
            }
            return Ok(-2.0 / libm::sqrt(radius * radius - impact * impact));
        }
        let h = 1e-3 * impact.max(1e-3 * self.potential.length_scale(self.energy));
        let f = |s: f64| self.angle(s);
        if impact > 2.0 * h {
            Ok((f(impact - 2.0 * h)? - 8.0 * f(impact - h)? + 8.0 * f(impact + h)? - f(impact + 2.0 * h)?) / (12.0 * h))
        } else {
            // one-sided, second order
            Ok((-3.0 * f(impact)? + 4.0 * f(impact + h)? - f(impact + 2.0 * h)?) / (2.0 * h))
        }
    }

    /// Impact parameter that scatters to `theta`, for `theta` in `(0, pi)`.
    pub fn impact_for(&self, theta: f64) -> Result<f64> {
        if !(theta > 0.0 && theta < PI) {
            return Err(domain("scattering angle must lie strictly between 0 and pi"));
        }
        if let PotentialKind::HardSphere { radius } = self.potential.kind() {
            return Ok(radius * libm::cos(0.5 * theta));
        }
        let mut hi = self.potential.length_scale(self.energy);
        let mut tries = 0;
        while self.angle(hi)? > theta {
            hi *= 2.0;
            tries += 1;
            if tries > 200 {
                return Err(Error::NoSolution(format!("no impact parameter reaches theta = {theta}")));
            }
        }
        let mut lo = 0.0;
        // bisect on the sign of theta(s) - theta; theta decreases in s
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.angle(mid)? > theta {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}
