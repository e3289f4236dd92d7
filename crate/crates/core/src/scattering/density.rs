//! Densities on the impact plane and on the sphere of scattering directions,
//! related through the deflection function.
//!
//! Impact densities are per unit area (`s ds dphi`), angular densities per
//! unit solid angle (`sin(theta) dtheta dphi`). Both are taken independent of
//! the azimuth.

use alloc::vec::Vec;
use core::f64::consts::PI;

use super::deflection::Deflection;
use super::potential::{PotentialKind, PotentialSpec};
use crate::error::{domain, Error, Result};
use crate::numeric::{trapezoid, GaussLegendre};
use crate::tcore::BoundaryMap;

/// `rho_b / rho_a` at impact parameter `s`, i.e. `s |ds/dtheta| / sin(theta)`.
fn area_ratio(deflection: &Deflection, s: f64, theta: f64) -> Result<f64> {
    let slope = deflection.slope(s)?;
    if !(slope < 0.0) {
        return Err(Error::Unsupported("deflection function is not strictly decreasing".into()));
    }
    Ok(s / (libm::sin(theta) * slope.abs()))
}

/// Angular density at `theta` induced by the impact density `rho_a`.
pub fn transfer_at<F: Fn(f64) -> f64>(rho_a: F, deflection: &Deflection, theta: f64) -> Result<f64> {
    let s = deflection.impact_for(theta)?;
    Ok(rho_a(s) * area_ratio(deflection, s, theta)?)
}

/// Impact density at `s` whose image is the angular density `rho_b`.
/// Impact parameters that miss a finite-range target carry no density.
pub fn pullback_at<F: Fn(f64) -> f64>(rho_b: F, deflection: &Deflection, s: f64) -> Result<f64> {
    if deflection.max_impact().is_some_and(|r| s >= r) {
        return Ok(0.0);
    }
    if !(s > 0.0) {
        return Err(domain("impact parameter must be positive"));
    }
    let theta = deflection.angle(s)?;
    if !(theta > 0.0 && theta < PI) {
        return Err(domain("deflection lands on a pole of the sphere"));
    }
    Ok(rho_b(theta) / area_ratio(deflection, s, theta)?)
}

/// Angular density tabulated on an open grid of polar angles.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularDensity {
    pub theta: Vec<f64>,
    pub density: Vec<f64>,
    /// Impact parameter mapped to each grid angle.
    pub impact: Vec<f64>,
}

impl AngularDensity {
    /// `2 pi * integral rho_b sin(theta) dtheta` over the grid span.
    pub fn mass(&self) -> f64 {
        let ys: Vec<f64> = self
            .theta
            .iter()
            .zip(&self.density)
            .map(|(t, r)| r * libm::sin(*t))
            .collect();
        2.0 * PI * trapezoid(&self.theta, &ys)
    }
}

/// Impact density tabulated on a grid of impact parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpactDensity {
    pub impact: Vec<f64>,
    pub density: Vec<f64>,
}

impl ImpactDensity {
    /// `2 pi * integral rho_a s ds` over the grid span.
    pub fn mass(&self) -> f64 {
        let ys: Vec<f64> = self.impact.iter().zip(&self.density).map(|(s, r)| r * s).collect();
        2.0 * PI * trapezoid(&self.impact, &ys)
    }
}

fn check_theta_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(domain("empty angle grid"));
    }
    if grid.iter().any(|t| !(*t > 0.0 && *t < PI)) {
        return Err(domain("angle grid must exclude the poles 0 and pi"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(domain("angle grid must be strictly increasing"));
    }
    Ok(())
}

pub fn transfer_density<F: Fn(f64) -> f64>(
    rho_a: F,
    potential: &PotentialSpec,
    energy: f64,
    theta_grid: &[f64],
) -> Result<AngularDensity> {
    check_theta_grid(theta_grid)?;
    let deflection = Deflection::new(*potential, energy)?;
    let mut impact = Vec::with_capacity(theta_grid.len());
    let mut density = Vec::with_capacity(theta_grid.len());
    for &theta in theta_grid {
        let s = deflection.impact_for(theta)?;
        if impact.last().is_some_and(|prev: &f64| s >= *prev) {
            return Err(Error::Unsupported("deflection function is not invertible on the grid".into()));
        }
        density.push(rho_a(s) * area_ratio(&deflection, s, theta)?);
        impact.push(s);
    }
    Ok(AngularDensity {
        theta: theta_grid.to_vec(),
        density,
        impact,
    })
}

pub fn pullback_density<F: Fn(f64) -> f64>(
    rho_b: F,
    potential: &PotentialSpec,
    energy: f64,
    impact_grid: &[f64],
) -> Result<ImpactDensity> {
    let deflection = Deflection::new(*potential, energy)?;
    let density = impact_grid
        .iter()
        .map(|&s| pullback_at(&rho_b, &deflection, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(ImpactDensity {
        impact: impact_grid.to_vec(),
        density,
    })
}

/// The impact density whose image is uniform over all scattering directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsotropicSource {
    deflection: Deflection,
}

pub fn isotropic_source_density(potential: &PotentialSpec, energy: f64) -> Result<IsotropicSource> {
    Ok(IsotropicSource {
        deflection: Deflection::new(*potential, energy)?,
    })
}

impl IsotropicSource {
    pub const ANGULAR_DENSITY: f64 = 1.0 / (4.0 * PI);

    pub fn density(&self, s: f64) -> Result<f64> {
        if let PotentialKind::HardSphere { radius } = self.deflection.potential().kind() {
            return Ok(if s < radius { 1.0 / (PI * radius * radius) } else { 0.0 });
        }
        pullback_at(|_| Self::ANGULAR_DENSITY, &self.deflection, s)
    }

    pub fn deflection(&self) -> &Deflection {
        &self.deflection
    }

    /// `2 pi * integral rho_a s ds` over the whole impact plane.
    pub fn total_mass(&self) -> Result<f64> {
        let gl = GaussLegendre::new(32);
        let mut err = None;
        let mut eval = |s: f64| match self.density(s) {
            Ok(v) => v * s,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        };
        let integral = match self.deflection.max_impact() {
            Some(r) => gl.integrate(&mut eval, 0.0, r, 8),
            None => {
                // s = c t / (1 - t) maps the half line onto (0, 1)
                let c = self.deflection.potential().length_scale(self.deflection.energy());
                gl.integrate(
                    |t: f64| {
                        let s = c * t / (1.0 - t);
                        eval(s) * c / ((1.0 - t) * (1.0 - t))
                    },
                    0.0,
                    1.0,
                    16,
                )
            }
        };
        match err {
            Some(e) => Err(e),
            None => Ok(2.0 * PI * integral),
        }
    }
}

/// Impact parameter to polar scattering angle, with the Jacobian taken
/// relative to the area element `s ds` and the solid-angle element
/// `sin(theta) dtheta`.
pub fn impact_to_angle_map(deflection: Deflection) -> BoundaryMap<f64, f64> {
    let fwd = deflection;
    BoundaryMap::new("impact parameter", "scattering angle", move |s: &f64| fwd.angle(*s).ok())
        .with_jacobian(move |s: &f64| {
            deflection
                .angle(*s)
                .and_then(|theta| area_ratio(&deflection, *s, theta))
                .unwrap_or(f64::NAN)
        })
}
