use crate::error::{domain, Result};

/// Shape of a repulsive central potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialKind {
    /// Infinite wall at `radius`.
    HardSphere { radius: f64 },
    /// `V(r) = strength / r^exponent`; exponent 1 is the Coulomb case.
    RepulsivePower { strength: f64, exponent: f64 },
    /// `V(r) = strength * exp(-r / screening) / r`.
    ScreenedCoulomb { strength: f64, screening: f64 },
}

/// A repulsive central potential together with the range beyond which an
/// interaction center is considered out of reach.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSpec {
    kind: PotentialKind,
    action_range: f64,
}

impl PotentialSpec {
    pub fn hard_sphere(radius: f64) -> Result<Self> {
        Self::new(PotentialKind::HardSphere { radius }, radius)
    }

    /// Unscreened Coulomb repulsion `k / r`.
    pub fn coulomb(strength: f64, action_range: f64) -> Result<Self> {
        Self::new(
            PotentialKind::RepulsivePower {
                strength,
                exponent: 1.0,
            },
            action_range,
        )
    }

    pub fn new(kind: PotentialKind, action_range: f64) -> Result<Self> {
        let ok = match kind {
            PotentialKind::HardSphere { radius } => radius > 0.0 && radius.is_finite(),
            PotentialKind::RepulsivePower { strength, exponent } => {
                strength > 0.0 && exponent > 0.0 && strength.is_finite() && exponent.is_finite()
            }
            PotentialKind::ScreenedCoulomb { strength, screening } => {
                strength > 0.0 && screening > 0.0 && strength.is_finite() && screening.is_finite()
            }
        };
        if !ok {
            return Err(domain("potential parameters must be positive and finite"));
        }
        if !(action_range > 0.0) {
            return Err(domain("action range must be positive"));
        }
        if let PotentialKind::HardSphere { radius } = kind {
            if action_range != radius {
                return Err(domain("a hard sphere acts exactly up to its radius"));
            }
        }
        Ok(Self { kind, action_range })
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    /// Distance within which a passage counts as an encounter. The deflection
    /// itself always uses the untruncated potential.
    pub fn action_range(&self) -> f64 {
        self.action_range
    }

    /// Potential energy at distance `r`; infinite inside a hard sphere.
    pub fn value(&self, r: f64) -> f64 {
        match self.kind {
            PotentialKind::HardSphere { radius } => {
                if r < radius {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            PotentialKind::RepulsivePower { strength, exponent } => strength * libm::pow(r, -exponent),
            PotentialKind::ScreenedCoulomb { strength, screening } => strength * libm::exp(-r / screening) / r,
        }
    }

    /// `dV/dr` for the smooth kinds.
    pub fn derivative(&self, r: f64) -> f64 {
        match self.kind {
            PotentialKind::HardSphere { .. } => 0.0,
            PotentialKind::RepulsivePower { strength, exponent } => {
                -exponent * strength * libm::pow(r, -exponent - 1.0)
            }
            PotentialKind::ScreenedCoulomb { strength, screening } => {
                -strength * libm::exp(-r / screening) * (1.0 / (r * r) + 1.0 / (r * screening))
            }
        }
    }

    /// A length on which the deflection function varies: the distance of
    /// closest head-on approach for smooth potentials, or the radius.
    pub fn length_scale(&self, energy: f64) -> f64 {
        match self.kind {
            PotentialKind::HardSphere { radius } => radius,
            PotentialKind::RepulsivePower { strength, exponent } => libm::pow(strength / energy, 1.0 / exponent),
            PotentialKind::ScreenedCoulomb { strength, screening } => (strength / energy).min(screening),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn potentials_decrease_to_zero() {
        let pots = [
            PotentialSpec::coulomb(1.0, 1.0).unwrap(),
            PotentialSpec::new(
                PotentialKind::RepulsivePower {
                    strength: 2.0,
                    exponent: 3.0,
                },
                1.0,
            )
            .unwrap(),
            PotentialSpec::new(
                PotentialKind::ScreenedCoulomb {
                    strength: 1.0,
                    screening: 0.5,
                },
                1.0,
            )
            .unwrap(),
        ];
        for p in pots {
            let mut prev = f64::INFINITY;
            for k in 1..200 {
                let r = 0.05 * k as f64;
                let v = p.value(r);
                assert!(v < prev && v > 0.0);
                assert!(p.derivative(r) < 0.0);
                let h = 1e-6 * r;
                let fd = (p.value(r + h) - p.value(r - h)) / (2.0 * h);
                assert!((fd - p.derivative(r)).abs() < 1e-5 * fd.abs().max(1e-12));
                prev = v;
            }
            assert!(p.value(1e9) < 1e-8);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(PotentialSpec::hard_sphere(0.0).is_err());
        assert!(PotentialSpec::coulomb(-1.0, 1.0).is_err());
        assert!(PotentialSpec::new(PotentialKind::HardSphere { radius: 1.0 }, 2.0).is_err());
    }
}
