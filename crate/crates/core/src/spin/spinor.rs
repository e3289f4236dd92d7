use num_complex::Complex64;

use crate::error::{domain, Error, Result};

pub type Vec3 = [f64; 3];

/// The internal spin variable of a particle: a ray in `C^2`, stored with unit
/// norm. It shares its representation with a quantum spin state but plays
/// the role of a configuration coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinVariable {
    s: [Complex64; 2],
}

impl SpinVariable {
    pub fn new(up: Complex64, down: Complex64) -> Result<Self> {
        let n = libm::sqrt(up.norm_sqr() + down.norm_sqr());
        if !(n > 0.0 && n.is_finite()) {
            return Err(domain("spin variable must be non-zero and finite"));
        }
        Ok(Self { s: [up / n, down / n] })
    }

    pub fn from_real(up: f64, down: f64) -> Result<Self> {
        Self::new(Complex64::new(up, 0.0), Complex64::new(down, 0.0))
    }

    pub fn up() -> Self {
        Self {
            s: [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        }
    }

    pub fn down() -> Self {
        Self {
            s: [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        }
    }

    pub fn components(&self) -> [Complex64; 2] {
        self.s
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &Self) -> Complex64 {
        self.s[0].conj() * other.s[0] + self.s[1].conj() * other.s[1]
    }

    /// Whether the two describe the same ray, `|<u|v>| = 1` within `tol`.
    pub fn same_ray(&self, other: &Self, tol: f64) -> bool {
        (self.overlap(other).norm() - 1.0).abs() <= tol
    }

    /// `<s| sigma . v |s>` for an arbitrary 3-vector `v`.
    pub fn expectation(&self, v: &Vec3) -> f64 {
        let t = sigma_dot(v, &self.s);
        (self.s[0].conj() * t[0] + self.s[1].conj() * t[1]).re
    }

    /// Real and imaginary parts of both components, the form in which the
    /// spin enters configuration-space coordinates.
    pub fn coordinates(&self) -> [f64; 4] {
        [self.s[0].re, self.s[0].im, self.s[1].re, self.s[1].im]
    }
}

/// `(sigma . v) s` with the Pauli matrices in the standard basis.
pub fn sigma_dot(v: &Vec3, s: &[Complex64; 2]) -> [Complex64; 2] {
    let [x, y, z] = *v;
    let off_minus = Complex64::new(x, -y);
    let off_plus = Complex64::new(x, y);
    [s[0] * z + off_minus * s[1], off_plus * s[0] - s[1] * z]
}

/// `<s| sigma . B |s> / <s|s>` for an unnormalized spinor.
pub fn rayleigh_quotient(s: &[Complex64; 2], b: &Vec3) -> f64 {
    let t = sigma_dot(b, s);
    let num = (s[0].conj() * t[0] + s[1].conj() * t[1]).re;
    num / (s[0].norm_sqr() + s[1].norm_sqr())
}

/// Eigenrays of `sigma . n` for the unit vector `n`, as `(+1, -1)`.
fn eigenrays(n: &Vec3) -> (SpinVariable, SpinVariable) {
    let [x, y, z] = *n;
    let (plus, minus) = if z >= 0.0 {
        (
            [Complex64::new(1.0 + z, 0.0), Complex64::new(x, y)],
            [Complex64::new(-x, y), Complex64::new(1.0 + z, 0.0)],
        )
    } else {
        (
            [Complex64::new(x, -y), Complex64::new(1.0 - z, 0.0)],
            [Complex64::new(1.0 - z, 0.0), Complex64::new(-x, -y)],
        )
    };
    let norm = |v: [Complex64; 2]| {
        let k = libm::sqrt(v[0].norm_sqr() + v[1].norm_sqr());
        SpinVariable { s: [v[0] / k, v[1] / k] }
    };
    (norm(plus), norm(minus))
}

fn unit(v: &Vec3) -> Option<Vec3> {
    let n = libm::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    (n > 0.0 && n.is_finite()).then(|| [v[0] / n, v[1] / n, v[2] / n])
}

/// Both spin values compatible with the field `b`: the eigenrays of
/// `sigma . b` with eigenvalues `+|b|` and `-|b|`. Which one a trajectory
/// takes is not fixed by the dynamics, so both are returned.
pub fn align_spin(_s_in: &SpinVariable, b: &Vec3) -> Result<(SpinVariable, SpinVariable)> {
    let n = unit(b).ok_or(Error::NoAlignment)?;
    Ok(eigenrays(&n))
}

/// Quantum state along `n` with eigenvalue `+1` or `-1`.
pub fn spin_along(n: &Vec3, plus: bool) -> Result<SpinVariable> {
    let n = unit(n).ok_or_else(|| domain("axis must be non-zero"))?;
    let (p, m) = eigenrays(&n);
    Ok(if plus { p } else { m })
}

/// Branch weights of a device oriented along `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightModel {
    Equal,
    /// `p_+ = |<n,+|psi>|^2`.
    Quantum(SpinVariable),
}

/// `(p_plus, p_minus)` with `p_minus = 1 - p_plus`.
pub fn branch_weights(model: &WeightModel, n: &Vec3) -> Result<(f64, f64)> {
    let p = match model {
        WeightModel::Equal => 0.5,
        WeightModel::Quantum(psi) => {
            let plus = spin_along(n, true)?;
            plus.overlap(psi).norm_sqr().clamp(0.0, 1.0)
        }
    };
    Ok((p, 1.0 - p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const FRAC: f64 = core::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn axis_eigenrays() {
        let s = SpinVariable::up();
        let (p, m) = align_spin(&s, &[0.0, 0.0, 2.0]).unwrap();
        assert!(p.same_ray(&SpinVariable::up(), 1e-15) && m.same_ray(&SpinVariable::down(), 1e-15));
        let (p, m) = align_spin(&s, &[3.0, 0.0, 0.0]).unwrap();
        assert!(p.same_ray(&SpinVariable::from_real(FRAC, FRAC).unwrap(), 1e-15));
        assert!(m.same_ray(&SpinVariable::from_real(FRAC, -FRAC).unwrap(), 1e-15));
        assert_eq!(align_spin(&s, &[0.0; 3]), Err(Error::NoAlignment));
    }

    #[test]
    fn lagrangian_potential_term() {
        let b = [0.0, 0.0, 1.5];
        assert!((SpinVariable::up().expectation(&b) - 1.5).abs() < 1e-15);
        assert!(SpinVariable::from_real(1.0, 1.0).unwrap().expectation(&b).abs() < 1e-15);
    }

    #[test]
    fn weights() {
        let up = WeightModel::Quantum(SpinVariable::up());
        assert_eq!(branch_weights(&up, &[0.0, 0.0, 1.0]).unwrap(), (1.0, 0.0));
        let (p, m) = branch_weights(&up, &[1.0, 0.0, 0.0]).unwrap();
        assert!((p - 0.5).abs() < 1e-15 && p + m == 1.0);
        assert_eq!(branch_weights(&WeightModel::Equal, &[0.0, 1.0, 0.0]).unwrap(), (0.5, 0.5));
    }

    proptest! {
        #[test]
        fn eigenrays_are_orthogonal_eigenvectors(
            b in prop::array::uniform3(-5.0f64..5.0),
        ) {
            let mag = libm::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
            prop_assume!(mag > 1e-3);
            let (p, m) = align_spin(&SpinVariable::up(), &b).unwrap();
            prop_assert!(p.overlap(&m).norm() < 1e-12);
            let n = [b[0] / mag, b[1] / mag, b[2] / mag];
            for (s, sign) in [(p, 1.0), (m, -1.0)] {
                let t = sigma_dot(&n, &s.components());
                let c = s.components();
                let res = ((t[0] - c[0] * sign).norm_sqr() + (t[1] - c[1] * sign).norm_sqr()).sqrt();
                prop_assert!(res < 1e-12);
                prop_assert!((s.expectation(&b) - sign * mag).abs() < 1e-12 * mag);
            }
        }

        #[test]
        fn quantum_weights_sum_to_one(
            re in prop::array::uniform2(-1.0f64..1.0),
            im in prop::array::uniform2(-1.0f64..1.0),
            n in prop::array::uniform3(-1.0f64..1.0),
        ) {
            let psi = SpinVariable::new(Complex64::new(re[0], im[0]), Complex64::new(re[1], im[1]));
            prop_assume!(psi.is_ok());
            prop_assume!(n.iter().map(|v| v * v).sum::<f64>() > 1e-4);
            let (p, m) = branch_weights(&WeightModel::Quantum(psi.unwrap()), &n).unwrap();
            prop_assert_eq!(p + m, 1.0);
            prop_assert!((0.0..=1.0).contains(&p));
        }
    }
}
