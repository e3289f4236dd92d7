use alloc::boxed::Box;
use alloc::string::String;

use super::measure::{Histogram, MeasureSpec};
use crate::error::{domain, Error, Result};
use crate::rng::stream;

type ForwardFn<S, T> = Box<dyn Fn(&S) -> Option<T> + Send + Sync>;
type JacobianFn<S> = Box<dyn Fn(&S) -> f64 + Send + Sync>;

/// Map from one boundary-condition space to another.
///
/// `forward` returns `None` where the map is undefined. The optional
/// `jacobian` gives `|d source / d target|` at a source point, which turns a
/// source density into a target density without binning.
pub struct BoundaryMap<S, T> {
    pub source: String,
    pub target: String,
    forward: ForwardFn<S, T>,
    jacobian: Option<JacobianFn<S>>,
}

impl<S, T> core::fmt::Debug for BoundaryMap<S, T> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("BoundaryMap")
            .field("source", &self.source)
            .field("target", &self.target)
            .field("has_jacobian", &self.jacobian.is_some())
            .finish()
    }
}

impl<S, T> BoundaryMap<S, T> {
    pub fn new<F>(source: impl Into<String>, target: impl Into<String>, forward: F) -> Self
    where
        F: Fn(&S) -> Option<T> + Send + Sync + 'static,
    {
        Self {
            source: source.into(),
            target: target.into(),
            forward: Box::new(forward),
            jacobian: None,
        }
    }

    pub fn with_jacobian<J>(mut self, jacobian: J) -> Self
    where
        J: Fn(&S) -> f64 + Send + Sync + 'static,
    {
        self.jacobian = Some(Box::new(jacobian));
        self
    }

    pub fn forward(&self, s: &S) -> Option<T> {
        (self.forward)(s)
    }

    pub fn jacobian(&self, s: &S) -> Option<f64> {
        self.jacobian.as_ref().map(|j| j(s))
    }

    /// Target density at `forward(s)` given the source density at `s`, using
    /// the exact Jacobian. `None` when no Jacobian was supplied.
    pub fn transfer_density(&self, source_density: f64, s: &S) -> Option<f64> {
        self.jacobian(s).map(|j| source_density * j)
    }
}

impl BoundaryMap<f64, f64> {
    /// Largest relative disagreement between the supplied Jacobian and a
    /// central finite difference of `forward` with step `h`.
    pub fn jacobian_check(&self, points: &[f64], h: f64) -> Result<f64> {
        let Some(jac) = &self.jacobian else {
            return Err(domain("map has no Jacobian to check"));
        };
        let mut worst: f64 = 0.0;
        for &x in points {
            let (Some(yp), Some(ym)) = (self.forward(&(x + h)), self.forward(&(x - h))) else {
                return Err(Error::MapUndefined { undefined: 1, total: 1 });
            };
            let dy_dx = (yp - ym) / (2.0 * h);
            let fd = 1.0 / dy_dx.abs();
            let exact = jac(&x);
            worst = worst.max((fd - exact).abs() / exact.abs().max(f64::MIN_POSITIVE));
        }
        Ok(worst)
    }
}

/// Largest fraction of samples on which the map may be undefined.
pub const MAX_UNDEFINED_FRACTION: f64 = 1e-3;

/// Pushes `measure` through `map` by sampling and returns the binned target
/// density on `[lo, hi)`.
///
/// Samples where the map is undefined are counted; more than
/// [`MAX_UNDEFINED_FRACTION`] of them aborts the transfer.
pub fn pushforward<S>(
    measure: &MeasureSpec<S>,
    map: &BoundaryMap<S, f64>,
    n_samples: usize,
    seed: u64,
    lo: f64,
    hi: f64,
    bins: usize,
) -> Result<Histogram> {
    if n_samples == 0 {
        return Err(domain("pushforward needs at least one sample"));
    }
    let mut hist = Histogram::new(lo, hi, bins)?;
    let mut rng = stream(seed, 0);
    let mut undefined = 0usize;
    for _ in 0..n_samples {
        let s = measure.sample(&mut rng);
        match map.forward(&s) {
            Some(y) if y.is_finite() => hist.add(y),
            _ => undefined += 1,
        }
    }
    if undefined as f64 > MAX_UNDEFINED_FRACTION * n_samples as f64 {
        return Err(Error::MapUndefined {
            undefined,
            total: n_samples,
        });
    }
    Ok(hist)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_reproduces_uniform() {
        let m = MeasureSpec::uniform(0.0, 1.0).unwrap();
        let id = BoundaryMap::new("x", "x", |x: &f64| Some(*x));
        let mut errs = alloc::vec::Vec::new();
        for n in [2_000usize, 200_000] {
            let h = pushforward(&m, &id, n, 11, 0.0, 1.0, 10).unwrap();
            let sup = h.densities().iter().map(|d| (d - 1.0).abs()).fold(0.0, f64::max);
            errs.push(sup);
        }
        assert!(errs[1] < errs[0], "{errs:?}");
        assert!(errs[1] < 0.02);
    }

    #[test]
    fn doubling_map_halves_density() {
        let m = MeasureSpec::uniform(0.0, 1.0).unwrap();
        let map = BoundaryMap::new("x", "y", |x: &f64| Some(2.0 * x)).with_jacobian(|_| 0.5);
        let h = pushforward(&m, &map, 100_000, 5, 0.0, 2.0, 8).unwrap();
        for k in 0..8 {
            assert!((h.bin_density(k) - 0.5).abs() < 5.0 * h.bin_density_error(k));
        }
        assert_eq!(map.transfer_density(1.0, &0.3), Some(0.5));
        assert!(map.jacobian_check(&[0.1, 0.5, 0.9], 1e-4).unwrap() < 1e-4);
    }

    #[test]
    fn undefined_map_aborts() {
        let m = MeasureSpec::uniform(0.0, 1.0).unwrap();
        let map = BoundaryMap::new("x", "y", |x: &f64| (*x < 0.5).then_some(*x));
        assert!(matches!(
            pushforward(&m, &map, 1000, 1, 0.0, 1.0, 4),
            Err(Error::MapUndefined { .. })
        ));
    }

    #[test]
    fn jacobian_check_flags_wrong_jacobian() {
        let map = BoundaryMap::new("x", "y", |x: &f64| Some(x * x)).with_jacobian(|_| 1.0);
        assert!(map.jacobian_check(&[1.0], 1e-5).unwrap() > 0.1);
    }
}
