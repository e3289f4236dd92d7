use alloc::boxed::Box;
use alloc::vec::Vec;
use rand::{Rng, RngCore};

use crate::error::{domain, Error, Result};

type DensityFn<P> = Box<dyn Fn(&P) -> f64 + Send + Sync>;
type SamplerFn<P> = Box<dyn Fn(&mut dyn RngCore) -> P + Send + Sync>;

/// A finite measure on a boundary-condition space, given by a density and a
/// sampler that draws points distributed according to it.
///
/// Atoms (point masses) carry a density with respect to the counting measure.
pub struct MeasureSpec<P> {
    dimension: usize,
    density: DensityFn<P>,
    sampler: SamplerFn<P>,
    total_mass: f64,
}

impl<P> core::fmt::Debug for MeasureSpec<P> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("MeasureSpec")
            .field("dimension", &self.dimension)
            .field("total_mass", &self.total_mass)
            .finish_non_exhaustive()
    }
}

impl<P> MeasureSpec<P> {
    /// Builds a measure. A total mass that is not finite and positive is
    /// rejected: every statistic here assumes the measure can be normalized.
    pub fn new<D, S>(dimension: usize, density: D, sampler: S, total_mass: f64) -> Result<Self>
    where
        D: Fn(&P) -> f64 + Send + Sync + 'static,
        S: Fn(&mut dyn RngCore) -> P + Send + Sync + 'static,
    {
        if dimension == 0 {
            return Err(domain("measure space dimension must be positive"));
        }
        if !(total_mass.is_finite() && total_mass > 0.0) {
            return Err(Error::DegenerateMeasure(total_mass));
        }
        Ok(Self {
            dimension,
            density: Box::new(density),
            sampler: Box::new(sampler),
            total_mass,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    /// Unnormalized density.
    pub fn density(&self, p: &P) -> f64 {
        (self.density)(p)
    }

    /// Probability density (density divided by the total mass).
    pub fn normalized_density(&self, p: &P) -> f64 {
        (self.density)(p) / self.total_mass
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> P {
        (self.sampler)(rng)
    }

    /// The same measure rescaled to unit mass.
    pub fn normalized(self) -> Self
    where
        P: 'static,
    {
        let mass = self.total_mass;
        let density = self.density;
        Self {
            dimension: self.dimension,
            density: Box::new(move |p| density(p) / mass),
            sampler: self.sampler,
            total_mass: 1.0,
        }
    }
}

impl MeasureSpec<f64> {
    /// Lebesgue measure restricted to `[lo, hi)`, normalized.
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(domain("uniform measure needs a bounded interval lo < hi"));
        }
        let width = hi - lo;
        Self::new(
            1,
            move |x: &f64| if *x >= lo && *x < hi { 1.0 / width } else { 0.0 },
            move |rng: &mut dyn RngCore| lo + width * rng.random::<f64>(),
            1.0,
        )
    }

    /// Unit point mass at `x`.
    pub fn point_mass(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(domain("point mass location must be finite"));
        }
        Self::new(
            1,
            move |y: &f64| if *y == x { 1.0 } else { 0.0 },
            move |_: &mut dyn RngCore| x,
            1.0,
        )
    }

    /// Exponential law with the given mean on `[0, inf)`.
    pub fn exponential(mean: f64) -> Result<Self> {
        if !(mean.is_finite() && mean > 0.0) {
            return Err(domain("exponential mean must be positive"));
        }
        Self::new(
            1,
            move |t: &f64| if *t >= 0.0 { libm::exp(-t / mean) / mean } else { 0.0 },
            move |rng: &mut dyn RngCore| {
                // 1 - u lies in (0, 1], so the logarithm is finite.
                let u: f64 = rng.random();
                -mean * libm::log(1.0 - u)
            },
            1.0,
        )
    }
}

/// Equal-width histogram on `[lo, hi)` with samples outside counted apart.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    lo: f64,
    hi: f64,
    counts: Vec<u64>,
    outside: u64,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if !(hi > lo) || bins == 0 || !lo.is_finite() || !hi.is_finite() {
            return Err(domain("histogram needs lo < hi and at least one bin"));
        }
        Ok(Self {
            lo,
            hi,
            counts: alloc::vec![0; bins],
            outside: 0,
        })
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.counts.len() as f64
    }

    pub fn bin_index(&self, x: f64) -> Option<usize> {
        if !(x >= self.lo && x < self.hi) {
            return None;
        }
        let k = ((x - self.lo) / self.bin_width()) as usize;
        Some(k.min(self.counts.len() - 1))
    }

    pub fn add(&mut self, x: f64) {
        match self.bin_index(x) {
            Some(k) => self.counts[k] += 1,
            None => self.outside += 1,
        }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn outside(&self) -> u64 {
        self.outside
    }

    pub fn in_range(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn bin_edges(&self, k: usize) -> (f64, f64) {
        let w = self.bin_width();
        (self.lo + w * k as f64, self.lo + w * (k + 1) as f64)
    }

    pub fn bin_center(&self, k: usize) -> f64 {
        let (a, b) = self.bin_edges(k);
        0.5 * (a + b)
    }

    /// Probability density of bin `k`, normalized over the in-range samples.
    pub fn bin_density(&self, k: usize) -> f64 {
        let n = self.in_range();
        if n == 0 {
            return 0.0;
        }
        self.counts[k] as f64 / (n as f64 * self.bin_width())
    }

    /// Monte Carlo standard error of [`Histogram::bin_density`].
    pub fn bin_density_error(&self, k: usize) -> f64 {
        let n = self.in_range() as f64;
        if n == 0.0 {
            return 0.0;
        }
        let p = self.counts[k] as f64 / n;
        libm::sqrt(p * (1.0 - p) / n) / self.bin_width()
    }

    pub fn densities(&self) -> Vec<f64> {
        (0..self.bins()).map(|k| self.bin_density(k)).collect()
    }

    pub fn density_at(&self, x: f64) -> f64 {
        self.bin_index(x).map_or(0.0, |k| self.bin_density(k))
    }

    /// Piecewise-constant measure with this histogram's shape.
    pub fn to_measure(&self) -> Result<MeasureSpec<f64>> {
        let n = self.in_range();
        if n == 0 {
            return Err(Error::DegenerateMeasure(0.0));
        }
        let cumulative: Vec<u64> = self
            .counts
            .iter()
            .scan(0u64, |acc, c| {
                *acc += c;
                Some(*acc)
            })
            .collect();
        let density_hist = self.clone();
        let (lo, width) = (self.lo, self.bin_width());
        MeasureSpec::new(
            1,
            move |x: &f64| density_hist.density_at(*x),
            move |rng: &mut dyn RngCore| {
                let r = rng.random_range(0..n);
                let k = cumulative.partition_point(|&c| c <= r);
                lo + width * (k as f64 + rng.random::<f64>())
            },
            1.0,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn zero_mass_is_rejected() {
        let m = MeasureSpec::<f64>::new(1, |_| 0.0, |_| 0.0, 0.0);
        assert_eq!(m.unwrap_err(), Error::DegenerateMeasure(0.0));
        assert!(MeasureSpec::<f64>::new(1, |_| 0.0, |_| 0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn normalized_divides_density() {
        let m = MeasureSpec::<f64>::new(1, |_| 4.0, |_| 0.0, 2.0).unwrap();
        assert_eq!(m.normalized_density(&0.0), 2.0);
        let m = m.normalized();
        assert_eq!(m.total_mass(), 1.0);
        assert_eq!(m.density(&0.0), 2.0);
    }

    #[test]
    fn histogram_mass_is_one() {
        let mut rng = stream(1, 0);
        let u = MeasureSpec::uniform(0.0, 1.0).unwrap();
        let mut h = Histogram::new(0.0, 1.0, 37).unwrap();
        for _ in 0..10_000 {
            h.add(u.sample(&mut rng));
        }
        let mass: f64 = h.densities().iter().map(|d| d * h.bin_width()).sum();
        assert!((mass - 1.0).abs() < 1e-12);
        let m = h.to_measure().unwrap();
        for _ in 0..100 {
            let x = m.sample(&mut rng);
            assert!((0.0..1.0).contains(&x));
        }
    }

    #[test]
    fn exponential_sampler_is_nonnegative() {
        let m = MeasureSpec::exponential(1.5).unwrap();
        let mut rng = stream(3, 0);
        assert!((0..1000).all(|_| m.sample(&mut rng) >= 0.0));
        assert!((m.density(&0.0) - 1.0 / 1.5).abs() < 1e-15);
    }
}
