//! A point source, a charged wire between two electrodes, and a screen.
//!
//! The source sits at the origin and emits in the plane with a small angle
//! `alpha` from the axis. The wire crosses the axis at distance `wire_distance`;
//! with the field on, a ray passing on either side is bent toward the axis by
//! a fixed angle `kick`, so the two sides overlap on the screen as if they
//! came from two virtual sources. The wire absorbs rays that hit it.
//!
//! The emission measure that reproduces a chosen screen density is obtained by
//! pulling the density back through the deflection map, one branch per side of
//! the wire.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, RngCore};

use crate::error::{domain, Error, Result};
use crate::numeric::{bisect, GaussLegendre};
use crate::tcore::MeasureSpec;

/// Envelope multiplying the two-source modulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Envelope {
    Flat,
    Gaussian { width: f64 },
}

impl Envelope {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Envelope::Flat => 1.0,
            Envelope::Gaussian { width } => libm::exp(-0.5 * (x / width) * (x / width)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiprismScene {
    wire_distance: f64,
    wire_radius: f64,
    kick: f64,
    screen_distance: f64,
    aperture: f64,
    wavelength: f64,
    field_on: bool,
    envelope: Envelope,
}

impl BiprismScene {
    /// `aperture` is the largest emission angle the source produces.
    pub fn new(
        wire_distance: f64,
        wire_radius: f64,
        kick: f64,
        screen_distance: f64,
        aperture: f64,
        wavelength: f64,
    ) -> Result<Self> {
        if !(screen_distance > 0.0 && screen_distance.is_finite()) {
            return Err(domain("screen distance must be positive"));
        }
        if !(wire_distance > 0.0 && wire_distance < screen_distance) {
            return Err(domain("wire must lie between source and screen"));
        }
        if !(wire_radius >= 0.0) {
            return Err(domain("wire radius must be nonnegative"));
        }
        if !(kick > 0.0 && kick < 0.5 * PI) {
            return Err(domain("kick angle must lie in (0, pi/2)"));
        }
        if !(aperture < 0.5 * PI && aperture > libm::atan(wire_radius / wire_distance)) {
            return Err(domain("aperture must exceed the wire shadow and stay below pi/2"));
        }
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(domain("wavelength must be positive"));
        }
        Ok(Self {
            wire_distance,
            wire_radius,
            kick,
            screen_distance,
            aperture,
            wavelength,
            field_on: true,
            envelope: Envelope::Flat,
        })
    }

    pub fn with_field(mut self, on: bool) -> Self {
        self.field_on = on;
        self
    }

    pub fn with_envelope(mut self, envelope: Envelope) -> Result<Self> {
        if let Envelope::Gaussian { width } = envelope {
            if !(width > 0.0 && width.is_finite()) {
                return Err(domain("envelope width must be positive"));
            }
        }
        self.envelope = envelope;
        Ok(self)
    }

    pub fn field_on(&self) -> bool {
        self.field_on
    }

    pub fn envelope(&self) -> Envelope {
        self.envelope
    }

    pub fn wire_distance(&self) -> f64 {
        self.wire_distance
    }

    pub fn wire_radius(&self) -> f64 {
        self.wire_radius
    }

    pub fn kick(&self) -> f64 {
        self.kick
    }

    pub fn screen_distance(&self) -> f64 {
        self.screen_distance
    }

    pub fn aperture(&self) -> f64 {
        self.aperture
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// Distance between the two virtual sources seen from the screen.
    pub fn separation(&self) -> f64 {
        2.0 * self.wire_distance * libm::tan(self.kick)
    }

    pub fn fringe_spacing(&self) -> f64 {
        self.wavelength * self.screen_distance / self.separation()
    }

    /// Half-angle subtended by the wire.
    pub fn shadow_angle(&self) -> f64 {
        libm::atan(self.wire_radius / self.wire_distance)
    }

    /// Angular kick for a ray passing on side `sign` of the wire; an axial
    /// ray (`sign = 0`) is not kicked.
    fn kick_for(&self, sign: f64) -> f64 {
        if self.field_on {
            self.kick * sign
        } else {
            0.0
        }
    }

    fn position(&self, alpha: f64) -> f64 {
        self.position_on(alpha, side(alpha))
    }

    fn position_on(&self, alpha: f64, sign: f64) -> f64 {
        let after = self.screen_distance - self.wire_distance;
        self.wire_distance * libm::tan(alpha) + after * libm::tan(alpha - self.kick_for(sign))
    }

    /// `dx/dalpha` away from the axis.
    fn slope(&self, alpha: f64) -> f64 {
        let sec2 = |a: f64| {
            let c = libm::cos(a);
            1.0 / (c * c)
        };
        let after = self.screen_distance - self.wire_distance;
        self.wire_distance * sec2(alpha) + after * sec2(alpha - self.kick_for(side(alpha)))
    }

    /// Angular interval of the branch passing on the side `sign` of the wire.
    fn branch_domain(&self, sign: f64) -> (f64, f64) {
        let (lo, hi) = (self.shadow_angle(), self.aperture);
        if sign > 0.0 {
            (lo, hi)
        } else {
            (-hi, -lo)
        }
    }

    /// Screen interval reached by the branch on side `sign`.
    fn branch_image(&self, sign: f64) -> (f64, f64) {
        let (a, b) = self.branch_domain(sign);
        (self.position_on(a, sign), self.position_on(b, sign))
    }

    fn branches_reaching(&self, x: f64) -> usize {
        [1.0, -1.0]
            .iter()
            .filter(|&&s| {
                let (lo, hi) = self.branch_image(s);
                x >= lo && x <= hi
            })
            .count()
    }

    /// Screen interval reached from both sides of the wire. Empty with the
    /// field off.
    pub fn overlap_window(&self) -> Result<(f64, f64)> {
        let (p_lo, p_hi) = self.branch_image(1.0);
        let (m_lo, m_hi) = self.branch_image(-1.0);
        let (lo, hi) = (p_lo.max(m_lo), p_hi.min(m_hi));
        if !(hi > lo) {
            return Err(Error::Unsupported("the two beams do not overlap on the screen".into()));
        }
        Ok((lo, hi))
    }

    /// Screen position from the emission angle, the inverse restricted to one
    /// side of the wire.
    fn invert(&self, x: f64, sign: f64) -> Option<f64> {
        let (a, b) = self.branch_domain(sign);
        let (lo, hi) = self.branch_image(sign);
        if x < lo || x > hi {
            return None;
        }
        if x == lo {
            return Some(a);
        }
        if x == hi {
            return Some(b);
        }
        bisect(|t| self.position_on(t, sign) - x, a, b, 1e-16)
    }
}

fn side(alpha: f64) -> f64 {
    if alpha > 0.0 {
        1.0
    } else if alpha < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Screen position hit by a ray emitted at `alpha`.
pub fn biprism_deflection(alpha: f64, scene: &BiprismScene) -> Result<f64> {
    if !(alpha.abs() <= scene.aperture) {
        return Err(domain("emission angle outside the source aperture"));
    }
    if (scene.wire_distance * libm::tan(alpha)).abs() < scene.wire_radius {
        return Err(Error::Absorbed);
    }
    Ok(scene.position(alpha))
}

/// Normalized density on a screen window `[lo, hi]`.
#[derive(Clone)]
pub struct ScreenDensity {
    lo: f64,
    hi: f64,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    norm: f64,
    bound: f64,
}

impl core::fmt::Debug for ScreenDensity {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ScreenDensity")
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .finish_non_exhaustive()
    }
}

const PANELS: usize = 2048;

impl ScreenDensity {
    /// Normalizes the nonnegative function `f` on `[lo, hi]`. `bound` must
    /// dominate `f` there; it drives rejection sampling.
    pub fn new<F>(lo: f64, hi: f64, f: F, bound: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(domain("screen window needs lo < hi"));
        }
        let norm = GaussLegendre::new(16).integrate(&f, lo, hi, PANELS);
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::DegenerateMeasure(norm));
        }
        Ok(Self { lo, hi, f: Arc::new(f), norm, bound })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, |_| 1.0, 1.0)
    }

    pub fn window(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn value(&self, x: f64) -> f64 {
        if x >= self.lo && x <= self.hi {
            (self.f)(x) / self.norm
        } else {
            0.0
        }
    }

    pub fn bin_mass(&self, x0: f64, x1: f64) -> f64 {
        let (a, b) = (x0.max(self.lo), x1.min(self.hi));
        if !(b > a) {
            return 0.0;
        }
        GaussLegendre::new(16).integrate(|x| self.value(x), a, b, 4)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        loop {
            let x = self.lo + (self.hi - self.lo) * rng.random::<f64>();
            if rng.random::<f64>() * self.bound <= (self.f)(x) {
                return x;
            }
        }
    }
}

/// Two-source fringe pattern on the overlap window.
pub fn fringe_target_density(scene: &BiprismScene) -> Result<ScreenDensity> {
    if !scene.field_on {
        return Err(Error::Unsupported("fringe target needs the field on".into()));
    }
    let (lo, hi) = scene.overlap_window()?;
    let k = 2.0 * PI / scene.fringe_spacing();
    let env = scene.envelope;
    ScreenDensity::new(lo, hi, move |x| (1.0 + libm::cos(k * x)) * env.value(x), 2.0)
}

/// The envelope alone on the same window as [`fringe_target_density`].
pub fn envelope_density(scene: &BiprismScene) -> Result<ScreenDensity> {
    let (lo, hi) = scene.with_field(true).overlap_window()?;
    let env = scene.envelope;
    ScreenDensity::new(lo, hi, move |x| env.value(x), 1.0)
}

/// Density over emission angle whose image on the screen is `target`.
///
/// Where both sides of the wire reach a screen point, the target mass there
/// is split equally between them.
pub fn emission_measure_from_screen(target: &ScreenDensity, scene: &BiprismScene) -> Result<MeasureSpec<f64>> {
    // every screen point carrying target mass must be reachable
    let probes = 257;
    for i in 0..probes {
        let x = target.lo + (target.hi - target.lo) * i as f64 / (probes - 1) as f64;
        if target.value(x) > 0.0 && scene.branches_reaching(x) == 0 {
            return Err(Error::Unsupported("target density lies outside the reachable screen".into()));
        }
    }
    let density_scene = *scene;
    let density_target = target.clone();
    let density = move |alpha: &f64| -> f64 {
        let alpha = *alpha;
        let Ok(x) = biprism_deflection(alpha, &density_scene) else {
            return 0.0;
        };
        let n = density_scene.branches_reaching(x);
        if n == 0 {
            return 0.0;
        }
        density_target.value(x) * density_scene.slope(alpha) / n as f64
    };
    let sample_scene = *scene;
    let sample_target = target.clone();
    let sampler = move |rng: &mut dyn RngCore| -> f64 {
        loop {
            let x = sample_target.sample(rng);
            let sides: Vec<f64> = [1.0, -1.0]
                .into_iter()
                .filter(|&s| {
                    let (lo, hi) = sample_scene.branch_image(s);
                    x >= lo && x <= hi
                })
                .collect();
            if sides.is_empty() {
                continue;
            }
            let side = sides[rng.random_range(0..sides.len())];
            if let Some(alpha) = sample_scene.invert(x, side) {
                return alpha;
            }
        }
    };
    MeasureSpec::new(1, density, sampler, 1.0)
}

/// Source that ignores the downstream device: uniform over the aperture,
/// with the rays stopped by the wire removed.
pub fn uniform_emission(scene: &BiprismScene) -> Result<MeasureSpec<f64>> {
    let (w, a) = (scene.shadow_angle(), scene.aperture);
    let width = 2.0 * (a - w);
    MeasureSpec::new(
        1,
        move |alpha: &f64| {
            let t = alpha.abs();
            if t >= w && t <= a {
                1.0 / width
            } else {
                0.0
            }
        },
        move |rng: &mut dyn RngCore| {
            let t = w + (a - w) * rng.random::<f64>();
            if rng.random::<bool>() {
                t
            } else {
                -t
            }
        },
        1.0,
    )
}

/// Mass that the emission density sends into each screen bin, integrating the
/// density over the preimage of the bin on each side of the wire.
pub fn screen_bin_masses(emission: &MeasureSpec<f64>, scene: &BiprismScene, edges: &[f64]) -> Result<Vec<f64>> {
    if edges.len() < 2 || edges.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::GridMismatch("bin edges must be increasing".into()));
    }
    let gl = GaussLegendre::new(16);
    let total = emission.total_mass();
    let mut out = Vec::with_capacity(edges.len() - 1);
    for w in edges.windows(2) {
        let mut mass = 0.0;
        for side in [1.0, -1.0] {
            let (lo, hi) = scene.branch_image(side);
            let (x0, x1) = (w[0].max(lo), w[1].min(hi));
            if !(x1 > x0) {
                continue;
            }
            let (Some(a0), Some(a1)) = (scene.invert(x0, side), scene.invert(x1, side)) else {
                continue;
            };
            mass += gl.integrate(|a| emission.density(&a), a0, a1, 4);
        }
        out.push(mass / total);
    }
    Ok(out)
}

/// Half the L1 distance between two normalized angular densities.
pub fn total_variation(p: &MeasureSpec<f64>, q: &MeasureSpec<f64>, scene: &BiprismScene) -> f64 {
    let a = scene.aperture;
    0.5 * GaussLegendre::new(16).integrate(
        |t| (p.normalized_density(&t) - q.normalized_density(&t)).abs(),
        -a,
        a,
        8192,
    )
}

/// `(max - min) / (max + min)` of a sampled pattern.
pub fn visibility(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if max + min > 0.0 {
        (max - min) / (max + min)
    } else {
        0.0
    }
}

/// Period of the strongest spatial modulation in a uniformly sampled pattern,
/// found by scanning a Hann-windowed Fourier sum.
pub fn dominant_spacing(xs: &[f64], values: &[f64]) -> Option<f64> {
    let n = xs.len();
    if n < 8 || values.len() != n {
        return None;
    }
    let (lo, hi) = (xs[0], xs[n - 1]);
    let span = hi - lo;
    let dx = span / (n - 1) as f64;
    let weights: Vec<f64> = xs.iter().map(|x| 0.5 * (1.0 - libm::cos(2.0 * PI * (x - lo) / span))).collect();
    let wsum: f64 = weights.iter().sum();
    let mean = weights.iter().zip(values).map(|(w, v)| w * v).sum::<f64>() / wsum;
    let power = |k: f64| {
        let (mut re, mut im) = (0.0, 0.0);
        for ((x, v), w) in xs.iter().zip(values).zip(&weights) {
            let d = w * (v - mean);
            re += d * libm::cos(k * x);
            im += d * libm::sin(k * x);
        }
        re * re + im * im
    };
    // the Hann main lobe is 4 pi / span wide, so start past it
    let (k_lo, k_hi) = (4.0 * PI / span, PI / dx);
    let steps = 4000;
    let dk = (k_hi - k_lo) / steps as f64;
    let mut best = (k_lo, power(k_lo));
    for i in 1..=steps {
        let k = k_lo + dk * i as f64;
        let p = power(k);
        if p > best.1 {
            best = (k, p);
        }
    }
    // golden-section refinement inside the winning cell
    let (mut a, mut b) = ((best.0 - dk).max(k_lo), (best.0 + dk).min(k_hi));
    let g = 0.5 * (libm::sqrt(5.0) - 1.0);
    for _ in 0..80 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if power(c) > power(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let k = 0.5 * (a + b);
    (k > 0.0).then(|| 2.0 * PI / k)
}

/// Screen and emission statistics of one scene with the field on and off.
#[derive(Debug, Clone, PartialEq)]
pub struct BiprismReport {
    /// Edges of equal bins over the overlap window.
    pub edges: Vec<f64>,
    pub target_mass: Vec<f64>,
    /// Bin masses from the emission measure built for the fringe target.
    pub mass_on: Vec<f64>,
    /// Bin masses from the uniform source with the field off.
    pub mass_off: Vec<f64>,
    pub visibility_on: f64,
    pub visibility_off: f64,
    pub total_variation: f64,
    pub spacing_measured: Option<f64>,
    pub spacing_expected: f64,
    /// Largest bin-mass gap between the reproduced screen and the target.
    pub round_trip_error: f64,
}

/// Builds the emission measure reproducing the fringe target, pushes it and
/// the device-independent source forward, and compares them on `n_bins`
/// screen bins across the overlap window.
pub fn analyze_biprism(scene: &BiprismScene, n_bins: usize) -> Result<BiprismReport> {
    if n_bins < 8 {
        return Err(domain("need at least 8 screen bins"));
    }
    let on = scene.with_field(true);
    let off = scene.with_field(false);
    let target = fringe_target_density(&on)?;
    let emission_on = emission_measure_from_screen(&target, &on)?;
    let emission_off = uniform_emission(&off)?;
    let (lo, hi) = target.window();
    let edges: Vec<f64> = (0..=n_bins).map(|i| lo + (hi - lo) * i as f64 / n_bins as f64).collect();
    let target_mass: Vec<f64> = edges.windows(2).map(|w| target.bin_mass(w[0], w[1])).collect();
    let mass_on = screen_bin_masses(&emission_on, &on, &edges)?;
    let mass_off = screen_bin_masses(&emission_off, &off, &edges)?;
    let width = (hi - lo) / n_bins as f64;
    let centers: Vec<f64> = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let dens_on: Vec<f64> = mass_on.iter().map(|m| m / width).collect();
    let dens_off: Vec<f64> = mass_off.iter().map(|m| m / width).collect();
    let round_trip_error = mass_on.iter().zip(&target_mass).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(BiprismReport {
        visibility_on: visibility(&dens_on),
        visibility_off: visibility(&dens_off),
        total_variation: total_variation(&emission_on, &emission_off, scene),
        spacing_measured: dominant_spacing(&centers, &dens_on),
        spacing_expected: on.fringe_spacing(),
        round_trip_error,
        edges,
        target_mass,
        mass_on,
        mass_off,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::linspace;
    use crate::rng::stream;

    fn scene() -> BiprismScene {
        BiprismScene::new(0.4, 0.0, 0.02, 1.0, 0.05, 4e-5).unwrap()
    }

    #[test]
    fn field_off_is_ballistic() {
        let s = scene().with_field(false);
        assert_eq!(biprism_deflection(0.0, &s).unwrap(), 0.0);
        for a in [-0.04, -0.01, 0.003, 0.049] {
            let x = biprism_deflection(a, &s).unwrap();
            assert!((x - libm::tan(a)).abs() < 1e-15);
        }
        assert!(biprism_deflection(0.06, &s).is_err());
    }

    #[test]
    fn wire_absorbs() {
        let s = BiprismScene::new(0.4, 1e-3, 0.02, 1.0, 0.05, 4e-5).unwrap();
        assert_eq!(biprism_deflection(1e-3, &s), Err(Error::Absorbed));
        assert_eq!(biprism_deflection(-2e-3, &s), Err(Error::Absorbed));
        assert!(biprism_deflection(3e-3, &s).is_ok());
    }

    #[test]
    fn both_sides_reach_the_axis() {
        let s = scene();
        let a = s.invert(0.0, 1.0).unwrap();
        let b = s.invert(0.0, -1.0).unwrap();
        assert!(a > 0.0 && b < 0.0);
        assert!(biprism_deflection(a, &s).unwrap().abs() < 1e-14);
        assert!(biprism_deflection(b, &s).unwrap().abs() < 1e-14);
        // small-angle geometry: the positive side crosses the axis near
        // alpha = (L - D) kick / L
        assert!((a - 0.6 * 0.02).abs() < 1e-4);
    }

    #[test]
    fn fringe_target_shape() {
        let s = scene();
        let t = fringe_target_density(&s).unwrap();
        let dx = s.fringe_spacing();
        assert!(t.value(0.0) > t.value(0.1 * dx));
        assert!(t.value(0.5 * dx).abs() < 1e-12 * t.value(0.0));
        assert!((t.bin_mass(t.lo, t.hi) - 1.0).abs() < 1e-12);
        assert!(fringe_target_density(&s.with_field(false)).is_err());
    }

    #[test]
    fn pullback_round_trip() {
        let s = scene();
        let t = fringe_target_density(&s).unwrap();
        let m = emission_measure_from_screen(&t, &s).unwrap();
        // the density jumps at the window edges, so plain quadrature is rough
        let mass = GaussLegendre::new(16).integrate(|a| m.density(&a), -s.aperture(), s.aperture(), 8192);
        assert!((mass - 1.0).abs() < 1e-3, "{mass}");
        let (lo, hi) = t.window();
        let whole = screen_bin_masses(&m, &s, &[lo, hi]).unwrap();
        assert!((whole[0] - 1.0).abs() < 1e-10);
        let edges = linspace(lo, hi, 201);
        let got = screen_bin_masses(&m, &s, &edges).unwrap();
        for (w, g) in edges.windows(2).zip(&got) {
            let want = t.bin_mass(w[0], w[1]);
            assert!((g - want).abs() < 1e-10, "{g} {want}");
        }
    }

    #[test]
    fn uniform_target_off_gives_near_uniform_angles() {
        let s = scene().with_field(false);
        let t = ScreenDensity::uniform(-0.03, 0.03).unwrap();
        let m = emission_measure_from_screen(&t, &s).unwrap();
        let a = libm::atan(0.03);
        for alpha in [-0.025, -0.001, 0.01, 0.029] {
            let d = m.density(&alpha);
            // x = tan(alpha) is linear to second order
            assert!((d * 2.0 * a - 1.0).abs() < 2e-3, "{d}");
        }
        assert_eq!(m.density(&0.04), 0.0);
    }

    #[test]
    fn unreachable_target_is_rejected() {
        let s = scene();
        let t = ScreenDensity::uniform(0.5, 0.6).unwrap();
        assert!(matches!(emission_measure_from_screen(&t, &s), Err(Error::Unsupported(_))));
    }

    #[test]
    fn sampler_follows_density() {
        let s = scene();
        let t = fringe_target_density(&s).unwrap();
        let m = emission_measure_from_screen(&t, &s).unwrap();
        let mut rng = stream(11, 0);
        let (lo, hi) = t.window();
        let mut inside = 0;
        let n = 4000;
        let mut hits = 0usize;
        let dx = s.fringe_spacing();
        for _ in 0..n {
            let a = m.sample(&mut rng);
            let x = biprism_deflection(a, &s).unwrap();
            if x >= lo && x <= hi {
                inside += 1;
            }
            // near a fringe null
            if ((x / dx).rem_euclid(1.0) - 0.5).abs() < 0.05 {
                hits += 1;
            }
        }
        assert_eq!(inside, n);
        // a 10% band around the nulls holds well under 1% of the mass
        assert!(hits < n / 100, "{hits}");
    }

    #[test]
    fn spacing_estimate() {
        let xs = linspace(-1.0, 1.0, 801);
        let vs: Vec<f64> = xs.iter().map(|x| 1.0 + libm::cos(2.0 * PI * x / 0.137)).collect();
        let d = dominant_spacing(&xs, &vs).unwrap();
        assert!((d / 0.137 - 1.0).abs() < 1e-3, "{d}");
    }

    #[test]
    fn report_separates_field_states() {
        let r = analyze_biprism(&scene(), 400).unwrap();
        assert!(r.visibility_on > 0.9, "{}", r.visibility_on);
        assert!(r.visibility_off < 0.05, "{}", r.visibility_off);
        assert!(r.total_variation > 0.1, "{}", r.total_variation);
        let d = r.spacing_measured.unwrap();
        assert!((d / r.spacing_expected - 1.0).abs() < 0.02, "{d} {}", r.spacing_expected);
        assert!(r.round_trip_error < 1e-10);
    }

    #[test]
    fn visibility_of_cosine() {
        let vs: Vec<f64> = (0..100).map(|i| 1.0 + libm::cos(i as f64 * 0.1 * PI)).collect();
        assert!((visibility(&vs) - 1.0).abs() < 1e-12);
        assert_eq!(visibility(&[2.0, 2.0]), 0.0);
    }
}
