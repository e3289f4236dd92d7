use alloc::vec::Vec;

use crate::error::{domain, Result};

/// A point of a (possibly piecewise) configuration space.
///
/// `sector` separates the pieces of a disjoint union such as the one-particle
/// and two-particle spaces of a decay; points in different sectors are never
/// close to each other.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigurationPoint {
    pub coords: Vec<f64>,
    pub sector: Option<u32>,
}

impl ConfigurationPoint {
    pub fn new(coords: Vec<f64>) -> Self {
        Self { coords, sector: None }
    }

    pub fn in_sector(coords: Vec<f64>, sector: u32) -> Self {
        Self {
            coords,
            sector: Some(sector),
        }
    }

    pub fn dimension(&self) -> usize {
        self.coords.len()
    }

    /// Max-norm distance; infinite across sectors or dimensions.
    pub fn distance(&self, other: &Self) -> f64 {
        if self.sector != other.sector || self.coords.len() != other.coords.len() {
            return f64::INFINITY;
        }
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Identifier of one indeterministic continuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BranchId(pub i32);

/// Path over one time segment.
#[derive(Debug, Clone, PartialEq)]
pub enum Path {
    /// `x(t) = origin + velocity * (t - start)`.
    Affine { origin: Vec<f64>, velocity: Vec<f64> },
    /// Linear interpolation between samples; `times` strictly increasing.
    Sampled { times: Vec<f64>, points: Vec<Vec<f64>> },
}

impl Path {
    pub fn dimension(&self) -> usize {
        match self {
            Path::Affine { origin, .. } => origin.len(),
            Path::Sampled { points, .. } => points.first().map_or(0, Vec::len),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub sector: Option<u32>,
    pub path: Path,
}

impl Segment {
    pub fn affine(start: f64, end: f64, origin: Vec<f64>, velocity: Vec<f64>) -> Self {
        Self {
            start,
            end,
            sector: None,
            path: Path::Affine { origin, velocity },
        }
    }

    pub fn sampled(times: Vec<f64>, points: Vec<Vec<f64>>) -> Self {
        let start = times.first().copied().unwrap_or(0.0);
        let end = times.last().copied().unwrap_or(0.0);
        Self {
            start,
            end,
            sector: None,
            path: Path::Sampled { times, points },
        }
    }

    pub fn with_sector(mut self, sector: u32) -> Self {
        self.sector = Some(sector);
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.end >= self.start) {
            return Err(domain("segment end precedes its start"));
        }
        match &self.path {
            Path::Affine { origin, velocity } => {
                if origin.len() != velocity.len() {
                    return Err(domain("affine origin and velocity differ in dimension"));
                }
            }
            Path::Sampled { times, points } => {
                if times.is_empty() || times.len() != points.len() {
                    return Err(domain("sampled path needs one point per time"));
                }
                if times.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(domain("sample times must increase strictly"));
                }
                let d = points[0].len();
                if points.iter().any(|p| p.len() != d) {
                    return Err(domain("sampled points differ in dimension"));
                }
            }
        }
        Ok(())
    }

    fn coords_at(&self, t: f64) -> Vec<f64> {
        match &self.path {
            Path::Affine { origin, velocity } => {
                let dt = t - self.start;
                origin.iter().zip(velocity).map(|(x, v)| x + v * dt).collect()
            }
            Path::Sampled { times, points } => {
                let k = times.partition_point(|&s| s <= t);
                if k == 0 {
                    return points[0].clone();
                }
                if k == times.len() {
                    return points[k - 1].clone();
                }
                let (t0, t1) = (times[k - 1], times[k]);
                let w = (t - t0) / (t1 - t0);
                points[k - 1]
                    .iter()
                    .zip(&points[k])
                    .map(|(a, b)| a + w * (b - a))
                    .collect()
            }
        }
    }
}

/// A time-parameterized path through configuration space made of contiguous
/// segments, optionally labelled with the branch it belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    segments: Vec<Segment>,
    branch: Option<BranchId>,
}

impl Trajectory {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(domain("trajectory needs at least one segment"));
        }
        for s in &segments {
            s.validate()?;
        }
        for w in segments.windows(2) {
            let scale = w[0].end.abs().max(w[1].start.abs()).max(1.0);
            if (w[0].end - w[1].start).abs() > 1e-12 * scale {
                return Err(domain("segments must be contiguous in time"));
            }
        }
        Ok(Self {
            segments,
            branch: None,
        })
    }

    pub fn with_branch(mut self, branch: BranchId) -> Self {
        self.branch = Some(branch);
        self
    }

    pub fn branch(&self) -> Option<BranchId> {
        self.branch
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn start(&self) -> f64 {
        self.segments[0].start
    }

    pub fn end(&self) -> f64 {
        self.segments[self.segments.len() - 1].end
    }

    /// Configuration at time `t`, or `None` outside the time domain.
    ///
    /// Segment boundaries belong to the later segment, except the final end
    /// point.
    pub fn evaluate(&self, t: f64) -> Option<ConfigurationPoint> {
        if t < self.start() || t > self.end() {
            return None;
        }
        let seg = self
            .segments
            .iter()
            .find(|s| t >= s.start && t < s.end)
            .unwrap_or(&self.segments[self.segments.len() - 1]);
        Some(ConfigurationPoint {
            coords: seg.coords_at(t),
            sector: seg.sector,
        })
    }

    pub fn dimension_at(&self, t: f64) -> Option<usize> {
        self.evaluate(t).map(|p| p.dimension())
    }

}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn affine_then_sampled() {
        let t = Trajectory::new(vec![
            Segment::affine(0.0, 1.0, vec![0.0], vec![2.0]),
            Segment::sampled(vec![1.0, 2.0], vec![vec![2.0], vec![0.0]]),
        ])
        .unwrap();
        assert_eq!(t.evaluate(0.5).unwrap().coords, vec![1.0]);
        assert_eq!(t.evaluate(1.5).unwrap().coords, vec![1.0]);
        assert_eq!(t.evaluate(2.0).unwrap().coords, vec![0.0]);
        assert!(t.evaluate(2.5).is_none());
        assert!(t.segments().iter().all(|s| s.path.dimension() == 1));
    }

    #[test]
    fn rejects_gaps() {
        let err = Trajectory::new(vec![
            Segment::affine(0.0, 1.0, vec![0.0], vec![1.0]),
            Segment::affine(1.5, 2.0, vec![0.0], vec![1.0]),
        ]);
        assert!(err.is_err());
    }

    #[test]
    fn sectors_are_far_apart() {
        let a = ConfigurationPoint::in_sector(vec![0.0], 1);
        let b = ConfigurationPoint::in_sector(vec![0.0], 2);
        assert!(a.distance(&b).is_infinite());
        assert_eq!(a.distance(&a), 0.0);
    }
}
