use alloc::vec::Vec;

use super::trajectory::{ConfigurationPoint, Trajectory};

/// Parameters of the indeterminism search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeterminismCheck {
    /// Length of the window on which two trajectories must coincide.
    pub window: f64,
    /// Max-norm distance under which two configurations count as equal.
    pub tolerance: f64,
    /// Spacing of the sampling grid.
    pub grid_step: f64,
}

/// Searches for an indeterminism witness: two trajectories (or one trajectory
/// and a time shift of itself) that coincide on a window of length `window`
/// and differ afterwards. Returns `false` if such a pair exists.
///
/// Each trajectory is sampled on its own grid starting at its first time; the
/// comparison is pointwise on those grids.
pub fn check_determinism(trajectories: &[Trajectory], check: DeterminismCheck) -> bool {
    let grid_step = check.grid_step;
    assert!(grid_step > 0.0, "grid step must be positive");
    let window_steps = libm::ceil(check.window / grid_step) as usize;
    let samples: Vec<Vec<ConfigurationPoint>> = trajectories
        .iter()
        .map(|t| {
            let n = libm::floor((t.end() - t.start()) / grid_step + 1e-9) as usize;
            (0..=n)
                .filter_map(|k| t.evaluate(t.start() + grid_step * k as f64))
                .collect()
        })
        .collect();

    for i in 0..samples.len() {
        for j in i..samples.len() {
            if has_witness(&samples[i], &samples[j], i == j, window_steps, check.tolerance) {
                return false;
            }
        }
    }
    true
}

/// Agreement runs along diagonals of the pairwise closeness matrix: a run of
/// at least `window + 1` coinciding samples that stops before either sequence
/// ends is a witness.
fn has_witness(
    a: &[ConfigurationPoint],
    b: &[ConfigurationPoint],
    same: bool,
    window: usize,
    tolerance: f64,
) -> bool {
    let (na, nb) = (a.len(), b.len());
    if na == 0 || nb == 0 {
        return false;
    }
    // run[j] holds the agreement run starting at (i + 1, j) while sweeping i
    // downward.
    let mut next = alloc::vec![0usize; nb + 1];
    let mut cur = alloc::vec![0usize; nb + 1];
    for ia in (0..na).rev() {
        for jb in (0..nb).rev() {
            cur[jb] = if a[ia].distance(&b[jb]) <= tolerance {
                1 + next[jb + 1]
            } else {
                0
            };
            if same && ia == jb {
                continue;
            }
            let run = cur[jb];
            if run > window && ia + run < na && jb + run < nb {
                return true;
            }
        }
        core::mem::swap(&mut cur, &mut next);
        cur[nb] = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tcore::trajectory::Segment;
    use alloc::vec;

    fn line(y0: f64, vy: f64) -> Trajectory {
        Trajectory::new(vec![Segment::affine(0.0, 10.0, vec![0.0, y0], vec![1.0, vy])]).unwrap()
    }

    const CHECK: DeterminismCheck = DeterminismCheck {
        window: 1.0,
        tolerance: 1e-9,
        grid_step: 0.1,
    };

    #[test]
    fn distinct_lines_are_deterministic() {
        assert!(check_determinism(&[line(0.0, 0.0), line(1.0, 0.0)], CHECK));
        assert!(check_determinism(&[line(0.0, 0.0), line(0.0, 0.5)], CHECK));
    }

    #[test]
    fn branching_lines_are_not() {
        let straight = line(0.0, 0.0);
        let kinked = Trajectory::new(vec![
            Segment::affine(0.0, 3.0, vec![0.0, 0.0], vec![1.0, 0.0]),
            Segment::affine(3.0, 10.0, vec![3.0, 0.0], vec![1.0, 1.0]),
        ])
        .unwrap();
        assert!(!check_determinism(&[straight, kinked], CHECK));
    }

    #[test]
    fn short_agreement_is_not_a_witness() {
        let straight = line(0.0, 0.0);
        let kinked = Trajectory::new(vec![
            Segment::affine(0.0, 0.5, vec![0.0, 0.0], vec![1.0, 0.0]),
            Segment::affine(0.5, 10.0, vec![0.5, 0.0], vec![1.0, 1.0]),
        ])
        .unwrap();
        assert!(check_determinism(&[straight, kinked], CHECK));
    }
}
