use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use super::measure::MeasureSpec;
use crate::error::{domain, Error, Result};
use crate::numeric::CompensatedSum;
use crate::rng::stream;

type TriggerFn<E> = Box<dyn Fn(&E) -> bool + Send + Sync>;
type ClassifyFn<E> = Box<dyn Fn(&E) -> usize + Send + Sync>;

/// An n-outcome experiment run along a trajectory: `trigger` decides whether
/// an event is a trial, `classify` maps a trial to an outcome in
/// `0..n_outcomes`.
pub struct Experiment<E> {
    n_outcomes: usize,
    trigger: TriggerFn<E>,
    classify: ClassifyFn<E>,
}

impl<E> core::fmt::Debug for Experiment<E> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Experiment")
            .field("n_outcomes", &self.n_outcomes)
            .finish_non_exhaustive()
    }
}

impl<E> Experiment<E> {
    pub fn new<T, C>(n_outcomes: usize, trigger: T, classify: C) -> Result<Self>
    where
        T: Fn(&E) -> bool + Send + Sync + 'static,
        C: Fn(&E) -> usize + Send + Sync + 'static,
    {
        if n_outcomes == 0 {
            return Err(domain("an experiment needs at least one outcome"));
        }
        Ok(Self {
            n_outcomes,
            trigger: Box::new(trigger),
            classify: Box::new(classify),
        })
    }

    /// Experiment that runs on every event.
    pub fn every_event<C>(n_outcomes: usize, classify: C) -> Result<Self>
    where
        C: Fn(&E) -> usize + Send + Sync + 'static,
    {
        Self::new(n_outcomes, |_| true, classify)
    }

    pub fn n_outcomes(&self) -> usize {
        self.n_outcomes
    }
}

/// Outcome counts of an experiment along one trajectory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeRates {
    pub counts: Vec<u64>,
    pub trials: u64,
}

impl OutcomeRates {
    /// `C_i / n` per outcome.
    pub fn rates(&self) -> Vec<f64> {
        let n = self.trials as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// Whether enough trials were seen for the finite-horizon rate to stand in
    /// for the limit.
    pub fn is_stable(&self, n_min_trials: usize) -> bool {
        self.trials >= n_min_trials as u64
    }
}

/// Counts outcomes over the first `horizon` events of a trajectory.
pub fn evaluate_rates<I>(events: I, experiment: &Experiment<I::Item>, horizon: usize) -> Result<OutcomeRates>
where
    I: IntoIterator,
{
    let mut counts = vec![0u64; experiment.n_outcomes];
    let mut trials = 0u64;
    for event in events.into_iter().take(horizon) {
        if !(experiment.trigger)(&event) {
            continue;
        }
        let index = (experiment.classify)(&event);
        if index >= experiment.n_outcomes {
            return Err(Error::OutcomeOutOfRange {
                index,
                n_outcomes: experiment.n_outcomes,
            });
        }
        counts[index] += 1;
        trials += 1;
    }
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    Ok(OutcomeRates { counts, trials })
}

/// Ensemble mean and variance of the outcome rates.
#[derive(Debug, Clone, PartialEq)]
pub struct RateStatistics {
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    /// Trajectories that reached `n_min_trials` and entered the averages.
    pub n_trajectories: usize,
    pub n_excluded: usize,
    pub n_min_trials: usize,
}

impl RateStatistics {
    /// Standard error of the mean rate of outcome `i`.
    pub fn standard_error(&self, i: usize) -> f64 {
        libm::sqrt(self.variance[i] / self.n_trajectories as f64)
    }

    /// Aggregates per-trajectory rate vectors, in the given order.
    pub fn from_rates(rates: &[Vec<f64>], n_excluded: usize, n_min_trials: usize) -> Result<Self> {
        let Some(first) = rates.first() else {
            return Err(Error::EmptyEnsemble { n_min: n_min_trials });
        };
        let k = first.len();
        let n = rates.len() as f64;
        let mut sums = vec![CompensatedSum::default(); k];
        for r in rates {
            for (acc, x) in sums.iter_mut().zip(r) {
                acc.add(*x);
            }
        }
        let mean: Vec<f64> = sums.iter().map(|acc| acc.value() / n).collect();
        let mut sums = vec![CompensatedSum::default(); k];
        for r in rates {
            for ((acc, x), m) in sums.iter_mut().zip(r).zip(&mean) {
                acc.add((x - m) * (x - m));
            }
        }
        let variance: Vec<f64> = sums.iter().map(|acc| acc.value() / n).collect();
        Ok(Self {
            mean,
            variance,
            n_trajectories: rates.len(),
            n_excluded,
            n_min_trials,
        })
    }
}

/// Parameters of an ensemble run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnsembleConfig {
    pub n_traj: usize,
    /// Trajectories with fewer trials are left out of the averages.
    pub n_min_trials: usize,
    /// Maximum number of events examined per trajectory.
    pub horizon: usize,
    pub seed: u64,
}

/// Mean and variance of the rates over trajectories whose boundary points are
/// drawn from `measure`.
///
/// Trajectory `i` draws its boundary point from stream `(seed, i)` and results
/// are reduced in index order, so the output is a pure function of the
/// configuration.
pub fn ensemble_statistics<P, I, F>(
    measure: &MeasureSpec<P>,
    build: F,
    experiment: &Experiment<I::Item>,
    config: EnsembleConfig,
) -> Result<RateStatistics>
where
    F: Fn(&P) -> I,
    I: IntoIterator,
{
    if config.n_traj == 0 {
        return Err(domain("ensemble needs at least one trajectory"));
    }
    let mut rates = Vec::with_capacity(config.n_traj);
    let mut excluded = 0;
    for i in 0..config.n_traj {
        let mut rng = stream(config.seed, i as u64);
        let boundary = measure.sample(&mut rng);
        match evaluate_rates(build(&boundary), experiment, config.horizon) {
            Ok(r) if r.is_stable(config.n_min_trials) => rates.push(r.rates()),
            Ok(_) | Err(Error::NoTrials) => excluded += 1,
            Err(e) => return Err(e),
        }
    }
    RateStatistics::from_rates(&rates, excluded, config.n_min_trials)
}

/// An experiment is well defined when the rate variance of every outcome is
/// below `variance_tolerance`.
pub fn is_well_defined(stats: &RateStatistics, variance_tolerance: f64) -> bool {
    stats.variance.iter().all(|&v| v < variance_tolerance)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_classifier_gives_unit_rate() {
        let exp = Experiment::every_event(2, |_: &u32| 0).unwrap();
        let r = evaluate_rates(0..10u32, &exp, 100).unwrap();
        assert_eq!(r.rates(), vec![1.0, 0.0]);
        assert_eq!(r.trials, 10);
    }

    #[test]
    fn horizon_truncates() {
        let exp = Experiment::every_event(2, |e: &u32| (*e % 2) as usize).unwrap();
        let r = evaluate_rates(0..1000u32, &exp, 7).unwrap();
        assert_eq!(r.counts, vec![4, 3]);
    }

    #[test]
    fn no_trials_is_an_error() {
        let exp = Experiment::new(2, |_: &u32| false, |_| 0).unwrap();
        assert_eq!(evaluate_rates(0..5u32, &exp, 5), Err(Error::NoTrials));
    }

    #[test]
    fn out_of_range_outcome() {
        let exp = Experiment::every_event(2, |_: &u32| 2).unwrap();
        assert!(matches!(
            evaluate_rates(0..5u32, &exp, 5),
            Err(Error::OutcomeOutOfRange { index: 2, .. })
        ));
    }

    #[test]
    fn constant_outcome_ensemble_has_zero_variance() {
        let m = MeasureSpec::uniform(0.0, 1.0).unwrap();
        let exp = Experiment::every_event(2, |_: &f64| 0).unwrap();
        let cfg = EnsembleConfig {
            n_traj: 50,
            n_min_trials: 1,
            horizon: 10,
            seed: 9,
        };
        let s = ensemble_statistics(&m, |x| core::iter::repeat_n(*x, 10), &exp, cfg).unwrap();
        assert_eq!(s.mean, vec![1.0, 0.0]);
        assert_eq!(s.variance, vec![0.0, 0.0]);
        assert!(is_well_defined(&s, 1e-12));
    }

    #[test]
    fn all_excluded_is_empty_ensemble() {
        let m = MeasureSpec::uniform(0.0, 1.0).unwrap();
        let exp = Experiment::every_event(2, |_: &f64| 0).unwrap();
        let cfg = EnsembleConfig {
            n_traj: 5,
            n_min_trials: 100,
            horizon: 10,
            seed: 1,
        };
        let s = ensemble_statistics(&m, |x| core::iter::repeat_n(*x, 10), &exp, cfg);
        assert_eq!(s, Err(Error::EmptyEnsemble { n_min: 100 }));
    }

    #[test]
    fn well_defined_verdicts() {
        let stats = |v: f64| RateStatistics {
            mean: vec![0.5, 0.5],
            variance: vec![v, v],
            n_trajectories: 1,
            n_excluded: 0,
            n_min_trials: 1,
        };
        assert!(is_well_defined(&stats(1e-6), 1e-3));
        assert!(!is_well_defined(&stats(0.25), 1e-3));
    }

    #[test]
    fn point_mass_controls_rates() {
        // Every rate vector reachable from one boundary point is reproduced
        // exactly, with zero variance, by the point mass at that point.
        let target = 3.0;
        let m = MeasureSpec::point_mass(target).unwrap();
        let exp = Experiment::every_event(2, |e: &(f64, u64)| usize::from((e.1 as f64) < e.0)).unwrap();
        let cfg = EnsembleConfig {
            n_traj: 20,
            n_min_trials: 10,
            horizon: 10,
            seed: 4,
        };
        let s = ensemble_statistics(&m, |x| {
            let x = *x;
            (0..10u64).map(move |k| (x, k))
        }, &exp, cfg).unwrap();
        assert_eq!(s.mean, vec![0.7, 0.3]);
        assert_eq!(s.variance, vec![0.0, 0.0]);
    }
}
