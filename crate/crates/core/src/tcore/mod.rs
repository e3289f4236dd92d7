//! Trajectory systems: trajectories through configuration space, experiments
//! and their rates, ensemble statistics under a measure on boundary
//! conditions, and transfer of measures between boundary-condition spaces.

mod boundary;
mod determinism;
mod experiment;
mod measure;
mod trajectory;

pub use boundary::{pushforward, BoundaryMap, MAX_UNDEFINED_FRACTION};
pub use determinism::{check_determinism, DeterminismCheck};
pub use experiment::{
    ensemble_statistics, evaluate_rates, is_well_defined, EnsembleConfig, Experiment, OutcomeRates,
    RateStatistics,
};
pub use measure::{Histogram, MeasureSpec};
pub use trajectory::{BranchId, ConfigurationPoint, Path, Segment, Trajectory};
