use serde::{Deserialize, Serialize};
use traject_core::bernoulli::{
    biased_measure, ensemble_rate, orbit_events, orbit_rate, BernoulliState, Rational, YES,
};
use traject_core::tcore::is_well_defined;

use super::{doc, ParamDoc, Scenario};
use crate::output::{Csv, OutputFile, PlotData};

pub struct Bernoulli;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub n_traj: usize,
    pub n_steps: usize,
    pub bias: f64,
    pub variance_tolerance: f64,
    pub orbit_numerator: u64,
    pub orbit_denominator: u64,
    pub orbit_steps: usize,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            n_traj: 10_000,
            n_steps: 1_000,
            bias: 0.5,
            variance_tolerance: 0.01,
            orbit_numerator: 2,
            orbit_denominator: 7,
            orbit_steps: 3_000,
        }
    }
}

impl Scenario for Bernoulli {
    const NAME: &'static str = "bernoulli";
    const SUMMARY: &'static str = "doubling map: yes-rate over an ensemble of digit strings and along one rational orbit";
    const DOCS: &'static [ParamDoc] = &[
        doc("n_traj", "trajectories in the ensemble"),
        doc("n_steps", "steps per trajectory"),
        doc("bias", "probability of a one digit under the ensemble measure (0.5 is Lebesgue)"),
        doc("variance_tolerance", "rate variance below which the experiment counts as well defined"),
        doc("orbit_numerator", "numerator of the exact starting point of the single orbit"),
        doc("orbit_denominator", "denominator of that starting point"),
        doc("orbit_steps", "steps along the single orbit"),
    ];
    const SEED: &'static str = "required";

    type Params = Params;

    fn needs_seed(_: &Params) -> bool {
        true
    }

    fn template() -> Params {
        Params::default()
    }

    fn run(p: &Params, seed: u64) -> anyhow::Result<Vec<OutputFile>> {
        let measure = biased_measure(p.bias, p.n_steps)?;
        let stats = ensemble_rate(&measure, p.n_traj, p.n_steps, seed)?;
        let x0 = BernoulliState::Exact(Rational::new(p.orbit_numerator, p.orbit_denominator)?);
        let orbit = orbit_rate(&x0, p.orbit_steps)?;

        let mut results = Csv::quantities();
        results
            .real("mean_yes_rate", stats.mean[YES])
            .real("yes_rate_variance", stats.variance[YES])
            .real("yes_rate_standard_error", stats.standard_error(YES))
            .int("n_trajectories", stats.n_trajectories as u64)
            .int("n_excluded", stats.n_excluded as u64)
            .int("well_defined", is_well_defined(&stats, p.variance_tolerance) as u64)
            .int("orbit_yes_count", orbit.counts[YES])
            .int("orbit_trials", orbit.trials)
            .real("orbit_yes_rate", orbit.rates()[YES]);

        let mut running = PlotData::new(&["step", "running_yes_rate"]);
        let mut yes = 0u64;
        for e in orbit_events(&x0, p.orbit_steps) {
            yes += e.upper_half as u64;
            running.row(&[(e.step + 1) as f64, yes as f64 / (e.step + 1) as f64]);
        }
        Ok(vec![results.file("bernoulli.csv"), running.file("bernoulli_orbit.dat")])
    }
}
