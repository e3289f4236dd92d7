use serde::{Deserialize, Serialize};
use traject_core::numeric::linspace;
use traject_core::spin::{chsh_value, deterministic_strategies, sample_singlet_pairs, singlet_measure, EprMeasure, EprSettings};

use super::{doc, ParamDoc, Scenario};
use crate::output::{Csv, OutputFile, PlotData};

pub struct Epr;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub a_deg: f64,
    pub a_prime_deg: f64,
    pub b_deg: f64,
    pub b_prime_deg: f64,
    pub n_pairs: usize,
}

impl Default for Params {
    fn default() -> Self {
        Self { a_deg: 0.0, a_prime_deg: 90.0, b_deg: 225.0, b_prime_deg: 135.0, n_pairs: 0 }
    }
}

impl Scenario for Epr {
    const NAME: &'static str = "epr";
    const SUMMARY: &'static str =
        "spin-singlet pairs: CHSH combination of correlators under the singlet measure and local deterministic ones";
    const DOCS: &'static [ParamDoc] = &[
        doc("a_deg", "first setting on side A, angle in the measurement plane (deg)"),
        doc("a_prime_deg", "second setting on side A (deg)"),
        doc("b_deg", "first setting on side B (deg)"),
        doc("b_prime_deg", "second setting on side B (deg)"),
        doc("n_pairs", "pairs sampled for a finite-sample estimate (0 skips it)"),
    ];
    const SEED: &'static str = "required when n_pairs > 0";

    type Params = Params;

    fn needs_seed(p: &Params) -> bool {
        p.n_pairs > 0
    }

    fn template() -> Params {
        Params::default()
    }

    fn run(p: &Params, seed: u64) -> anyhow::Result<Vec<OutputFile>> {
        let settings = EprSettings::planar(
            p.a_deg.to_radians(),
            p.a_prime_deg.to_radians(),
            p.b_deg.to_radians(),
            p.b_prime_deg.to_radians(),
        );
        let singlet = EprMeasure::singlet(&settings);
        let mut results = Csv::quantities();
        results.real("chsh_singlet", chsh_value(&singlet)?);
        for (oa, ob, name) in [(0, 0, "e_a_b"), (0, 1, "e_a_bprime"), (1, 0, "e_aprime_b"), (1, 1, "e_aprime_bprime")] {
            results.real(name, singlet.correlator(oa, ob)?);
        }
        let mut local_max: f64 = 0.0;
        for m in deterministic_strategies() {
            local_max = local_max.max(chsh_value(&m)?.abs());
        }
        results.real("max_abs_chsh_local_deterministic", local_max);
        if p.n_pairs > 0 {
            let counts = sample_singlet_pairs(&settings, p.n_pairs, seed);
            let (s, sigma) = counts.chsh_estimate()?;
            results.real("chsh_sampled", s).real("chsh_sampled_standard_error", sigma).int("n_pairs", counts.total());
        }

        // singlet correlator against the angle between the two settings
        let mut plot = PlotData::new(&["angle_deg", "correlator"]);
        let a = [1.0, 0.0, 0.0];
        for deg in linspace(0.0, 360.0, 73) {
            let t = deg.to_radians();
            let w = singlet_measure(&a, &[t.cos(), t.sin(), 0.0]);
            plot.row(&[deg, w[0] - w[1] - w[2] + w[3]]);
        }
        Ok(vec![results.file("epr.csv"), plot.file("epr_correlation.dat")])
    }
}
