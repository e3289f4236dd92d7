use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use traject_core::scattering::{flipper_cross_section, uniform_incidence, FlipperScene, PotentialSpec};

use super::{doc, ParamDoc, Scenario};
use crate::output::{fmt_f64, Csv, OutputFile, PlotData};

pub struct Flipper;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Potential {
    HardSphere,
    Coulomb,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub per_side: usize,
    pub spacing: f64,
    pub jitter: f64,
    pub potential: Potential,
    pub radius: f64,
    pub strength: f64,
    pub action_range: f64,
    pub energy: f64,
    pub n_bins: usize,
    pub n_traj: usize,
    pub n_min_trials: usize,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            per_side: 3,
            spacing: 12.0,
            jitter: 1.0,
            potential: Potential::HardSphere,
            radius: 1.0,
            strength: 1.0,
            action_range: 1.0,
            energy: 1.0,
            n_bins: 8,
            n_traj: 10_000,
            n_min_trials: 20,
        }
    }
}

/// Rate of a signed-angle bin when every encounter scatters isotropically.
pub fn isotropic_bin_rate(bin: usize, n_bins: usize) -> f64 {
    let a = -PI + 2.0 * PI * bin as f64 / n_bins as f64;
    let b = a + 2.0 * PI / n_bins as f64;
    let (lo, hi) = if b <= 0.0 { (-b, -a) } else { (a, b) };
    (lo.cos() - hi.cos()) / 4.0
}

impl Scenario for Flipper {
    const NAME: &'static str = "flipper";
    const SUMMARY: &'static str =
        "many separated centers: binned signed deflection rates along long multiply-scattered trajectories";
    const DOCS: &'static [ParamDoc] = &[
        doc("per_side", "centers per side of the cubic lattice"),
        doc("spacing", "lattice spacing"),
        doc("jitter", "largest random displacement of a center along each axis"),
        doc("potential", "hard-sphere | coulomb"),
        doc("radius", "hard-sphere radius"),
        doc("strength", "Coulomb coupling"),
        doc("action_range", "Coulomb passages closer than this count as encounters"),
        doc("energy", "particle kinetic energy"),
        doc("n_bins", "signed-angle outcome bins over [-pi, pi]"),
        doc("n_traj", "trajectories in the ensemble"),
        doc("n_min_trials", "encounters followed per trajectory"),
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
        let potential = match p.potential {
            Potential::HardSphere => PotentialSpec::hard_sphere(p.radius)?,
            Potential::Coulomb => PotentialSpec::coulomb(p.strength, p.action_range)?,
        };
        let scene = FlipperScene::jittered_lattice(p.per_side, p.spacing, p.jitter, potential, p.energy, seed)?;
        let source = uniform_incidence(&scene)?;
        let r = flipper_cross_section(&scene, &source, p.n_bins, p.n_traj, p.n_min_trials, seed)?;

        let mut table = Csv::new(&[
            "bin",
            "theta_lo",
            "theta_hi",
            "mean_rate",
            "variance",
            "standard_error",
            "cross_section",
            "isotropic_rate",
        ]);
        let mut plot = PlotData::new(&["theta_center", "mean_rate", "isotropic_rate"]);
        let width = 2.0 * PI / p.n_bins as f64;
        for i in 0..p.n_bins {
            let lo = -PI + width * i as f64;
            let iso = match p.potential {
                Potential::HardSphere => isotropic_bin_rate(i, p.n_bins),
                Potential::Coulomb => f64::NAN,
            };
            table.row([
                i.to_string(),
                fmt_f64(lo),
                fmt_f64(lo + width),
                fmt_f64(r.stats.mean[i]),
                fmt_f64(r.stats.variance[i]),
                fmt_f64(r.stats.standard_error(i)),
                fmt_f64(r.cross_section[i]),
                fmt_f64(iso),
            ]);
            plot.row(&[lo + 0.5 * width, r.stats.mean[i], iso]);
        }
        let mut summary = Csv::quantities();
        summary
            .int("n_centers", scene.centers().len() as u64)
            .int("n_trajectories", r.stats.n_trajectories as u64)
            .int("n_excluded", r.stats.n_excluded as u64)
            .real("max_variance", r.stats.variance.iter().copied().fold(0.0, f64::max));
        Ok(vec![
            table.file("flipper.csv"),
            summary.file("flipper_summary.csv"),
            plot.file("flipper_rates.dat"),
        ])
    }
}
