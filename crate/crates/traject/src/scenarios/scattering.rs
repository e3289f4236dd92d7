use serde::{Deserialize, Serialize};
use traject_core::numeric::linspace;
use traject_core::scattering::{transfer_at, Deflection, DeflectionMethod, PotentialKind, PotentialSpec};

use super::{doc, ParamDoc, Scenario};
use crate::output::{fmt_f64, Csv, OutputFile, PlotData};

pub struct Scattering;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Potential {
    HardSphere,
    Coulomb,
    Power,
    ScreenedCoulomb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Integral,
    Trajectory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub potential: Potential,
    pub strength: f64,
    pub exponent: f64,
    pub radius: f64,
    pub screening: f64,
    pub energy: f64,
    pub method: Method,
    pub theta_min: f64,
    pub theta_max: f64,
    pub n_angles: usize,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            potential: Potential::Coulomb,
            strength: 1.0,
            exponent: 1.0,
            radius: 1.0,
            screening: 1.0,
            energy: 1.0,
            method: Method::Integral,
            theta_min: 0.2,
            theta_max: 3.0,
            n_angles: 50,
        }
    }
}

impl Params {
    pub fn potential_spec(&self) -> traject_core::Result<PotentialSpec> {
        // smooth potentials count every passage; the range plays no role here
        let far = f64::INFINITY;
        match self.potential {
            Potential::HardSphere => PotentialSpec::hard_sphere(self.radius),
            Potential::Coulomb => PotentialSpec::coulomb(self.strength, far),
            Potential::Power => PotentialSpec::new(
                PotentialKind::RepulsivePower { strength: self.strength, exponent: self.exponent },
                far,
            ),
            Potential::ScreenedCoulomb => PotentialSpec::new(
                PotentialKind::ScreenedCoulomb { strength: self.strength, screening: self.screening },
                far,
            ),
        }
    }

    /// Closed-form cross-section where one exists.
    fn reference(&self, theta: f64) -> f64 {
        match self.potential {
            Potential::HardSphere => self.radius * self.radius / 4.0,
            Potential::Coulomb => {
                let s = (theta / 2.0).sin();
                let k = self.strength / (4.0 * self.energy);
                k * k / s.powi(4)
            }
            _ => f64::NAN,
        }
    }
}

impl Scenario for Scattering {
    const NAME: &'static str = "scattering";
    const SUMMARY: &'static str =
        "single repulsive center: deflection function and the angular density of a uniform incident beam";
    const DOCS: &'static [ParamDoc] = &[
        doc("potential", "hard-sphere | coulomb | power | screened-coulomb"),
        doc("strength", "coupling of the smooth potentials"),
        doc("exponent", "power-law exponent (power only)"),
        doc("radius", "hard-sphere radius"),
        doc("screening", "screening length (screened-coulomb only)"),
        doc("energy", "incident kinetic energy"),
        doc("method", "integral | trajectory: how smooth deflections are computed"),
        doc("theta_min", "smallest deflection angle on the grid (rad)"),
        doc("theta_max", "largest deflection angle on the grid (rad)"),
        doc("n_angles", "grid points"),
    ];
    const SEED: &'static str = "not used";

    type Params = Params;

    fn needs_seed(_: &Params) -> bool {
        false
    }

    fn template() -> Params {
        Params::default()
    }

    fn run(p: &Params, _seed: u64) -> anyhow::Result<Vec<OutputFile>> {
        let method = match p.method {
            Method::Integral => DeflectionMethod::Integral,
            Method::Trajectory => DeflectionMethod::Trajectory,
        };
        let deflection = Deflection::with_method(p.potential_spec()?, p.energy, method)?;
        let mut table = Csv::new(&["theta", "impact", "dsigma_domega", "reference"]);
        let mut plot = PlotData::new(&["theta", "dsigma_domega"]);
        for theta in linspace(p.theta_min, p.theta_max, p.n_angles) {
            let s = deflection.impact_for(theta)?;
            // a uniform beam of unit areal density gives the cross-section
            let d = transfer_at(|_| 1.0, &deflection, theta)?;
            table.row([fmt_f64(theta), fmt_f64(s), fmt_f64(d), fmt_f64(p.reference(theta))]);
            plot.row(&[theta, d]);
        }
        Ok(vec![table.file("scattering.csv"), plot.file("scattering_cross_section.dat")])
    }
}
