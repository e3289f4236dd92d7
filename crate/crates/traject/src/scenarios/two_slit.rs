use serde::{Deserialize, Serialize};
use traject_core::interference::{
    analyze_biprism, biprism_deflection, emission_measure_from_screen, fringe_target_density, uniform_emission,
    BiprismScene, Envelope,
};
use traject_core::numeric::linspace;
use traject_core::rng::stream;

use super::{doc, ParamDoc, Scenario};
use crate::output::{fmt_f64, Csv, OutputFile, PlotData};

pub struct TwoSlit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnvelopeKind {
    Flat,
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub wire_distance: f64,
    pub wire_radius: f64,
    pub kick: f64,
    pub screen_distance: f64,
    pub aperture: f64,
    pub wavelength: f64,
    pub envelope: EnvelopeKind,
    pub envelope_width: f64,
    pub n_bins: usize,
    pub n_angles: usize,
    pub n_samples: usize,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            wire_distance: 0.4,
            wire_radius: 0.0,
            kick: 0.02,
            screen_distance: 1.0,
            aperture: 0.05,
            wavelength: 4e-5,
            envelope: EnvelopeKind::Flat,
            envelope_width: 0.01,
            n_bins: 400,
            n_angles: 2001,
            n_samples: 0,
        }
    }
}

impl Params {
    pub fn scene(&self) -> traject_core::Result<BiprismScene> {
        let envelope = match self.envelope {
            EnvelopeKind::Flat => Envelope::Flat,
            EnvelopeKind::Gaussian => Envelope::Gaussian { width: self.envelope_width },
        };
        BiprismScene::new(
            self.wire_distance,
            self.wire_radius,
            self.kick,
            self.screen_distance,
            self.aperture,
            self.wavelength,
        )?
        .with_envelope(envelope)
    }
}

impl Scenario for TwoSlit {
    const NAME: &'static str = "two-slit";
    const SUMMARY: &'static str =
        "charged-wire biprism: emission-angle measure that yields fringes with the field on, against an unchanged source";
    const DOCS: &'static [ParamDoc] = &[
        doc("wire_distance", "source-to-wire distance"),
        doc("wire_radius", "wire radius; rays hitting it are absorbed"),
        doc("kick", "angular deflection toward the axis with the field on (rad)"),
        doc("screen_distance", "source-to-screen distance"),
        doc("aperture", "largest emission angle (rad)"),
        doc("wavelength", "wavelength setting the fringe spacing"),
        doc("envelope", "flat | gaussian: envelope of the fringe pattern"),
        doc("envelope_width", "standard deviation of the gaussian envelope"),
        doc("n_bins", "screen bins across the overlap window"),
        doc("n_angles", "points of the emission density table"),
        doc("n_samples", "emission angles sampled for a screen histogram (0 skips it)"),
    ];
    const SEED: &'static str = "required when n_samples > 0";

    type Params = Params;

    fn needs_seed(p: &Params) -> bool {
        p.n_samples > 0
    }

    fn template() -> Params {
        Params::default()
    }

    fn run(p: &Params, seed: u64) -> anyhow::Result<Vec<OutputFile>> {
        let scene = p.scene()?;
        let report = analyze_biprism(&scene, p.n_bins)?;
        let on = scene.with_field(true);
        let off = scene.with_field(false);
        let emission_on = emission_measure_from_screen(&fringe_target_density(&on)?, &on)?;
        let emission_off = uniform_emission(&off)?;

        let mut counts = vec![0u64; p.n_bins];
        if p.n_samples > 0 {
            let (lo, hi) = (report.edges[0], report.edges[p.n_bins]);
            let width = (hi - lo) / p.n_bins as f64;
            for i in 0..p.n_samples {
                let alpha = emission_on.sample(&mut stream(seed, i as u64));
                let x = biprism_deflection(alpha, &on)?;
                let k = ((x - lo) / width).floor();
                if k >= 0.0 && (k as usize) < p.n_bins {
                    counts[k as usize] += 1;
                }
            }
        }

        let mut results = Csv::quantities();
        results
            .real("visibility_field_on", report.visibility_on)
            .real("visibility_field_off", report.visibility_off)
            .real("emission_total_variation", report.total_variation)
            .real("fringe_spacing_measured", report.spacing_measured.unwrap_or(f64::NAN))
            .real("fringe_spacing_expected", report.spacing_expected)
            .real("virtual_source_separation", on.separation())
            .real("round_trip_max_bin_error", report.round_trip_error)
            .real("window_lo", report.edges[0])
            .real("window_hi", report.edges[p.n_bins]);

        let mut screen = Csv::new(&["x_lo", "x_hi", "target_mass", "mass_field_on", "mass_field_off", "counts"]);
        let mut screen_plot = PlotData::new(&["x", "density_field_on", "density_field_off"]);
        for (i, w) in report.edges.windows(2).enumerate() {
            screen.row([
                fmt_f64(w[0]),
                fmt_f64(w[1]),
                fmt_f64(report.target_mass[i]),
                fmt_f64(report.mass_on[i]),
                fmt_f64(report.mass_off[i]),
                counts[i].to_string(),
            ]);
            let width = w[1] - w[0];
            screen_plot.row(&[0.5 * (w[0] + w[1]), report.mass_on[i] / width, report.mass_off[i] / width]);
        }

        let mut emission = Csv::new(&["angle", "density_field_on", "density_field_off"]);
        let mut emission_plot = PlotData::new(&["angle", "density_field_on", "density_field_off"]);
        for a in linspace(-scene.aperture(), scene.aperture(), p.n_angles) {
            let (d_on, d_off) = (emission_on.normalized_density(&a), emission_off.normalized_density(&a));
            emission.row([fmt_f64(a), fmt_f64(d_on), fmt_f64(d_off)]);
            emission_plot.row(&[a, d_on, d_off]);
        }
        Ok(vec![
            results.file("two-slit.csv"),
            screen.file("two-slit_screen.csv"),
            emission.file("two-slit_emission.csv"),
            screen_plot.file("two-slit_screen.dat"),
            emission_plot.file("two-slit_emission.dat"),
        ])
    }
}
