use serde::{Deserialize, Serialize};
use traject_core::decay::{
    boundary_from_decay, mean_life, solve_decay_vertex_detailed, DecayBoundary, DecayMasses,
};
use traject_core::numeric::linspace;
use traject_core::tcore::MeasureSpec;

use super::{doc, ParamDoc, Scenario};
use crate::output::{Csv, OutputFile, PlotData};

pub struct Decay;

fn m1() -> f64 {
    1.0
}
fn m2() -> f64 {
    0.3
}
fn m3() -> f64 {
    0.4
}
fn one() -> f64 {
    1.0
}
fn tau() -> f64 {
    1.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default = "m1")]
    pub m1: f64,
    #[serde(default = "m2")]
    pub m2: f64,
    #[serde(default = "m3")]
    pub m3: f64,
    #[serde(default = "one")]
    pub c: f64,
    pub x1: [f64; 3],
    pub t_i: f64,
    pub x2: [f64; 3],
    pub x3: [f64; 3],
    pub t_f: f64,
    #[serde(default = "tau")]
    pub mean_life_tau: f64,
    #[serde(default)]
    pub mean_life_samples: usize,
}

impl Scenario for Decay {
    const NAME: &'static str = "decay";
    const SUMMARY: &'static str =
        "one particle decaying into two: least-action decay vertex for fixed endpoints, and a mean-life estimate";
    const DOCS: &'static [ParamDoc] = &[
        doc("m1", "mass of the decaying particle"),
        doc("m2", "mass of the first product"),
        doc("m3", "mass of the second product"),
        doc("c", "speed constant in the rest energies"),
        doc("x1", "position of the decaying particle at t_i"),
        doc("t_i", "initial time"),
        doc("x2", "position of the first product at t_f"),
        doc("x3", "position of the second product at t_f"),
        doc("t_f", "final time"),
        doc("mean_life_tau", "mean of the exponential measure on decay times"),
        doc("mean_life_samples", "decay times sampled for the mean-life estimate (0 skips it)"),
    ];
    const REQUIRED: &'static [&'static str] = &["x1", "t_i", "x2", "x3", "t_f"];
    const SEED: &'static str = "required when mean_life_samples > 0";

    type Params = Params;

    fn needs_seed(p: &Params) -> bool {
        p.mean_life_samples > 0
    }

    fn template() -> Params {
        let masses = DecayMasses::new(m1(), m2(), m3(), one()).expect("valid default masses");
        let (b, _) = boundary_from_decay(&masses, [0.0; 3], [0.0; 3], 0.0, 1.0, 2.0, [1.0, 0.0, 0.0])
            .expect("valid template boundary");
        Params {
            m1: m1(),
            m2: m2(),
            m3: m3(),
            c: one(),
            x1: b.x1,
            t_i: b.t_i,
            x2: b.x2,
            x3: b.x3,
            t_f: b.t_f,
            mean_life_tau: tau(),
            mean_life_samples: 0,
        }
    }

    fn run(p: &Params, seed: u64) -> anyhow::Result<Vec<OutputFile>> {
        let masses = DecayMasses::new(p.m1, p.m2, p.m3, p.c)?;
        let boundary = DecayBoundary::new(p.x1, p.t_i, p.x2, p.x3, p.t_f)?;
        let sol = solve_decay_vertex_detailed(&boundary, &masses)?;
        let v = sol.vertex;
        let r = sol.residuals;

        let mut results = Csv::quantities();
        results
            .real("t_d", v.t_d)
            .real("x_d_x", v.x_d[0])
            .real("x_d_y", v.x_d[1])
            .real("x_d_z", v.x_d[2])
            .real("action", sol.action)
            .real("momentum_residual_x", r.momentum[0])
            .real("momentum_residual_y", r.momentum[1])
            .real("momentum_residual_z", r.momentum[2])
            .real("energy_residual", r.energy)
            .real("scaled_residual", r.scaled())
            .real("min_hessian_eigenvalue", sol.min_hessian_eigenvalue);
        if p.mean_life_samples > 0 {
            let measure = MeasureSpec::exponential(p.mean_life_tau)?;
            let ml = mean_life(&measure, p.mean_life_samples, seed)?;
            results
                .real("mean_life", ml.tau)
                .real("mean_life_standard_error", ml.standard_error)
                .int("mean_life_samples", ml.n_samples as u64);
        }

        // one block per particle: 1 before the vertex, then 2 and 3
        let mut paths = PlotData::new(&["x", "y", "z"]);
        let lerp = |a: &[f64; 3], b: &[f64; 3], f: f64| [0, 1, 2].map(|k| a[k] + (b[k] - a[k]) * f);
        for f in linspace(0.0, 1.0, 32) {
            paths.row(&lerp(&boundary.x1, &v.x_d, f));
        }
        for end in [&boundary.x2, &boundary.x3] {
            paths.block_break();
            for f in linspace(0.0, 1.0, 32) {
                paths.row(&lerp(&v.x_d, end, f));
            }
        }
        Ok(vec![results.file("decay.csv"), paths.file("decay_paths.dat")])
    }
}
