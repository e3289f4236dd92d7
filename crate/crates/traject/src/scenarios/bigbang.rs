use rand::Rng;
use serde::{Deserialize, Serialize};
use traject_core::interference::{
    asymptotic_velocity, free_quantum_momentum_measure, AsymptoticConfig, NBodySystem, PairPotential, VelocityBox,
};
use traject_core::rng::stream;

use super::{doc, ParamDoc, Scenario};
use crate::output::{fmt_f64, Csv, OutputFile, PlotData};

pub struct BigBang;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub n_particles: usize,
    pub mass: f64,
    pub strength: f64,
    pub width: f64,
    pub velocity_range: f64,
    pub t0: f64,
    pub t_max: f64,
    pub tolerance: f64,
    pub checkpoint_ratio: f64,
    pub step_fraction: f64,
}

impl Default for Params {
    fn default() -> Self {
        let c = AsymptoticConfig::default();
        Self {
            n_particles: 4,
            mass: 1.0,
            strength: 1.0,
            width: 1.0,
            velocity_range: 1.0,
            t0: c.t0,
            t_max: c.t_max,
            tolerance: c.tolerance,
            checkpoint_ratio: c.checkpoint_ratio,
            step_fraction: c.step_fraction,
        }
    }
}

impl Scenario for BigBang {
    const NAME: &'static str = "bigbang";
    const SUMMARY: &'static str =
        "particles released from one point with uniform random velocities: asymptotic velocities x(t)/t";
    const DOCS: &'static [ParamDoc] = &[
        doc("n_particles", "number of particles"),
        doc("mass", "mass of every particle"),
        doc("strength", "height of the gaussian pair repulsion"),
        doc("width", "range of the gaussian pair repulsion"),
        doc("velocity_range", "initial velocity components are uniform in [-v, v]"),
        doc("t0", "start time; particles sit at v t0"),
        doc("t_max", "last checkpoint time"),
        doc("tolerance", "max-norm change of x(t)/t between checkpoints that counts as converged"),
        doc("checkpoint_ratio", "ratio of successive checkpoint times"),
        doc("step_fraction", "integration step as a fraction of the time to cross the pair range"),
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
        anyhow::ensure!(p.n_particles > 0, "need at least one particle");
        anyhow::ensure!(p.velocity_range > 0.0, "velocity range must be positive");
        let masses = vec![p.mass; p.n_particles];
        let system =
            NBodySystem::new(masses.clone(), PairPotential::Gaussian { strength: p.strength, width: p.width })?;
        let v0: Vec<[f64; 3]> = (0..p.n_particles)
            .map(|i| {
                let mut rng = stream(seed, i as u64);
                [0; 3].map(|_| p.velocity_range * (2.0 * rng.random::<f64>() - 1.0))
            })
            .collect();
        let cfg = AsymptoticConfig {
            t0: p.t0,
            t_max: p.t_max,
            tolerance: p.tolerance,
            checkpoint_ratio: p.checkpoint_ratio,
            step_fraction: p.step_fraction,
        };
        let r = asymptotic_velocity(&system, &v0, &cfg)?;
        let start: Vec<[f64; 3]> = v0.iter().map(|v| v.map(|c| c * p.t0)).collect();
        let energy = system.kinetic_energy(&v0) + system.potential_energy(&start);
        let vp: Vec<[f64; 3]> = r.v_plus.chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
        let asymptotic_kinetic = system.kinetic_energy(&vp);
        let dim = 3 * p.n_particles;
        let sampling_box = VelocityBox::new(vec![-p.velocity_range; dim], vec![p.velocity_range; dim])?;
        let box_measure = free_quantum_momentum_measure(&[sampling_box], &masses)?;

        let mut velocities = Csv::new(&["particle", "v0_x", "v0_y", "v0_z", "vplus_x", "vplus_y", "vplus_z"]);
        for (i, (a, b)) in v0.iter().zip(&vp).enumerate() {
            let mut row = vec![i.to_string()];
            row.extend(a.iter().chain(b).map(|c| fmt_f64(*c)));
            velocities.row(row);
        }
        let mut summary = Csv::quantities();
        summary
            .int("converged", r.converged as u64)
            .real("final_time", r.final_time)
            .int("checkpoints", r.convergence_history.len() as u64)
            .real("total_energy", energy)
            .real("asymptotic_kinetic_energy", asymptotic_kinetic)
            .real("free_measure_of_sampling_box", box_measure);

        let mut header = vec!["t".to_string()];
        for i in 0..p.n_particles {
            for axis in ["x", "y", "z"] {
                header.push(format!("p{i}_{axis}"));
            }
        }
        let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
        let mut history = Csv::new(&header_refs);
        let mut change = PlotData::new(&["t", "max_change"]);
        let mut prev: Option<&Vec<f64>> = None;
        for (t, ratio) in &r.convergence_history {
            let mut row = vec![fmt_f64(*t)];
            row.extend(ratio.iter().map(|c| fmt_f64(*c)));
            history.row(row);
            if let Some(q) = prev {
                let d = q.iter().zip(ratio).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                change.row(&[*t, d]);
            }
            prev = Some(ratio);
        }
        Ok(vec![
            velocities.file("bigbang.csv"),
            summary.file("bigbang_summary.csv"),
            history.file("bigbang_history.csv"),
            change.file("bigbang_convergence.dat"),
        ])
    }
}
