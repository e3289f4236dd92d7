use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use traject_core::numeric::linspace;
use traject_core::spin::{branch_weights, propagate_sg, SgBranch, SgDevice, SpinConstants, SpinVariable, WeightModel};

use super::{doc, ParamDoc, Scenario};
use crate::output::{fmt_f64, Csv, OutputFile, PlotData};

pub struct SternGerlach;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weights {
    Quantum,
    Equal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub entry: f64,
    pub exit: f64,
    pub screen: f64,
    pub field_angle: f64,
    pub b0: f64,
    pub gradient: f64,
    pub mu: f64,
    pub mass: f64,
    pub x0: [f64; 3],
    pub v0: [f64; 3],
    pub spin_theta: f64,
    pub spin_phi: f64,
    pub weights: Weights,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            entry: 1.0,
            exit: 2.0,
            screen: 4.0,
            field_angle: 0.0,
            b0: 10.0,
            gradient: 2.0,
            mu: 0.01,
            mass: 1.0,
            x0: [0.0; 3],
            v0: [1.0, 0.0, 0.0],
            spin_theta: 0.0,
            spin_phi: 0.0,
            weights: Weights::Quantum,
        }
    }
}

impl Scenario for SternGerlach {
    const NAME: &'static str = "stern-gerlach";
    const SUMMARY: &'static str =
        "spin-1/2 particle through a uniform-gradient magnet: both branch trajectories and their weights";
    const DOCS: &'static [ParamDoc] = &[
        doc("entry", "beam coordinate of the magnet entry plane"),
        doc("exit", "beam coordinate of the magnet exit plane"),
        doc("screen", "beam coordinate of the screen"),
        doc("field_angle", "field direction (0, sin a, cos a) in the transverse plane (rad)"),
        doc("b0", "field strength on the beam axis"),
        doc("gradient", "field gradient along the field direction"),
        doc("mu", "magnetic moment"),
        doc("mass", "particle mass"),
        doc("x0", "start position, before the entry plane"),
        doc("v0", "start velocity"),
        doc("spin_theta", "polar angle of the incoming spin direction (rad)"),
        doc("spin_phi", "azimuth of the incoming spin direction (rad)"),
        doc("weights", "quantum | equal: branch weight model"),
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
        let device = SgDevice::in_plane(p.entry, p.exit, p.screen, p.field_angle, p.b0, p.gradient)?;
        let constants = SpinConstants::new(p.mu, p.mass)?;
        let (h, ph) = (0.5 * p.spin_theta, p.spin_phi);
        let psi = SpinVariable::new(Complex64::new(h.cos(), 0.0), Complex64::from_polar(h.sin(), ph))?;
        let branches = propagate_sg(p.x0, p.v0, &psi, &device, &constants)?;
        let model = match p.weights {
            Weights::Quantum => WeightModel::Quantum(psi),
            Weights::Equal => WeightModel::Equal,
        };
        let (w_plus, w_minus) = branch_weights(&model, &device.orientation())?;

        let mut table = Csv::new(&[
            "sign",
            "weight",
            "transit_time",
            "deflection",
            "screen_x",
            "screen_y",
            "screen_z",
            "screen_time",
        ]);
        let mut plot = PlotData::new(&["x", "y", "z"]);
        for (b, w) in [(&branches.plus, w_plus), (&branches.minus, w_minus)] {
            let s = &b.screen;
            table.row([
                b.sign.to_string(),
                fmt_f64(w),
                fmt_f64(b.transit_time),
                fmt_f64(b.deflection),
                fmt_f64(s.x[0]),
                fmt_f64(s.x[1]),
                fmt_f64(s.x[2]),
                fmt_f64(s.t),
            ]);
            path_block(&mut plot, b);
        }
        Ok(vec![table.file("stern-gerlach.csv"), plot.file("stern-gerlach_paths.dat")])
    }
}

fn path_block(plot: &mut PlotData, b: &SgBranch) {
    let (t0, t1) = (b.trajectory.start(), b.trajectory.end());
    for t in linspace(t0, t1, 128) {
        if let Some(c) = b.trajectory.evaluate(t) {
            plot.row(&c.coords[..3]);
        }
    }
    plot.block_break();
}
