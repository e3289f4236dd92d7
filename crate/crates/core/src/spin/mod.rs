//! Spin-1/2 trajectories: the spin variable, Stern-Gerlach branching and
//! correlations of spin measurements on pairs.

pub mod epr;
pub mod spinor;
pub mod stern_gerlach;

pub use epr::{
    chsh_value, deterministic_strategies, epr_conditional_probabilities, sample_singlet_pairs, singlet_measure,
    EprCounts, EprMeasure, EprSettings,
};
pub use spinor::{align_spin, branch_weights, sigma_dot, spin_along, SpinVariable, WeightModel};
pub use stern_gerlach::{
    gradient_check, propagate_sg, spin_action, spin_lagrangian, FieldMap, PhasePoint, SgBranch, SgBranches, SgDevice,
    SpinConstants,
};
