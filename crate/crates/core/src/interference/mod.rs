//! Emission statistics that depend on a downstream device, asymptotic
//! velocities of released particles, and the free-particle velocity measure.

mod asymptotic;
mod biprism;
mod decomposition;
mod quantum_measure;

pub use asymptotic::{asymptotic_velocity, AsymptoticConfig, AsymptoticVelocityResult, Bump, NBodySystem, PairPotential};
pub use biprism::{
    analyze_biprism, biprism_deflection, dominant_spacing, emission_measure_from_screen, envelope_density, fringe_target_density,
    screen_bin_masses, total_variation, uniform_emission, visibility, BiprismReport, BiprismScene, Envelope, ScreenDensity,
};
pub use decomposition::{interference_decomposition, Decomposition};
pub use quantum_measure::{free_measure_normalization, free_quantum_momentum_measure, momentum_volume, VelocityBox};
