//! Classical scattering off repulsive centers.

pub mod deflection;
pub mod density;
pub mod flipper;
pub mod potential;

pub use deflection::{deflection_angle, deflection_angle_with, integrate_planar, Deflection, DeflectionMethod, PlanarRun};
pub use density::{
    impact_to_angle_map, isotropic_source_density, pullback_at, pullback_density, transfer_at, transfer_density,
    AngularDensity, ImpactDensity, IsotropicSource,
};
pub use flipper::{
    angle_bin, flipper_cross_section, uniform_incidence, Encounter, FlipperCrossSection, FlipperScene, FlipperWalk,
    IncidentRay,
};
pub use potential::{PotentialKind, PotentialSpec};
