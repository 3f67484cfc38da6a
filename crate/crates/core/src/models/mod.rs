//! Random group models built from sampled automorphisms of the truncated
//! Demuškin cover, and their moment estimators.

pub mod estimate;
pub mod gauge;
pub mod orbit;
pub mod parallel;
pub mod quotient;
pub mod target;

pub use estimate::{
    estimate_moment_y, estimate_moment_z, sample_y, sample_z, z_cyclic_exact, MomentEstimate, Welford, YConfig, YReport,
    YSample, ZConfig, ZReport, ZSample,
};
pub use gauge::GaugedModel;
pub use orbit::{construct_witness, gamma_surjections, orbit_transitivity_check, OrbitReport};
pub use quotient::{FixedQuotient, ModelContext};
pub use target::{DeltaTarget, TargetContext};
