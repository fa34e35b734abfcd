//! The covering half of the construction: a saturated packing Λ of the
//! torus, the finite set-cover instance on Λ, greedy and fractional covers,
//! and the lift of a cover of Λ to a cover of the whole torus.

mod fractional;
mod greedy;
mod instance;
mod lift;
mod saturate;

pub use fractional::{fractional_optimum, measure_bound, FractionalCover, LP_SIZE_LIMIT};
pub use greedy::greedy_cover;
pub use instance::{build_instance, ground_radius, CoverInstance, InstanceStats, SetSystem};
pub use lift::{grid_coverage, lift_cover, CoverCertificate, GridCoverage};
pub use saturate::{saturate, CertificateMethod, SaturatedPacking, SaturationCertificate};
