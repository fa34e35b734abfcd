//! The final coloring of ℝⁿ_K: assembly from a cover, point lookup,
//! properness verification, the seven-color baseline, the bound formulas and
//! the end-to-end pipeline.

mod baseline;
mod bounds;
mod coloring;
mod pipeline;
mod verify;

pub use baseline::{partition_seven_baseline, SEVEN_COLOR_SLACK};
pub use bounds::{
    butler_bound, butler_bound_ln_ratio, chromatic_bound, finite_run_bound, incidence_bound,
    ChromaticBound,
};
pub use coloring::{Coloring, ColoringFile, ColoringMode, COLORING_SCHEMA};
pub use pipeline::{
    build_coloring, default_delta, default_resolutions, BoundChecks, BoundReport, ColoringRun,
    Construction, PipelineConfig, ResolvedConfig, TauSource, MAX_GROUND_ESTIMATE,
};
pub use verify::{verify_coloring, PairWitness, SampledCheck, StructuralCheck, VerificationReport};
