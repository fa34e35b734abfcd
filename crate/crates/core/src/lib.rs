//! Constructive colorings of normed spaces ℝⁿ_K from multilattice tilings.
//!
//! The pipeline: build a periodic tiling associated with a multilattice,
//! measure its inner/outer body ratios (α, β), shrink every cell about its
//! site by μ = α/(α+β) so that no piece contains two points at the forbidden
//! distance 2βμ and distinct pieces are farther apart than that, then cover
//! the torus ℝⁿ/Ω with translates of the shrunk tiling. The translates come
//! from a greedy set cover of a saturated packing, and each translate
//! becomes one color class. Every stage emits a checkable certificate.

// Range checks are written `!(x > 0.0)` on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod color;
pub mod cover;
pub mod error;
pub mod geom;
pub mod lattice;
pub mod tiling;

pub use error::{Error, Result};
pub use geom::{ConvexBody, Halfspace, Polytope, Vector};
