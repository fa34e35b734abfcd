use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Vector, EPS_GEOM};
use crate::lattice::{grid_coords, grid_size};
use crate::tiling::{shrink_unchecked, PeriodicTiling, PieceIndex};

use super::CoverInstance;

/// Evidence that the ν-shrunk tiling, translated by the selected vectors,
/// covers the torus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverCertificate {
    pub translates: usize,
    pub nu: f64,
    pub delta: f64,
    pub rho: f64,
    pub min_pairwise: Option<f64>,
    pub covering_radius: f64,
    pub ground_points: usize,
    pub grid: GridCoverage,
}

/// Result of testing every point of a torus grid for membership in a piece.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridCoverage {
    pub resolution: usize,
    pub points: usize,
    pub uncovered: usize,
    pub first_uncovered: Option<Vector>,
}

impl GridCoverage {
    pub fn complete(&self) -> bool {
        self.uncovered == 0
    }
}

/// Tests all `res`ⁿ grid points of the index's torus against its pieces.
pub fn grid_coverage(index: &PieceIndex, res: usize) -> Result<GridCoverage> {
    let torus = index.torus();
    let n = torus.dim();
    let count = grid_size(n, res)?;
    let missing: Vec<usize> = (0..count)
        .into_par_iter()
        .filter(|&i| {
            let p = torus.lattice().point(&grid_coords(n, res, i));
            index.first_piece(&p, EPS_GEOM).is_none()
        })
        .collect();
    Ok(GridCoverage {
        resolution: res,
        points: count,
        uncovered: missing.len(),
        first_uncovered: missing
            .first()
            .map(|&i| torus.lattice().point(&grid_coords(n, res, i))),
    })
}

/// Lifts a cover of the ground set to a cover of the torus.
///
/// First checks the hypotheses the lift needs: Λ is a packing with radius
/// ρ = α·ν·δ/2, 2ρK + Λ covers the torus, and the selected candidate sets
/// cover Λ. Then confirms on a `sample_res`ⁿ grid that the pieces
/// ν(ψ̃ᵢ − x̃ᵢ) + x̃ᵢ + tⱼ cover every sample.
pub fn lift_cover(
    inst: &CoverInstance,
    tiling: &PeriodicTiling,
    selection: &[usize],
    sample_res: usize,
) -> Result<CoverCertificate> {
    let ground = inst.ground();
    let rho = ground.rho();
    let required = inst.alpha() * inst.nu() * inst.delta() / 2.0;
    if (rho - required).abs() > 1e-12 * required {
        return Err(Error::Certificate(format!(
            "ground radius {rho} differs from α·ν·δ/2 = {required}"
        )));
    }
    if !ground.is_packing() {
        return Err(Error::Certificate(format!(
            "ground set is not a {rho}-packing (min distance {:?})",
            ground.certificate().min_pairwise
        )));
    }
    if !ground.is_saturated() {
        return Err(Error::Certificate(format!(
            "ground set is not saturated (covering radius {} > 2ρ = {})",
            ground.certificate().covering_radius,
            2.0 * rho
        )));
    }
    if let Some(&j) = selection.iter().find(|&&j| j >= inst.candidates().len()) {
        return Err(Error::invalid(format!(
            "selected candidate {j} does not exist"
        )));
    }
    if let Some(&e) = inst.system().uncovered_by(selection).first() {
        return Err(Error::Certificate(format!(
            "precondition failed: ground point {e} at {:?} is not covered by the selection",
            ground.points()[e]
        )));
    }

    let cells = shrink_unchecked(tiling, inst.nu());
    let mut pieces = Vec::with_capacity(selection.len() * cells.len());
    let mut labels = Vec::with_capacity(pieces.capacity());
    for (j, &c) in selection.iter().enumerate() {
        let t = inst.candidates()[c];
        for cell in &cells {
            pieces.push(cell.translated(&t));
            labels.push(j);
        }
    }
    let index = PieceIndex::new(tiling.torus(), pieces, labels);
    let grid = grid_coverage(&index, sample_res)?;
    if let Some(w) = grid.first_uncovered {
        return Err(Error::LiftViolation { witness: w });
    }
    Ok(CoverCertificate {
        translates: selection.len(),
        nu: inst.nu(),
        delta: inst.delta(),
        rho,
        min_pairwise: ground.certificate().min_pairwise,
        covering_radius: ground.certificate().covering_radius,
        ground_points: ground.len(),
        grid,
    })
}
