//! Periodic tilings associated with multilattices, their inner/outer body
//! parameters (α, β, γ, μ) and shrunk copies.

mod index;
mod voronoi;

use serde::{Deserialize, Serialize};

use crate::cover::saturate;
use crate::error::{check_dim, Error, Result};
use crate::geom::{ConvexBody, Halfspace, Polytope, Vector, EPS_GEOM};
use crate::lattice::{Lattice, Multilattice, Torus};

pub use index::PieceIndex;
pub(crate) use voronoi::voronoi_cells;
pub use voronoi::voronoi_tiling;

/// k convex cells, cell i containing translate i of the multilattice in
/// its interior; together with their Ω-translates they tile ℝⁿ.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodicTiling {
    multilattice: Multilattice,
    cells: Vec<Polytope>,
}

impl PeriodicTiling {
    /// Checks the association (every site strictly inside its cell) and the
    /// volume balance Σ vol(ψ̃ᵢ) = covol(Ω).
    pub fn new(multilattice: Multilattice, cells: Vec<Polytope>) -> Result<Self> {
        if cells.len() != multilattice.q() {
            return Err(Error::invalid(format!(
                "{} cells for {} translates",
                cells.len(),
                multilattice.q()
            )));
        }
        for (i, (cell, x)) in cells.iter().zip(multilattice.translates()).enumerate() {
            check_dim(multilattice.dim(), cell.dim())?;
            let depth = cell.depth(x);
            if depth <= EPS_GEOM {
                return Err(Error::Association(format!(
                    "site {i} at {x:?} is not interior to its cell (depth {depth:.3e})"
                )));
            }
        }
        let total: f64 = cells.iter().map(Polytope::volume).sum();
        let covol = multilattice.base().covolume();
        if (total - covol).abs() > 1e-6 * covol {
            return Err(Error::Construction(format!(
                "cell volumes sum to {total}, lattice covolume is {covol}: cells do not tile"
            )));
        }
        Ok(PeriodicTiling {
            multilattice,
            cells,
        })
    }

    pub fn multilattice(&self) -> &Multilattice {
        &self.multilattice
    }

    pub fn torus(&self) -> &Torus {
        self.multilattice.torus()
    }

    pub fn cells(&self) -> &[Polytope] {
        &self.cells
    }

    pub fn sites(&self) -> &[Vector] {
        self.multilattice.translates()
    }

    pub fn dim(&self) -> usize {
        self.multilattice.dim()
    }

    /// Point-location index over the cells (labels = cell numbers).
    pub fn index(&self) -> PieceIndex {
        PieceIndex::new(
            self.torus(),
            self.cells.clone(),
            (0..self.cells.len()).collect(),
        )
    }

    /// Counts sample points (a `res`ⁿ torus grid) lying in the interior of
    /// more than one cell copy. A tiling yields 0.
    pub fn overlap_count(&self, res: usize) -> Result<usize> {
        let idx = self.index();
        Ok(self
            .torus()
            .sample_grid(res)?
            .iter()
            .filter(|p| idx.count_interior(p, EPS_GEOM) > 1)
            .count())
    }
}

/// Uniform sandwich αK + x̃ᵢ ⊆ ψ̃ᵢ ⊆ βK + x̃ᵢ and the quantities derived from it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TilingParameters {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub mu: f64,
    /// 2βμ = 2αβ/(α+β).
    pub forbidden: f64,
    /// 1/forbidden.
    pub scale: f64,
    pub eta: f64,
}

impl TilingParameters {
    /// Derives γ, μ, the forbidden distance and scale from α, β.
    pub fn from_alpha_beta(alpha: f64, beta: f64, eta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= beta * (1.0 + 1e-12) && beta.is_finite()) {
            return Err(Error::invalid(format!(
                "need 0 < α ≤ β, got α = {alpha}, β = {beta}"
            )));
        }
        if !(0.0..0.01).contains(&eta) {
            return Err(Error::invalid(format!(
                "eta must lie in [0, 0.01), got {eta}"
            )));
        }
        let mu = alpha / (alpha + beta);
        let forbidden = 2.0 * beta * mu;
        Ok(TilingParameters {
            alpha,
            beta,
            gamma: beta / alpha,
            mu,
            forbidden,
            scale: 1.0 / forbidden,
            eta,
        })
    }

    /// Shrink factor ν = μ(1 − η).
    pub fn nu(&self) -> f64 {
        self.mu * (1.0 - self.eta)
    }

    /// Guaranteed gap 2α(1 − ν) between distinct shrunk cells.
    pub fn separation(&self) -> f64 {
        2.0 * self.alpha * (1.0 - self.nu())
    }

    /// Upper bound 2βν on the diameter of a shrunk cell.
    pub fn diameter(&self) -> f64 {
        2.0 * self.beta * self.nu()
    }
}

/// Computes tight α and β of `tiling` with respect to K.
///
/// α is the minimum over cells and facets (a, b) of (b − a·x̃)/h_K(a): the
/// largest multiple of K about the site fitting under that facet. β is the
/// maximum K-norm of a vertex relative to its site.
pub fn tiling_parameters(
    tiling: &PeriodicTiling,
    k: &ConvexBody,
    eta: f64,
) -> Result<TilingParameters> {
    check_dim(tiling.dim(), k.dim())?;
    if !(eta > 0.0 && eta < 0.01) {
        return Err(Error::invalid(format!(
            "eta must lie in (0, 0.01), got {eta}"
        )));
    }
    let (alpha, beta) = sandwich(tiling, k)?;
    if alpha <= EPS_GEOM {
        return Err(Error::Association(format!(
            "α = {alpha:.3e}: some site lies on its cell boundary"
        )));
    }
    TilingParameters::from_alpha_beta(alpha, beta, eta)
}

fn sandwich(tiling: &PeriodicTiling, k: &ConvexBody) -> Result<(f64, f64)> {
    let mut alpha = f64::INFINITY;
    let mut beta: f64 = 0.0;
    for (cell, x) in tiling.cells().iter().zip(tiling.sites()) {
        for h in cell.halfspaces() {
            alpha = alpha.min(h.slack(x) / k.support(&h.normal)?);
        }
        for v in cell.vertices() {
            beta = beta.max(k.norm_of(&(*v - *x)));
        }
    }
    Ok((alpha, beta))
}

/// Cells scaled by `factor` about their sites: factor·(ψ̃ᵢ − x̃ᵢ) + x̃ᵢ.
pub fn shrink(tiling: &PeriodicTiling, factor: f64) -> Result<Vec<Polytope>> {
    if !(factor > 0.0 && factor < 1.0) {
        return Err(Error::invalid(format!(
            "shrink factor must lie in (0, 1), got {factor}"
        )));
    }
    Ok(shrink_unchecked(tiling, factor))
}

pub(crate) fn shrink_unchecked(tiling: &PeriodicTiling, factor: f64) -> Vec<Polytope> {
    tiling
        .cells()
        .iter()
        .zip(tiling.sites())
        .map(|(c, x)| c.homothety(x, factor))
        .collect()
}

/// Covering and packing thresholds of the lattice arrangement K + Ω.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct XiRatios {
    pub xi1: f64,
    pub xi2: f64,
    pub xi: f64,
}

/// ξ₂ = ½·(minimum K-norm of a nonzero lattice vector); ξ₁ = K-norm
/// covering radius, read off the Voronoi vertices (Euclidean K only).
pub fn lattice_xi(lattice: &Lattice, k: &ConvexBody) -> Result<XiRatios> {
    check_dim(lattice.dim(), k.dim())?;
    if !k.is_euclidean() {
        return Err(Error::Unsupported(
            "covering threshold ξ₁ needs Voronoi cells, which are only computed for the Euclidean norm".into(),
        ));
    }
    let xi2 = 0.5 * lattice.minimum_norm(k);
    let tiling = voronoi_tiling(&Multilattice::lattice_only(lattice.clone()))?;
    let xi1 = tiling.cells()[0]
        .vertices()
        .iter()
        .map(|v| k.norm_of(v))
        .fold(0.0, f64::max);
    Ok(XiRatios {
        xi1,
        xi2,
        xi: xi1 / xi2,
    })
}

/// Ball multilattice of the cube construction: start from (2ℤ)ⁿ (the cube
/// of side 2 circumscribing Bⁿ), saturate the torus with points at
/// pairwise distance ≥ 2, and take the Voronoi tiling of the result.
pub fn build_ball_multilattice(n: usize) -> Result<(Multilattice, PeriodicTiling)> {
    if !(2..=4).contains(&n) {
        return Err(Error::Unsupported(format!(
            "ball multilattice in dimension {n} (supported: 2..=4)"
        )));
    }
    let torus = Torus::new(Lattice::cubic(n, 2.0)?);
    let ball = ConvexBody::unit_ball(n);
    let packing = saturate(&torus, &ball, 1.0, 4)?;
    let m = Multilattice::new(torus.lattice().clone(), packing.points().to_vec())?;
    let tiling = voronoi_tiling(&m)?;
    Ok((m, tiling))
}

/// Builds a tiling from explicit cells given as halfspace lists.
pub fn explicit_tiling(m: Multilattice, cells: &[Vec<Halfspace>]) -> Result<PeriodicTiling> {
    let n = m.dim();
    let polys = cells
        .iter()
        .map(|hs| crate::geom::intersect_halfspaces(n, hs))
        .collect::<Result<Vec<_>>>()?;
    PeriodicTiling::new(m, polys)
}
