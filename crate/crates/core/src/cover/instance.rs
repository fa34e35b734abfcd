use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{Vector, EPS_GEOM};
use crate::tiling::{shrink, PeriodicTiling, PieceIndex, TilingParameters};

use super::SaturatedPacking;

/// A finite set system: `sets[j]` is a subset of `0..ground_size`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetSystem {
    ground_size: usize,
    sets: Vec<FixedBitSet>,
}

impl SetSystem {
    pub fn new(ground_size: usize, sets: Vec<FixedBitSet>) -> Result<Self> {
        for (j, s) in sets.iter().enumerate() {
            if s.len() != ground_size {
                return Err(Error::invalid(format!(
                    "set {j} has universe {} instead of {ground_size}",
                    s.len()
                )));
            }
        }
        Ok(SetSystem { ground_size, sets })
    }

    /// Builds a system from explicit member lists.
    pub fn from_lists(ground_size: usize, lists: &[Vec<usize>]) -> Result<Self> {
        let mut sets = Vec::with_capacity(lists.len());
        for (j, l) in lists.iter().enumerate() {
            let mut s = FixedBitSet::with_capacity(ground_size);
            for &e in l {
                if e >= ground_size {
                    return Err(Error::invalid(format!(
                        "set {j} contains element {e} ≥ {ground_size}"
                    )));
                }
                s.insert(e);
            }
            sets.push(s);
        }
        Ok(SetSystem { ground_size, sets })
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn sets(&self) -> &[FixedBitSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn max_set_size(&self) -> usize {
        self.sets
            .iter()
            .map(|s| s.count_ones(..))
            .max()
            .unwrap_or(0)
    }

    /// Ground elements contained in none of the sets.
    pub fn uncovered(&self) -> Vec<usize> {
        let mut union = FixedBitSet::with_capacity(self.ground_size);
        for s in &self.sets {
            union.union_with(s);
        }
        union.zeroes().collect()
    }

    /// Ground elements missed by the chosen sets.
    pub fn uncovered_by(&self, selection: &[usize]) -> Vec<usize> {
        let mut union = FixedBitSet::with_capacity(self.ground_size);
        for &j in selection {
            union.union_with(&self.sets[j]);
        }
        union.zeroes().collect()
    }
}

/// The finite covering problem on the torus: cover the saturated packing Λ
/// by translates of the tiling shrunk by ν(1 − δ).
#[derive(Clone, Debug)]
pub struct CoverInstance {
    ground: SaturatedPacking,
    candidates: Vec<Vector>,
    candidate_resolution: usize,
    delta: f64,
    nu: f64,
    alpha: f64,
    system: SetSystem,
}

/// Size statistics of a cover instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceStats {
    pub ground_size: usize,
    pub candidates: usize,
    pub candidate_resolution: usize,
    pub max_set_size: usize,
    pub delta: f64,
    pub nu_shrink: f64,
    pub rho: f64,
}

impl CoverInstance {
    pub fn ground(&self) -> &SaturatedPacking {
        &self.ground
    }

    pub fn candidates(&self) -> &[Vector] {
        &self.candidates
    }

    pub fn system(&self) -> &SetSystem {
        &self.system
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// ν, the shrink factor of the final color pieces.
    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// ν(1 − δ), the shrink factor of the candidate sets.
    pub fn nu_shrink(&self) -> f64 {
        self.nu * (1.0 - self.delta)
    }

    pub fn max_set_size(&self) -> usize {
        self.system.max_set_size()
    }

    pub fn stats(&self) -> InstanceStats {
        InstanceStats {
            ground_size: self.ground.len(),
            candidates: self.candidates.len(),
            candidate_resolution: self.candidate_resolution,
            max_set_size: self.max_set_size(),
            delta: self.delta,
            nu_shrink: self.nu_shrink(),
            rho: self.ground.rho(),
        }
    }
}

/// Packing radius ρ = α·ν·δ/2 used for the ground set.
pub fn ground_radius(params: &TilingParameters, delta: f64) -> f64 {
    params.alpha * params.nu() * delta / 2.0
}

/// Builds the incidence of candidate translates t (a `cand_res`ⁿ torus grid)
/// against ground points: λ is in set t iff λ − t lies in some cell shrunk
/// by ν(1 − δ) about its site (modulo Ω).
pub fn build_instance(
    ground: SaturatedPacking,
    tiling: &PeriodicTiling,
    params: &TilingParameters,
    delta: f64,
    cand_res: usize,
) -> Result<CoverInstance> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    if ground.torus() != tiling.torus() {
        return Err(Error::invalid(
            "ground set and tiling live on different tori",
        ));
    }
    let nu = params.nu();
    let expected = ground_radius(params, delta);
    if (ground.rho() - expected).abs() > 1e-12 * expected {
        return Err(Error::invalid(format!(
            "ground packing radius {} differs from α·ν·δ/2 = {expected}",
            ground.rho()
        )));
    }
    let pieces = shrink(tiling, nu * (1.0 - delta))?;
    let labels = (0..pieces.len()).collect();
    let index = PieceIndex::new(tiling.torus(), pieces, labels);
    let candidates = tiling.torus().sample_grid(cand_res)?;
    let m = ground.len();
    let sets: Vec<FixedBitSet> = candidates
        .par_iter()
        .map(|t| {
            let mut s = FixedBitSet::with_capacity(m);
            for (i, lambda) in ground.points().iter().enumerate() {
                if index.first_piece(&(*lambda - *t), EPS_GEOM).is_some() {
                    s.insert(i);
                }
            }
            s
        })
        .collect();
    let system = SetSystem::new(m, sets)?;
    if let Some(&i) = system.uncovered().first() {
        return Err(Error::Resolution(format!(
            "ground point {i} at {:?} lies in no candidate set; increase the candidate resolution",
            ground.points()[i]
        )));
    }
    Ok(CoverInstance {
        ground,
        candidates,
        candidate_resolution: cand_res,
        delta,
        nu,
        alpha: params.alpha,
        system,
    })
}
