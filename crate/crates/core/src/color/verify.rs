use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cover::{grid_coverage, CoverCertificate, GridCoverage};
use crate::error::Result;
use crate::geom::{diameter_in_norm, distance_in_norm, Vector};

use super::{Coloring, ColoringMode};

/// Pairs drawn per RNG stream in the sampled check.
const PAIR_BATCH: usize = 1024;
/// Witnesses kept in a report.
const MAX_WITNESSES: usize = 16;

/// Diameter and separation of the scaled pieces, the properness witness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructuralCheck {
    /// Largest K-diameter of a scaled piece.
    pub max_diameter: f64,
    /// Smallest K-distance between two distinct scaled pieces of one color.
    /// When no such pair lies within the search radius this is the radius,
    /// a lower bound.
    pub min_separation: f64,
    /// Whether `min_separation` was attained by a pair (false: lower bound).
    pub separation_attained: bool,
    /// 1 − max_diameter.
    pub diameter_margin: f64,
    /// min_separation − 1.
    pub separation_margin: f64,
    pub pieces_checked: usize,
    pub pairs_checked: usize,
    pub passed: bool,
}

/// A sampled pair at K-distance 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairWitness {
    pub x: Vector,
    pub y: Vector,
    /// Shared color, or `None` when one of the points has no color.
    pub color: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledCheck {
    pub pairs: usize,
    pub seed: u64,
    /// Pairs at distance 1 with equal colors.
    pub violations: usize,
    /// Pairs with a point outside every piece.
    pub undefined: usize,
    pub witnesses: Vec<PairWitness>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub color_count: usize,
    pub structural: StructuralCheck,
    pub sampled: SampledCheck,
    /// Grid test that every point of the torus has a color.
    pub totality: Option<GridCoverage>,
    /// Evidence from the construction, when the coloring came out of the pipeline.
    pub cover: Option<CoverCertificate>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.structural.passed
            && self.sampled.violations == 0
            && self.sampled.undefined == 0
            && self.totality.iter().all(GridCoverage::complete)
    }
}

/// Checks properness of a coloring.
///
/// Structural part: every scaled piece has K-diameter < 1, and any two
/// distinct pieces that can carry the same color (ShrunkCover: all pieces of
/// one translate; CellPartition: cells of the same color) are more than 1
/// apart, over all lattice copies that could come that close. Sampled part:
/// `pair_samples` points x, uniform over one scaled period, each paired with
/// x + g/‖g‖_K for a Gaussian g. With `grid_res`, all points of that torus
/// grid are also checked for a color.
pub fn verify_coloring(
    c: &Coloring,
    pair_samples: usize,
    seed: u64,
    grid_res: Option<usize>,
) -> Result<VerificationReport> {
    let structural = structural_check(c)?;
    let sampled = sampled_check(c, pair_samples, seed);
    let totality = grid_res.map(|r| grid_coverage(c.index(), r)).transpose()?;
    Ok(VerificationReport {
        color_count: c.color_count(),
        structural,
        sampled,
        totality,
        cover: None,
    })
}

fn structural_check(c: &Coloring) -> Result<StructuralCheck> {
    let k = c.body();
    let s = c.scale();
    let shapes = c.piece_shapes();
    let sites = c.tiling().sites();
    let lattice = c.tiling().torus().lattice();

    let diameters = shapes
        .iter()
        .map(|p| diameter_in_norm(p, k))
        .collect::<Result<Vec<f64>>>()?;
    let max_diameter = s * diameters.iter().cloned().fold(0.0, f64::max);
    // Every piece lies in x̃ᵢ + rᵢK.
    let radii: Vec<f64> = shapes
        .iter()
        .zip(sites)
        .map(|(p, x)| {
            p.vertices()
                .iter()
                .map(|v| k.norm_of(&(*v - *x)))
                .fold(0.0, f64::max)
        })
        .collect();

    let same_color = |i: usize, j: usize| match c.mode() {
        ColoringMode::ShrunkCover => true,
        ColoringMode::CellPartition => c.cell_colors()[i] == c.cell_colors()[j],
    };
    // Pairs farther apart than this count only as the lower bound.
    let reach = 2.0 / s;
    let mut jobs = Vec::new();
    for i in 0..shapes.len() {
        for j in i..shapes.len() {
            if !same_color(i, j) {
                continue;
            }
            let d = sites[i] - sites[j];
            lattice.for_each_near(k, &d, radii[i] + radii[j] + reach, |z, w, _| {
                if i != j || z.iter().any(|&zi| zi != 0) {
                    jobs.push((i, j, w));
                }
            });
        }
    }
    let dists = jobs
        .par_iter()
        .map(|(i, j, w)| distance_in_norm(&shapes[*i], &shapes[*j].translated(w), k))
        .collect::<Result<Vec<f64>>>()?;
    let closest = dists.iter().map(|d| d * s).fold(f64::INFINITY, f64::min);
    let (min_separation, separation_attained) = if closest <= reach * s {
        (closest, true)
    } else {
        (reach * s, false)
    };
    Ok(StructuralCheck {
        max_diameter,
        min_separation,
        separation_attained,
        diameter_margin: 1.0 - max_diameter,
        separation_margin: min_separation - 1.0,
        pieces_checked: shapes.len(),
        pairs_checked: jobs.len(),
        passed: max_diameter < 1.0 && min_separation > 1.0,
    })
}

fn sampled_check(c: &Coloring, pairs: usize, seed: u64) -> SampledCheck {
    let n = c.dim();
    let k = c.body();
    let s = c.scale();
    let lattice = c.tiling().torus().lattice();
    let batches = pairs.div_ceil(PAIR_BATCH);
    let results: Vec<(usize, usize, Vec<PairWitness>)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = PAIR_BATCH.min(pairs - b * PAIR_BATCH);
            let (mut violations, mut undefined) = (0, 0);
            let mut witnesses = Vec::new();
            for _ in 0..count {
                let u = Vector::from_fn(n, |_| rng.gen::<f64>());
                let x = lattice.point(&u) * s;
                let g = loop {
                    let g = Vector::from_fn(n, |_| rng.sample::<f64, _>(StandardNormal));
                    if g.norm() > 1e-12 {
                        break g;
                    }
                };
                let y = x + g / k.norm_of(&g);
                let (cx, cy) = (c.color_of_unchecked(&x), c.color_of_unchecked(&y));
                let witness = match (cx, cy) {
                    (Some(a), Some(b)) if a == b => {
                        violations += 1;
                        Some(Some(a))
                    }
                    (Some(_), Some(_)) => None,
                    _ => {
                        undefined += 1;
                        Some(None)
                    }
                };
                if let Some(color) = witness {
                    if witnesses.len() < MAX_WITNESSES {
                        witnesses.push(PairWitness { x, y, color });
                    }
                }
            }
            (violations, undefined, witnesses)
        })
        .collect();
    let mut out = SampledCheck {
        pairs,
        seed,
        violations: 0,
        undefined: 0,
        witnesses: Vec::new(),
    };
    for (v, u, w) in results {
        out.violations += v;
        out.undefined += u;
        out.witnesses.extend(w);
    }
    // Monochromatic pairs first, then undefined ones, each in sampling order.
    out.witnesses.sort_by_key(|w| w.color.is_none());
    out.witnesses.truncate(MAX_WITNESSES);
    out
}
