use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::geom::{ConvexBody, Vector, EPS_GEOM, MAX_DIM};
use crate::lattice::{grid_coords, grid_size, Torus};
use crate::tiling::voronoi_cells;

/// Deepest subdivision level of the Lipschitz covering certificate.
const MAX_REFINE_DEPTH: u32 = 12;
/// Upper bound on Voronoi recomputations in the Euclidean certificate.
const MAX_VORONOI_ROUNDS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateMethod {
    /// Exact covering radius from Voronoi vertices (Euclidean K).
    Voronoi,
    /// Grid cells bounded through the Lipschitz constant of ‖·‖_K.
    Lipschitz,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaturationCertificate {
    /// Minimum torus K-distance between distinct points (absent for one point).
    pub min_pairwise: Option<f64>,
    /// Certified upper bound on the covering radius of Λ.
    pub covering_radius: f64,
    pub grid_resolution: usize,
    pub method: CertificateMethod,
    /// Points added by the certification stage on top of the grid insertion.
    pub certificate_insertions: usize,
}

/// A packing ρK + Λ of the torus that is saturated: 2ρK + Λ covers it.
#[derive(Clone, Debug)]
pub struct SaturatedPacking {
    torus: Torus,
    body: ConvexBody,
    rho: f64,
    points: Vec<Vector>,
    certificate: SaturationCertificate,
}

impl SaturatedPacking {
    pub fn torus(&self) -> &Torus {
        &self.torus
    }

    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn certificate(&self) -> &SaturationCertificate {
        &self.certificate
    }

    /// Packing condition: distinct points at torus distance ≥ 2ρ − ε.
    pub fn is_packing(&self) -> bool {
        self.certificate
            .min_pairwise
            .iter()
            .all(|&d| d >= 2.0 * self.rho - EPS_GEOM)
    }

    /// Saturation condition: certified covering radius ≤ 2ρ (+ ε).
    pub fn is_saturated(&self) -> bool {
        self.certificate.covering_radius <= 2.0 * self.rho + EPS_GEOM
    }
}

/// Farthest-point insertion on a `grid_res`ⁿ torus grid: repeatedly insert
/// the grid point farthest from the current set (ties: lowest grid index)
/// while its distance is at least 2ρ, then certify the covering radius.
///
/// The Euclidean certificate computes the Voronoi cells of Λ; any vertex
/// farther than 2ρ from its site is inserted as well and the cells are
/// recomputed. Other bodies use adaptive subdivision of the grid cells with
/// the bound d(x) ≤ d(c) + L·|x − c|, L = 1/inradius(K).
pub fn saturate(
    torus: &Torus,
    k: &ConvexBody,
    rho: f64,
    grid_res: usize,
) -> Result<SaturatedPacking> {
    check_dim(torus.dim(), k.dim())?;
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::invalid(format!(
            "packing radius must be positive, got {rho}"
        )));
    }
    let n = torus.dim();
    let g = grid_size(n, grid_res)?;
    let lattice = torus.lattice();
    let origin = Vector::zeros(n);
    let table: Vec<f64> = (0..g)
        .into_par_iter()
        .map(|i| torus.distance_of(k, &origin, &lattice.point(&grid_coords(n, grid_res, i))))
        .collect();
    let threshold = 2.0 * rho - EPS_GEOM;

    let mut dist = vec![f64::INFINITY; g];
    let mut chosen: Vec<usize> = Vec::new();
    loop {
        let (best, dmax) = dist
            .iter()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, &d)| {
                    if d > acc.1 {
                        (i, d)
                    } else {
                        acc
                    }
                },
            );
        if !chosen.is_empty() && dmax < threshold {
            break;
        }
        chosen.push(best);
        let s = digits(best, grid_res, n);
        dist.par_iter_mut().enumerate().for_each(|(i, d)| {
            let t = table[diff_index(i, &s, grid_res, n)];
            if t < *d {
                *d = t;
            }
        });
    }
    let mut points: Vec<Vector> = chosen
        .iter()
        .map(|&i| lattice.point(&grid_coords(n, grid_res, i)))
        .collect();

    let (covering_radius, method, inserted) = if k.is_euclidean() {
        let (cov, ins) = voronoi_certificate(torus, k, rho, &mut points)?;
        (cov, CertificateMethod::Voronoi, ins)
    } else {
        let (cov, ins) = lipschitz_certificate(torus, k, rho, grid_res, &chosen, &mut points)?;
        (cov, CertificateMethod::Lipschitz, ins)
    };
    let min_pairwise = min_pairwise_distance(torus, k, &points);
    let packing = SaturatedPacking {
        torus: torus.clone(),
        body: k.clone(),
        rho,
        points,
        certificate: SaturationCertificate {
            min_pairwise,
            covering_radius,
            grid_resolution: grid_res,
            method,
            certificate_insertions: inserted,
        },
    };
    if !packing.is_packing() {
        return Err(Error::Certificate(format!(
            "packing violated: min pairwise distance {:?} < 2ρ = {}",
            packing.certificate.min_pairwise,
            2.0 * rho
        )));
    }
    if !packing.is_saturated() {
        return Err(Error::Resolution(format!(
            "covering radius bound {covering_radius} exceeds 2ρ = {}; use a finer saturation grid",
            2.0 * rho
        )));
    }
    Ok(packing)
}

fn digits(mut i: usize, res: usize, n: usize) -> [usize; MAX_DIM] {
    let mut d = [0; MAX_DIM];
    for x in d.iter_mut().take(n) {
        *x = i % res;
        i /= res;
    }
    d
}

/// Grid index of (i − s) mod res, coordinatewise.
#[inline]
fn diff_index(mut i: usize, s: &[usize; MAX_DIM], res: usize, n: usize) -> usize {
    let mut out = 0;
    let mut mult = 1;
    for &sj in s.iter().take(n) {
        let a = i % res;
        i /= res;
        out += ((a + res - sj) % res) * mult;
        mult *= res;
    }
    out
}

fn min_pairwise_distance(torus: &Torus, k: &ConvexBody, points: &[Vector]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    (0..points.len())
        .into_par_iter()
        .map(|i| {
            points[i + 1..]
                .iter()
                .map(|q| torus.distance_of(k, &points[i], q))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min)
        .into()
}

fn nearest_distance(torus: &Torus, k: &ConvexBody, points: &[Vector], x: &Vector) -> f64 {
    points
        .iter()
        .map(|p| torus.distance_of(k, x, p))
        .fold(f64::INFINITY, f64::min)
}

fn voronoi_certificate(
    torus: &Torus,
    k: &ConvexBody,
    rho: f64,
    points: &mut Vec<Vector>,
) -> Result<(f64, usize)> {
    let mut inserted = 0;
    for _ in 0..MAX_VORONOI_ROUNDS {
        let cells = voronoi_cells(torus, points)?;
        let mut far: Vec<(f64, Vector)> = Vec::new();
        let mut cov: f64 = 0.0;
        for (cell, site) in cells.iter().zip(points.iter()) {
            for v in cell.vertices() {
                let d = k.norm_of(&(*v - *site));
                cov = cov.max(d);
                if d > 2.0 * rho {
                    far.push((d, torus.reduce(v)));
                }
            }
        }
        if far.is_empty() {
            return Ok((cov, inserted));
        }
        far.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.lex_cmp(&b.1)));
        let before = points.len();
        for (_, v) in far {
            if nearest_distance(torus, k, points, &v) >= 2.0 * rho - EPS_GEOM {
                points.push(v);
            }
        }
        if points.len() == before {
            return Err(Error::Certificate(format!(
                "covering radius {cov} exceeds 2ρ = {} but no Voronoi vertex can be inserted",
                2.0 * rho
            )));
        }
        inserted += points.len() - before;
    }
    Err(Error::Resolution(format!(
        "Voronoi covering certificate did not settle after {MAX_VORONOI_ROUNDS} rounds; use a finer saturation grid"
    )))
}

fn lipschitz_certificate(
    torus: &Torus,
    k: &ConvexBody,
    rho: f64,
    res: usize,
    chosen: &[usize],
    points: &mut Vec<Vector>,
) -> Result<(f64, usize)> {
    let n = torus.dim();
    let g = res.pow(n as u32);
    let lattice = torus.lattice();
    let lip = k.lipschitz();
    let h0 = 1.0 / res as f64;
    let half = Vector::from_fn(n, |_| 0.5 * h0);
    let origin = Vector::zeros(n);
    let center_table: Vec<f64> = (0..g)
        .into_par_iter()
        .map(|i| torus.distance_of(k, &origin, &lattice.point(&(grid_coords(n, res, i) + half))))
        .collect();
    let mut center_dist = vec![f64::INFINITY; g];
    for &c in chosen {
        let s = digits(c, res, n);
        center_dist.par_iter_mut().enumerate().for_each(|(i, d)| {
            *d = d.min(center_table[diff_index(i, &s, res, n)]);
        });
    }
    // Euclidean half-diagonal of a basis-coordinate cube of side h is h·r1.
    let mut r1: f64 = 0.0;
    for signs in 0..1usize << n {
        let mut v = Vector::zeros(n);
        for (j, b) in lattice.basis().iter().enumerate() {
            v += *b * if signs >> j & 1 == 1 { 0.5 } else { -0.5 };
        }
        r1 = r1.max(v.norm());
    }

    let mut stack: Vec<(Vector, u32, f64)> = (0..g)
        .rev()
        .map(|i| (grid_coords(n, res, i), 0, center_dist[i]))
        .collect();
    let mut cov: f64 = 0.0;
    let mut inserted = 0;
    while let Some((lo, depth, mut d)) = stack.pop() {
        let h = h0 / f64::powi(2.0, depth as i32);
        let center = lo + Vector::from_fn(n, |_| 0.5 * h);
        if d >= 2.0 * rho {
            points.push(lattice.point(&center));
            inserted += 1;
            d = 0.0;
        }
        let bound = d + lip * h * r1;
        if bound <= 2.0 * rho {
            cov = cov.max(bound);
            continue;
        }
        if depth >= MAX_REFINE_DEPTH {
            return Err(Error::Resolution(format!(
                "covering certificate needs subdivision beyond depth {MAX_REFINE_DEPTH}; use a finer saturation grid"
            )));
        }
        for child in (0..1usize << n).rev() {
            let clo = lo + Vector::from_fn(n, |j| if child >> j & 1 == 1 { 0.5 * h } else { 0.0 });
            let cc = clo + Vector::from_fn(n, |_| 0.25 * h);
            let cd = nearest_distance(torus, k, points, &lattice.point(&cc));
            stack.push((clo, depth + 1, cd));
        }
    }
    Ok((cov, inserted))
}
