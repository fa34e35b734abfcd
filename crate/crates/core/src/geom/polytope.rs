use serde::{Deserialize, Serialize};

use super::lp::{LpProblem, LpStatus, Sense};
use super::{
    affine_rank, distance_to_affine_hull, for_each_combination, solve_square, Vector, EPS_GEOM,
    MAX_DIM,
};
use crate::error::{check_dim, Error, Result};

/// Closed halfspace `normal · y ≤ offset`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vector,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vector, offset: f64) -> Self {
        Halfspace { normal, offset }
    }

    /// Signed slack `offset − normal·p` (positive inside).
    #[inline]
    pub fn slack(&self, p: &Vector) -> f64 {
        self.offset - self.normal.dot(p)
    }

    #[inline]
    pub fn contains(&self, p: &Vector, eps: f64) -> bool {
        self.normal.dot(p) <= self.offset + eps
    }

    fn normalized(&self) -> Option<Halfspace> {
        let len = self.normal.norm();
        (len > 0.0).then(|| Halfspace::new(self.normal / len, self.offset / len))
    }
}

/// Bounded, full-dimensional convex polytope in ℝⁿ, n ≤ 4, kept in both
/// H-representation (irredundant, unit normals) and V-representation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolytopeRepr", into = "PolytopeRepr")]
pub struct Polytope {
    dim: usize,
    halfspaces: Vec<Halfspace>,
    vertices: Vec<Vector>,
}

#[derive(Serialize, Deserialize)]
struct PolytopeRepr {
    halfspaces: Vec<Halfspace>,
}

impl TryFrom<PolytopeRepr> for Polytope {
    type Error = Error;
    fn try_from(r: PolytopeRepr) -> Result<Self> {
        let dim = r
            .halfspaces
            .first()
            .map(|h| h.normal.dim())
            .ok_or_else(|| Error::invalid("polytope without halfspaces"))?;
        intersect_halfspaces(dim, &r.halfspaces)
    }
}

impl From<Polytope> for PolytopeRepr {
    fn from(p: Polytope) -> Self {
        PolytopeRepr {
            halfspaces: p.halfspaces,
        }
    }
}

/// Intersects halfspaces into a bounded full-dimensional polytope.
///
/// The bounding box comes from 2n small LPs (this is also where emptiness
/// and unboundedness are detected). Starting from a slightly larger box,
/// halfspaces are clipped in one at a time; each clip enumerates the new
/// vertices over (n−1)-subsets of the current facets plus the new
/// constraint, filters by feasibility, and deduplicates at [`EPS_GEOM`].
pub fn intersect_halfspaces(dim: usize, hs: &[Halfspace]) -> Result<Polytope> {
    if !(1..=MAX_DIM).contains(&dim) {
        return Err(Error::Unsupported(format!("polytopes in dimension {dim}")));
    }
    let mut normalized = Vec::with_capacity(hs.len());
    for h in hs {
        check_dim(dim, h.normal.dim())?;
        if !h.normal.is_finite() || !h.offset.is_finite() {
            return Err(Error::invalid("non-finite halfspace"));
        }
        match h.normalized() {
            Some(n) => normalized.push(n),
            None if h.offset >= 0.0 => {}
            None => {
                return Err(Error::Construction(
                    "empty intersection (0 ≤ negative offset)".into(),
                ))
            }
        }
    }

    let mut lo = vec![0.0; dim];
    let mut hi = vec![0.0; dim];
    for axis in 0..dim {
        for sign in [1.0, -1.0] {
            let mut costs = vec![0.0; dim];
            costs[axis] = sign;
            let mut lp = LpProblem::maximize(costs);
            for j in 0..dim {
                lp.set_free(j);
            }
            for h in &normalized {
                lp.constrain(h.normal.to_vec(), Sense::Le, h.offset);
            }
            let sol = lp.solve()?;
            match sol.status {
                LpStatus::Optimal => {}
                LpStatus::Infeasible => {
                    return Err(Error::Construction(
                        "empty intersection of halfspaces".into(),
                    ))
                }
                LpStatus::Unbounded => {
                    return Err(Error::Construction(format!(
                        "unbounded intersection (unbounded along {}axis {axis})",
                        if sign > 0.0 { "+" } else { "-" }
                    )))
                }
            }
            if sign > 0.0 {
                hi[axis] = sol.value;
            } else {
                lo[axis] = -sol.value;
            }
        }
    }

    let mut facets = Vec::with_capacity(2 * dim);
    for axis in 0..dim {
        let pad = 1.0 + (hi[axis] - lo[axis]);
        facets.push(Halfspace::new(Vector::unit(dim, axis), hi[axis] + pad));
        facets.push(Halfspace::new(-Vector::unit(dim, axis), -(lo[axis] - pad)));
    }
    let mut vertices: Vec<Vector> = (0..1usize << dim)
        .map(|m| {
            Vector::from_fn(dim, |i| {
                if m >> i & 1 == 1 {
                    facets[2 * i].offset
                } else {
                    -facets[2 * i + 1].offset
                }
            })
        })
        .collect();

    for h in &normalized {
        clip(dim, &mut facets, &mut vertices, *h)?;
    }
    if affine_rank(&vertices, EPS_GEOM) != Some(dim) {
        return Err(Error::Construction(
            "intersection has empty interior".into(),
        ));
    }
    Ok(Polytope {
        dim,
        halfspaces: facets,
        vertices,
    })
}

fn clip(
    dim: usize,
    facets: &mut Vec<Halfspace>,
    vertices: &mut Vec<Vector>,
    h: Halfspace,
) -> Result<()> {
    if vertices.iter().all(|v| h.contains(v, EPS_GEOM)) {
        return Ok(());
    }
    let mut next: Vec<Vector> = vertices
        .iter()
        .filter(|v| h.contains(v, EPS_GEOM))
        .copied()
        .collect();
    let mut rows = Vec::with_capacity(dim);
    let mut rhs = Vec::with_capacity(dim);
    for_each_combination(facets.len(), dim - 1, |idx| {
        rows.clear();
        rhs.clear();
        rows.push(h.normal);
        rhs.push(h.offset);
        for &i in idx {
            rows.push(facets[i].normal);
            rhs.push(facets[i].offset);
        }
        let Some(x) = solve_square(&rows, &rhs) else {
            return;
        };
        if !facets.iter().all(|f| f.contains(&x, EPS_GEOM)) {
            return;
        }
        if !next.iter().any(|v| v.approx_eq(&x, EPS_GEOM)) {
            next.push(x);
        }
    });
    if affine_rank(&next, EPS_GEOM) != Some(dim) {
        return Err(Error::Construction(
            "intersection has empty interior".into(),
        ));
    }
    facets.push(h);
    facets.retain(|f| is_facet(dim, f, &next));
    *vertices = next;
    Ok(())
}

fn is_facet(dim: usize, f: &Halfspace, vertices: &[Vector]) -> bool {
    let tight: Vec<Vector> = vertices
        .iter()
        .filter(|v| f.slack(v).abs() <= EPS_GEOM)
        .copied()
        .collect();
    tight.len() >= dim && affine_rank(&tight, EPS_GEOM) == Some(dim - 1)
}

impl Polytope {
    /// Axis-aligned box `[lo, hi]`.
    pub fn cuboid(lo: &Vector, hi: &Vector) -> Result<Polytope> {
        check_dim(lo.dim(), hi.dim())?;
        let n = lo.dim();
        let mut hs = Vec::new();
        for i in 0..n {
            hs.push(Halfspace::new(Vector::unit(n, i), hi[i]));
            hs.push(Halfspace::new(-Vector::unit(n, i), -lo[i]));
        }
        intersect_halfspaces(n, &hs)
    }

    /// Hull of a point set given by trusted H- and V-representations.
    pub(crate) fn from_parts_unchecked(
        dim: usize,
        halfspaces: Vec<Halfspace>,
        vertices: Vec<Vector>,
    ) -> Polytope {
        Polytope {
            dim,
            halfspaces,
            vertices,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    #[inline]
    pub fn contains(&self, p: &Vector, eps: f64) -> bool {
        self.halfspaces.iter().all(|h| h.contains(p, eps))
    }

    /// Minimum slack over the halfspaces; positive iff `p` is interior.
    pub fn depth(&self, p: &Vector) -> f64 {
        self.halfspaces
            .iter()
            .map(|h| h.slack(p))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn centroid_of_vertices(&self) -> Vector {
        let mut c = Vector::zeros(self.dim);
        for v in &self.vertices {
            c += *v;
        }
        c / self.vertices.len() as f64
    }

    pub fn translated(&self, t: &Vector) -> Polytope {
        Polytope {
            dim: self.dim,
            halfspaces: self
                .halfspaces
                .iter()
                .map(|h| Halfspace::new(h.normal, h.offset + h.normal.dot(t)))
                .collect(),
            vertices: self.vertices.iter().map(|v| *v + *t).collect(),
        }
    }

    /// Homothety `factor·(P − center) + center`.
    pub fn homothety(&self, center: &Vector, factor: f64) -> Polytope {
        Polytope {
            dim: self.dim,
            halfspaces: self
                .halfspaces
                .iter()
                .map(|h| {
                    Halfspace::new(
                        h.normal,
                        factor * h.offset + (1.0 - factor) * h.normal.dot(center),
                    )
                })
                .collect(),
            vertices: self
                .vertices
                .iter()
                .map(|v| *center + (*v - *center) * factor)
                .collect(),
        }
    }

    /// Euclidean bounding box of the vertices.
    pub fn bounding_box(&self) -> (Vector, Vector) {
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for v in &self.vertices[1..] {
            for i in 0..self.dim {
                lo[i] = lo[i].min(v[i]);
                hi[i] = hi[i].max(v[i]);
            }
        }
        (lo, hi)
    }

    /// n-dimensional volume by a pulling triangulation: each face of
    /// dimension d is the cone from one of its vertices over its (d−1)-faces.
    pub fn volume(&self) -> f64 {
        let ids: Vec<usize> = (0..self.vertices.len()).collect();
        self.face_volume(&ids, self.dim)
    }

    fn face_volume(&self, ids: &[usize], d: usize) -> f64 {
        match d {
            0 => return 1.0,
            1 => {
                let mut best: f64 = 0.0;
                for &i in ids {
                    for &j in ids {
                        best = best.max((self.vertices[i] - self.vertices[j]).norm());
                    }
                }
                return best;
            }
            _ => {}
        }
        let apex = ids[0];
        let mut seen: Vec<Vec<usize>> = Vec::new();
        let mut total = 0.0;
        for h in &self.halfspaces {
            let sub: Vec<usize> = ids
                .iter()
                .copied()
                .filter(|&i| h.slack(&self.vertices[i]).abs() <= EPS_GEOM)
                .collect();
            if sub.len() == ids.len() || sub.len() < d || sub.contains(&apex) || seen.contains(&sub)
            {
                continue;
            }
            let pts: Vec<Vector> = sub.iter().map(|&i| self.vertices[i]).collect();
            if affine_rank(&pts, EPS_GEOM) != Some(d - 1) {
                continue;
            }
            let height = distance_to_affine_hull(&self.vertices[apex], &pts, EPS_GEOM);
            total += height * self.face_volume(&sub, d - 1) / d as f64;
            seen.push(sub);
        }
        total
    }

    /// True if the interiors of `self` and `other` intersect (LP feasibility
    /// of a common point with positive depth in both).
    pub fn interiors_intersect(&self, other: &Polytope) -> Result<bool> {
        Ok(self.common_depth(other)? > EPS_GEOM)
    }

    /// Largest r such that some point lies at depth ≥ r in both polytopes
    /// (negative when they are disjoint).
    pub fn common_depth(&self, other: &Polytope) -> Result<f64> {
        check_dim(self.dim, other.dim)?;
        let n = self.dim;
        let mut costs = vec![0.0; n + 1];
        costs[n] = 1.0;
        let mut lp = LpProblem::maximize(costs);
        for j in 0..=n {
            lp.set_free(j);
        }
        for h in self.halfspaces.iter().chain(&other.halfspaces) {
            let mut row = h.normal.to_vec();
            row.push(1.0);
            lp.constrain(row, Sense::Le, h.offset);
        }
        let sol = lp.solve()?;
        match sol.status {
            LpStatus::Optimal => Ok(sol.value),
            s => Err(Error::Internal(format!("depth LP ended {s:?}"))),
        }
    }
}
