use serde::{Deserialize, Serialize};

use super::{
    affine_rank, for_each_combination, orthonormal_basis, solve_square, Vector, EPS_GEOM, MAX_DIM,
};
use crate::error::{check_dim, Error, Result};

/// The norm body K: a Euclidean ball or a centrally symmetric polytope,
/// multiplied by a positive `scale`.
///
/// Polytope bodies keep both representations: the vertex list (used by the
/// support function) and facet normals `a` with `a·x ≤ 1` on the unscaled
/// body (used by the Minkowski functional).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BodySpec", into = "BodySpec")]
pub struct ConvexBody {
    dim: usize,
    scale: f64,
    kind: BodyKind,
}

#[derive(Clone, Debug, PartialEq)]
pub enum BodyKind {
    EuclideanBall,
    SymmetricPolytope {
        vertices: Vec<Vector>,
        facets: Vec<Vector>,
    },
}

/// Serialized form of a [`ConvexBody`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BodySpec {
    Ball {
        dimension: usize,
        #[serde(default = "one")]
        scale: f64,
    },
    Polytope {
        vertices: Vec<Vector>,
        #[serde(default = "one")]
        scale: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl TryFrom<BodySpec> for ConvexBody {
    type Error = Error;
    fn try_from(spec: BodySpec) -> Result<Self> {
        match spec {
            BodySpec::Ball { dimension, scale } => ConvexBody::ball(dimension, scale),
            BodySpec::Polytope { vertices, scale } => ConvexBody::polytope(vertices, scale),
        }
    }
}

impl From<ConvexBody> for BodySpec {
    fn from(b: ConvexBody) -> Self {
        match b.kind {
            BodyKind::EuclideanBall => BodySpec::Ball {
                dimension: b.dim,
                scale: b.scale,
            },
            BodyKind::SymmetricPolytope { vertices, .. } => BodySpec::Polytope {
                vertices,
                scale: b.scale,
            },
        }
    }
}

fn check_scale(scale: f64) -> Result<()> {
    if scale.is_finite() && scale > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "body scale must be positive and finite, got {scale}"
        )))
    }
}

impl ConvexBody {
    pub fn ball(dim: usize, scale: f64) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::Unsupported(format!(
                "dimension {dim} (supported: 1..={MAX_DIM})"
            )));
        }
        check_scale(scale)?;
        Ok(ConvexBody {
            dim,
            scale,
            kind: BodyKind::EuclideanBall,
        })
    }

    pub fn unit_ball(dim: usize) -> Self {
        Self::ball(dim, 1.0).expect("unit ball in supported dimension")
    }

    /// Symmetric polytope `scale · conv(vertices)`.
    ///
    /// Rejects vertex lists that are not closed under negation, not
    /// full-dimensional, or that contain a point inside the hull of the others.
    pub fn polytope(vertices: Vec<Vector>, scale: f64) -> Result<Self> {
        check_scale(scale)?;
        let dim = vertices
            .first()
            .map(Vector::dim)
            .ok_or_else(|| Error::invalid("polytope body needs vertices"))?;
        for v in &vertices {
            check_dim(dim, v.dim())?;
            if !v.is_finite() {
                return Err(Error::invalid("non-finite vertex"));
            }
        }
        for (i, v) in vertices.iter().enumerate() {
            let tol = EPS_GEOM * (1.0 + v.norm());
            if !vertices.iter().any(|w| (*w + *v).max_abs() <= tol) {
                return Err(Error::invalid(format!(
                    "vertex {i} {v:?} has no antipode; body is not centrally symmetric"
                )));
            }
        }
        let facets = polytope_facets(&vertices)?;
        for (i, v) in vertices.iter().enumerate() {
            let tight = facets
                .iter()
                .filter(|a| (a.dot(v) - 1.0).abs() <= EPS_GEOM * (1.0 + v.norm()));
            if orthonormal_basis(tight.copied(), 1e-9).len() < dim {
                return Err(Error::invalid(format!(
                    "vertex {i} {v:?} is redundant (not extreme)"
                )));
            }
        }
        Ok(ConvexBody {
            dim,
            scale,
            kind: BodyKind::SymmetricPolytope { vertices, facets },
        })
    }

    /// The square `[-1,1]²` scaled: the ℓ∞ ball in the plane.
    pub fn square(scale: f64) -> Result<Self> {
        let v = |x, y| Vector::from_slice(&[x, y]);
        Self::polytope(
            vec![v(1.0, 1.0), v(-1.0, 1.0), v(-1.0, -1.0), v(1.0, -1.0)],
            scale,
        )
    }

    /// The cross-polytope (ℓ₁ ball) in dimension `dim`.
    pub fn cross_polytope(dim: usize, scale: f64) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::Unsupported(format!("dimension {dim}")));
        }
        let mut vs = Vec::new();
        for i in 0..dim {
            vs.push(Vector::unit(dim, i));
            vs.push(-Vector::unit(dim, i));
        }
        Self::polytope(vs, scale)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn kind(&self) -> &BodyKind {
        &self.kind
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self.kind, BodyKind::EuclideanBall)
    }

    /// Same shape with the scale multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        check_scale(self.scale * factor)?;
        Ok(ConvexBody {
            scale: self.scale * factor,
            ..self.clone()
        })
    }

    /// Minkowski functional ‖v‖_K = inf{t ≥ 0 : v ∈ tK}.
    pub fn norm(&self, v: &Vector) -> Result<f64> {
        check_dim(self.dim, v.dim())?;
        Ok(self.norm_of(v))
    }

    /// [`ConvexBody::norm`] without the dimension check, for hot loops.
    #[inline]
    pub fn norm_of(&self, v: &Vector) -> f64 {
        debug_assert_eq!(self.dim, v.dim());
        match &self.kind {
            BodyKind::EuclideanBall => v.norm() / self.scale,
            BodyKind::SymmetricPolytope { facets, .. } => {
                facets.iter().fold(0.0f64, |m, a| m.max(a.dot(v).abs())) / self.scale
            }
        }
    }

    /// Support function h_K(a) = max over u ∈ K of a·u.
    pub fn support(&self, a: &Vector) -> Result<f64> {
        check_dim(self.dim, a.dim())?;
        if a.max_abs() == 0.0 {
            return Err(Error::invalid("support function of the zero vector"));
        }
        Ok(match &self.kind {
            BodyKind::EuclideanBall => self.scale * a.norm(),
            BodyKind::SymmetricPolytope { vertices, .. } => {
                self.scale
                    * vertices
                        .iter()
                        .map(|v| a.dot(v))
                        .fold(f64::NEG_INFINITY, f64::max)
            }
        })
    }

    /// Largest Euclidean ball about the origin contained in K.
    pub fn inradius(&self) -> f64 {
        match &self.kind {
            BodyKind::EuclideanBall => self.scale,
            BodyKind::SymmetricPolytope { facets, .. } => {
                self.scale / facets.iter().map(Vector::norm).fold(0.0, f64::max)
            }
        }
    }

    /// Smallest Euclidean ball about the origin containing K.
    pub fn circumradius(&self) -> f64 {
        match &self.kind {
            BodyKind::EuclideanBall => self.scale,
            BodyKind::SymmetricPolytope { vertices, .. } => {
                self.scale * vertices.iter().map(Vector::norm).fold(0.0, f64::max)
            }
        }
    }

    /// Lipschitz constant of ‖·‖_K with respect to Euclidean displacement.
    pub fn lipschitz(&self) -> f64 {
        1.0 / self.inradius()
    }

    /// Facet normals `a` with `a·x ≤ scale` describing K (polytope bodies only).
    pub fn facet_normals(&self) -> Option<&[Vector]> {
        match &self.kind {
            BodyKind::EuclideanBall => None,
            BodyKind::SymmetricPolytope { facets, .. } => Some(facets),
        }
    }

    /// Vertices of the unscaled body (polytope bodies only).
    pub fn vertices(&self) -> Option<&[Vector]> {
        match &self.kind {
            BodyKind::EuclideanBall => None,
            BodyKind::SymmetricPolytope { vertices, .. } => Some(vertices),
        }
    }

    /// Volume of K (used for packing-count bounds).
    pub fn volume(&self) -> f64 {
        let n = self.dim as i32;
        match &self.kind {
            BodyKind::EuclideanBall => unit_ball_volume(self.dim) * self.scale.powi(n),
            BodyKind::SymmetricPolytope { vertices, facets } => {
                let hs = facets
                    .iter()
                    .map(|a| super::Halfspace::new(*a, 1.0))
                    .collect::<Vec<_>>();
                let p = super::Polytope::from_parts_unchecked(self.dim, hs, vertices.clone());
                p.volume() * self.scale.powi(n)
            }
        }
    }
}

/// Volume of the Euclidean unit ball in dimension `n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    use std::f64::consts::PI;
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(n - 2) * 2.0 * PI / n as f64,
    }
}

/// Facet normals `a` (with `a·v ≤ 1`, tight on a facet) of the hull of a
/// point set that contains the origin in its interior.
fn polytope_facets(vertices: &[Vector]) -> Result<Vec<Vector>> {
    let n = vertices[0].dim();
    let ones = vec![1.0; n];
    let mut facets: Vec<Vector> = Vec::new();
    for_each_combination(vertices.len(), n, |idx| {
        let rows: Vec<Vector> = idx.iter().map(|&i| vertices[i]).collect();
        let Some(a) = solve_square(&rows, &ones) else {
            return;
        };
        let tol = EPS_GEOM * (1.0 + a.norm());
        if vertices.iter().any(|v| a.dot(v) > 1.0 + tol) {
            return;
        }
        if facets.iter().any(|f| f.approx_eq(&a, tol)) {
            return;
        }
        let tight: Vec<Vector> = vertices
            .iter()
            .filter(|v| (a.dot(v) - 1.0).abs() <= tol)
            .copied()
            .collect();
        if affine_rank(&tight, 1e-9) == Some(n - 1) {
            facets.push(a);
        }
    });
    if facets.is_empty() {
        return Err(Error::invalid(
            "polytope body is not full-dimensional (origin not interior)",
        ));
    }
    Ok(facets)
}
