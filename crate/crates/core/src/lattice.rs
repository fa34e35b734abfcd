//! Lattices Ω ⊂ ℝⁿ, multilattices Ω + {x₁..x_k}, and arithmetic on the
//! torus ℝⁿ/Ω.
//!
//! Points on the torus are represented by their canonical ambient
//! representative: fractional basis coordinates in `[0, 1)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::geom::{ConvexBody, Vector, EPS_GEOM, MAX_DIM};

/// Upper bound on `resolutionⁿ` accepted by [`Torus::sample_grid`].
pub const MAX_GRID_POINTS: usize = 100_000_000;

/// Full-rank lattice given by n generators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vector>", into = "Vec<Vector>")]
pub struct Lattice {
    basis: Vec<Vector>,
    /// Rows of the inverse basis matrix: `frac_j(p) = inv[j]·p`.
    inv: Vec<Vector>,
    covolume: f64,
}

impl TryFrom<Vec<Vector>> for Lattice {
    type Error = Error;
    fn try_from(basis: Vec<Vector>) -> Result<Self> {
        Lattice::new(basis)
    }
}

impl From<Lattice> for Vec<Vector> {
    fn from(l: Lattice) -> Self {
        l.basis
    }
}

impl Lattice {
    /// Lattice generated by `basis` (one vector per generator).
    pub fn new(basis: Vec<Vector>) -> Result<Self> {
        let n = basis.len();
        if !(1..=MAX_DIM).contains(&n) {
            return Err(Error::Unsupported(format!("lattices of rank {n}")));
        }
        for b in &basis {
            check_dim(n, b.dim())?;
            if !b.is_finite() {
                return Err(Error::invalid("non-finite lattice generator"));
            }
        }
        let m = DMatrix::from_fn(n, n, |i, j| basis[j][i]);
        let det = m.determinant();
        if det.abs() <= EPS_GEOM {
            return Err(Error::invalid(format!(
                "degenerate lattice basis (|det| = {:.3e})",
                det.abs()
            )));
        }
        let inverse = m
            .try_inverse()
            .ok_or_else(|| Error::invalid("lattice basis is not invertible"))?;
        let inv = (0..n)
            .map(|i| Vector::from_fn(n, |j| inverse[(i, j)]))
            .collect();
        Ok(Lattice {
            basis,
            inv,
            covolume: det.abs(),
        })
    }

    /// `spacing · ℤⁿ`.
    pub fn cubic(n: usize, spacing: f64) -> Result<Self> {
        if !(spacing > 0.0) {
            return Err(Error::invalid("lattice spacing must be positive"));
        }
        Lattice::new((0..n).map(|i| Vector::unit(n, i) * spacing).collect())
    }

    /// Hexagonal lattice with basis (s, 0), (s/2, s√3/2).
    pub fn hexagonal(spacing: f64) -> Result<Self> {
        if !(spacing > 0.0) {
            return Err(Error::invalid("lattice spacing must be positive"));
        }
        Lattice::new(vec![
            Vector::from_slice(&[spacing, 0.0]),
            Vector::from_slice(&[0.5 * spacing, 0.5 * 3f64.sqrt() * spacing]),
        ])
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn covolume(&self) -> f64 {
        self.covolume
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Lattice::new(self.basis.iter().map(|b| *b * c).collect())
    }

    /// Basis coordinates of `p`.
    #[inline]
    pub fn coords(&self, p: &Vector) -> Vector {
        Vector::from_fn(self.dim(), |j| self.inv[j].dot(p))
    }

    /// Ambient point with basis coordinates `f`.
    #[inline]
    pub fn point(&self, f: &Vector) -> Vector {
        let mut out = Vector::zeros(self.dim());
        for (j, b) in self.basis.iter().enumerate() {
            out += *b * f[j];
        }
        out
    }

    /// Lattice vector Σ zⱼ bⱼ.
    pub fn vector(&self, z: &[i64]) -> Vector {
        self.point(&Vector::from_fn(self.dim(), |j| z[j] as f64))
    }

    /// Euclidean length of the j-th row of the inverse basis: `|z_j| ≤ row_j · |w|`
    /// for the coordinates of any vector w.
    fn inv_row_norm(&self, j: usize) -> f64 {
        self.inv[j].norm()
    }

    /// All coefficient vectors z with `‖Σ zⱼbⱼ − d‖_K ≤ r` for the given
    /// offset `d` (d = 0 gives lattice vectors of K-norm ≤ r). The search
    /// box is derived from `|w|₂ ≤ R_K‖w‖_K` and the inverse basis rows, so
    /// nothing is missed.
    pub fn for_each_near(
        &self,
        k: &ConvexBody,
        d: &Vector,
        r: f64,
        mut f: impl FnMut(&[i64], Vector, f64),
    ) {
        let n = self.dim();
        let c = self.coords(d);
        let reach = r * k.circumradius();
        let mut lo = [0i64; MAX_DIM];
        let mut hi = [0i64; MAX_DIM];
        for j in 0..n {
            let b = reach * self.inv_row_norm(j) + 1e-12;
            lo[j] = (c[j] - b).ceil() as i64;
            hi[j] = (c[j] + b).floor() as i64;
            if lo[j] > hi[j] {
                return;
            }
        }
        let mut z = lo;
        loop {
            let w = self.vector(&z[..n]);
            let dist = k.norm_of(&(w - *d));
            if dist <= r {
                f(&z[..n], w, dist);
            }
            let mut j = 0;
            loop {
                if j == n {
                    return;
                }
                if z[j] < hi[j] {
                    z[j] += 1;
                    break;
                }
                z[j] = lo[j];
                j += 1;
            }
        }
    }

    /// Nonzero lattice vectors of K-norm ≤ r, sorted by norm then lexicographically.
    pub fn short_vectors(&self, k: &ConvexBody, r: f64) -> Vec<(Vector, f64)> {
        let mut out = Vec::new();
        self.for_each_near(k, &Vector::zeros(self.dim()), r, |z, w, d| {
            if z.iter().any(|&zi| zi != 0) {
                out.push((w, d));
            }
        });
        out.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.lex_cmp(&b.0)));
        out
    }

    /// Minimum K-norm of a nonzero lattice vector.
    pub fn minimum_norm(&self, k: &ConvexBody) -> f64 {
        // Some basis vector bounds the minimum from above.
        let r = self
            .basis
            .iter()
            .map(|b| k.norm_of(b))
            .fold(f64::INFINITY, f64::min);
        self.short_vectors(k, r * (1.0 + 1e-12))
            .first()
            .map_or(r, |(_, d)| *d)
    }
}

/// The quotient ℝⁿ/Ω.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Torus {
    lattice: Lattice,
}

impl Torus {
    pub fn new(lattice: Lattice) -> Self {
        Torus { lattice }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn volume(&self) -> f64 {
        self.lattice.covolume()
    }

    /// Fractional coordinates of p's class, each in `[0, 1)`.
    #[inline]
    pub fn frac(&self, p: &Vector) -> Vector {
        self.lattice.coords(p).map(wrap_unit)
    }

    /// Canonical representative of p modulo Ω.
    #[inline]
    pub fn reduce(&self, p: &Vector) -> Vector {
        self.lattice.point(&self.frac(p))
    }

    /// Representative of p − q modulo Ω with basis coordinates in `[−½, ½)`.
    #[inline]
    pub fn centered_difference(&self, p: &Vector, q: &Vector) -> Vector {
        let c = self
            .lattice
            .coords(&(*p - *q))
            .map(|x| x - (x + 0.5).floor());
        self.lattice.point(&c)
    }

    /// Quotient distance min over w ∈ Ω of ‖p − q + w‖_K.
    pub fn distance(&self, k: &ConvexBody, p: &Vector, q: &Vector) -> Result<f64> {
        check_dim(self.dim(), k.dim())?;
        check_dim(self.dim(), p.dim())?;
        check_dim(self.dim(), q.dim())?;
        if !p.is_finite() || !q.is_finite() {
            return Err(Error::invalid("non-finite torus point"));
        }
        Ok(self.distance_of(k, p, q))
    }

    /// [`Torus::distance`] without argument checks.
    pub fn distance_of(&self, k: &ConvexBody, p: &Vector, q: &Vector) -> f64 {
        let d = self.centered_difference(p, q);
        let d0 = k.norm_of(&d);
        let mut best = d0;
        // Any better image d − w has ‖w − d‖_K ≤ d0.
        self.lattice.for_each_near(k, &d, d0, |_, w, _| {
            best = best.min(k.norm_of(&(d - w)));
        });
        best
    }

    /// `resolutionⁿ` points with basis coordinates in {0, 1/r, …, (r−1)/r};
    /// coordinate 0 varies fastest.
    pub fn sample_grid(&self, resolution: usize) -> Result<Vec<Vector>> {
        let n = self.dim();
        let count = grid_size(n, resolution)?;
        Ok((0..count)
            .map(|idx| self.lattice.point(&grid_coords(n, resolution, idx)))
            .collect())
    }
}

/// Number of points of an n-dimensional grid at the given resolution.
pub fn grid_size(n: usize, resolution: usize) -> Result<usize> {
    if resolution < 2 {
        return Err(Error::invalid(format!(
            "grid resolution must be at least 2, got {resolution}"
        )));
    }
    let mut count: usize = 1;
    for _ in 0..n {
        count = count
            .checked_mul(resolution)
            .filter(|&c| c <= MAX_GRID_POINTS)
            .ok_or_else(|| {
                Error::invalid(format!(
                    "grid {resolution}^{n} exceeds {MAX_GRID_POINTS} points"
                ))
            })?;
    }
    Ok(count)
}

/// Basis coordinates of grid point `idx` (coordinate 0 fastest).
#[inline]
pub fn grid_coords(n: usize, resolution: usize, mut idx: usize) -> Vector {
    let mut f = Vector::zeros(n);
    for j in 0..n {
        f[j] = (idx % resolution) as f64 / resolution as f64;
        idx /= resolution;
    }
    f
}

#[inline]
fn wrap_unit(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Ω + {x₁, …, x_k}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MultilatticeRepr", into = "MultilatticeRepr")]
pub struct Multilattice {
    torus: Torus,
    translates: Vec<Vector>,
}

#[derive(Serialize, Deserialize)]
struct MultilatticeRepr {
    lattice_basis: Lattice,
    translates: Vec<Vector>,
}

impl TryFrom<MultilatticeRepr> for Multilattice {
    type Error = Error;
    fn try_from(r: MultilatticeRepr) -> Result<Self> {
        Multilattice::new(r.lattice_basis, r.translates)
    }
}

impl From<Multilattice> for MultilatticeRepr {
    fn from(m: Multilattice) -> Self {
        MultilatticeRepr {
            lattice_basis: m.torus.lattice,
            translates: m.translates,
        }
    }
}

impl Multilattice {
    /// Reduces every translate to the fundamental domain and rejects
    /// translates that coincide modulo Ω.
    pub fn new(base: Lattice, translates: Vec<Vector>) -> Result<Self> {
        if translates.is_empty() {
            return Err(Error::invalid(
                "a multilattice needs at least one translate",
            ));
        }
        let torus = Torus::new(base);
        let ball = ConvexBody::unit_ball(torus.dim());
        let mut reduced: Vec<Vector> = Vec::with_capacity(translates.len());
        for x in &translates {
            check_dim(torus.dim(), x.dim())?;
            if !x.is_finite() {
                return Err(Error::invalid("non-finite translate"));
            }
            let r = torus.reduce(x);
            if let Some(i) = reduced
                .iter()
                .position(|y| torus.distance_of(&ball, y, &r) <= EPS_GEOM)
            {
                return Err(Error::invalid(format!(
                    "translates {i} and {} coincide modulo the lattice",
                    reduced.len()
                )));
            }
            reduced.push(r);
        }
        Ok(Multilattice {
            torus,
            translates: reduced,
        })
    }

    /// The lattice itself (k = 1, x₁ = 0).
    pub fn lattice_only(base: Lattice) -> Self {
        let n = base.dim();
        Multilattice {
            torus: Torus::new(base),
            translates: vec![Vector::zeros(n)],
        }
    }

    pub fn base(&self) -> &Lattice {
        self.torus.lattice()
    }

    pub fn torus(&self) -> &Torus {
        &self.torus
    }

    pub fn translates(&self) -> &[Vector] {
        &self.translates
    }

    /// q(Φ): the number of translates.
    pub fn q(&self) -> usize {
        self.translates.len()
    }

    pub fn dim(&self) -> usize {
        self.torus.dim()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_slice(xs)
    }

    fn hex() -> Torus {
        Torus::new(Lattice::hexagonal(1.0).unwrap())
    }

    fn square2() -> Torus {
        Torus::new(Lattice::cubic(2, 2.0).unwrap())
    }

    #[test]
    fn reduce_examples() {
        let t = square2();
        assert!(t.reduce(&v(&[2.7, 0.0])).approx_eq(&v(&[0.7, 0.0]), 1e-12));
        assert_eq!(t.reduce(&v(&[0.0, 0.0])), v(&[0.0, 0.0]));
        assert!(t.reduce(&v(&[-0.5, 5.0])).approx_eq(&v(&[1.5, 1.0]), 1e-12));
        assert!(hex()
            .reduce(&v(&[1.0, 0.0]))
            .approx_eq(&v(&[0.0, 0.0]), 1e-12));
        // Tiny negative coordinates must not round up to 1.
        let f = t.frac(&v(&[-1e-18, 0.0]));
        assert!(f[0] < 1.0);
    }

    #[test]
    fn distance_examples() {
        let disk = ConvexBody::unit_ball(2);
        let d = square2()
            .distance(&disk, &v(&[0.0, 0.0]), &v(&[1.9, 0.0]))
            .unwrap();
        assert!((d - 0.1).abs() < 1e-12);
        assert_eq!(
            square2()
                .distance(&disk, &v(&[0.3, 0.4]), &v(&[0.3, 0.4]))
                .unwrap(),
            0.0
        );
        let hole = v(&[0.5, 3f64.sqrt() / 6.0]);
        let d = hex().distance(&disk, &v(&[0.0, 0.0]), &hole).unwrap();
        assert!((d - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        assert!(square2()
            .distance(&disk, &v(&[0.0, 0.0]), &v(&[f64::NAN, 0.0]))
            .is_err());
    }

    #[test]
    fn skewed_basis_distance_matches_brute_force() {
        // A badly reduced basis of ℤ²: (1,0), (7,1).
        let t = Torus::new(Lattice::new(vec![v(&[1.0, 0.0]), v(&[7.0, 1.0])]).unwrap());
        let disk = ConvexBody::unit_ball(2);
        let p = v(&[0.1, 0.05]);
        let q = v(&[3.85, 0.9]);
        let mut brute = f64::INFINITY;
        for a in -20i64..=20 {
            for b in -20i64..=20 {
                let w = v(&[a as f64, b as f64]);
                brute = brute.min((p - q + w).norm());
            }
        }
        assert!((t.distance(&disk, &p, &q).unwrap() - brute).abs() < 1e-12);
    }

    #[test]
    fn sample_grid_examples() {
        let pts = square2().sample_grid(2).unwrap();
        let expected = [
            v(&[0.0, 0.0]),
            v(&[1.0, 0.0]),
            v(&[0.0, 1.0]),
            v(&[1.0, 1.0]),
        ];
        assert_eq!(pts, expected);
        assert!(square2().sample_grid(1).is_err());
        let h = hex();
        let pts = h.sample_grid(3).unwrap();
        assert_eq!(pts.len(), 9);
        for p in &pts {
            let f = h.lattice().coords(p);
            for j in 0..2 {
                let thirds = f[j] * 3.0;
                assert!((thirds - thirds.round()).abs() < 1e-12 && f[j] < 1.0 - 1e-9);
            }
        }
        let t4 = Torus::new(Lattice::cubic(4, 1.0).unwrap());
        assert!(t4.sample_grid(101).is_err());
    }

    #[test]
    fn lattice_validation_and_serde() {
        assert!(Lattice::new(vec![v(&[1.0, 0.0]), v(&[2.0, 0.0])]).is_err());
        assert!(Lattice::new(vec![v(&[1.0, 0.0])]).is_err());
        let l = Lattice::hexagonal(2.0).unwrap();
        assert!((l.covolume() - 2.0 * 3f64.sqrt()).abs() < 1e-12);
        let s = serde_json::to_string(&l).unwrap();
        let back: Lattice = serde_json::from_str(&s).unwrap();
        assert_eq!(back, l);
    }

    #[test]
    fn minimum_norms() {
        let disk = ConvexBody::unit_ball(2);
        assert!((Lattice::hexagonal(1.0).unwrap().minimum_norm(&disk) - 1.0).abs() < 1e-12);
        let skew = Lattice::new(vec![v(&[1.0, 0.0]), v(&[7.0, 1.0])]).unwrap();
        assert!((skew.minimum_norm(&disk) - 1.0).abs() < 1e-12);
        let linf = ConvexBody::square(1.0).unwrap();
        let l = Lattice::new(vec![v(&[3.0, 0.0]), v(&[1.0, 1.0])]).unwrap();
        assert!((l.minimum_norm(&linf) - 1.0).abs() < 1e-12);
        assert_eq!(l.short_vectors(&linf, 1.0).len(), 2);
    }

    #[test]
    fn multilattice_rejects_coincident_translates() {
        let base = Lattice::cubic(2, 1.0).unwrap();
        let m = Multilattice::new(base.clone(), vec![v(&[0.0, 0.0]), v(&[0.5, 0.5])]).unwrap();
        assert_eq!(m.q(), 2);
        let bad = Multilattice::new(base.clone(), vec![v(&[0.25, 0.0]), v(&[1.25, -3.0])]);
        assert!(bad.is_err());
        assert!(Multilattice::new(base, vec![]).is_err());
        let s = serde_json::to_string(&m).unwrap();
        let back: Multilattice = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }

    fn arb_point() -> impl Strategy<Value = Vector> {
        (-10.0f64..10.0, -10.0f64..10.0).prop_map(|(x, y)| v(&[x, y]))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn reduce_is_idempotent(p in arb_point()) {
            for t in [hex(), square2()] {
                let r = t.reduce(&p);
                prop_assert!(t.reduce(&r).approx_eq(&r, 1e-12));
                let f = t.frac(&r);
                prop_assert!(f.as_slice().iter().all(|&x| (0.0..1.0).contains(&x)));
            }
        }

        #[test]
        fn quotient_metric(p in arb_point(), q in arb_point(), r in arb_point()) {
            let l1 = ConvexBody::cross_polytope(2, 1.0).unwrap();
            for t in [hex(), square2()] {
                for k in [ConvexBody::unit_ball(2), l1.clone()] {
                    let pq = t.distance_of(&k, &p, &q);
                    prop_assert!(pq <= t.distance_of(&k, &p, &r) + t.distance_of(&k, &r, &q) + EPS_GEOM);
                    prop_assert!(pq <= k.norm_of(&(p - q)) + EPS_GEOM);
                    prop_assert!((pq - t.distance_of(&k, &q, &p)).abs() <= EPS_GEOM);
                }
            }
        }
    }
}
