//! Convex bodies, norms, polytopes (n ≤ 4) and the LP solver they lean on.
//!
//! All geometry runs in `f64` with one absolute tolerance [`EPS_GEOM`],
//! calibrated for inputs normalized to lattice spacing ~1.

mod body;
mod distance;
pub mod lp;
mod polytope;
mod vector;

pub use body::{unit_ball_volume, BodyKind, BodySpec, ConvexBody};
pub use distance::{diameter_in_norm, distance_in_norm, euclidean_hull_distance};
pub use polytope::{intersect_halfspaces, Halfspace, Polytope};
pub use vector::{solve_square, Vector, MAX_DIM};

/// Absolute tolerance for geometric predicates.
pub const EPS_GEOM: f64 = 1e-9;

/// Calls `f` with every `r`-subset of `0..m` in lexicographic order.
pub(crate) fn for_each_combination(m: usize, r: usize, mut f: impl FnMut(&[usize])) {
    if r > m {
        return;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        f(&idx);
        let mut i = r;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < m - r + i {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Orthonormal basis (Gram–Schmidt) of the span of `dirs`, dropping
/// directions whose residual falls below `tol`.
pub(crate) fn orthonormal_basis(dirs: impl IntoIterator<Item = Vector>, tol: f64) -> Vec<Vector> {
    let mut basis: Vec<Vector> = Vec::new();
    for d in dirs {
        let mut r = d;
        // Two passes keep the basis orthogonal to working precision.
        for _ in 0..2 {
            for b in &basis {
                r -= *b * r.dot(b);
            }
        }
        let len = r.norm();
        if len > tol {
            basis.push(r / len);
        }
    }
    basis
}

/// Dimension of the affine hull of `points` (−1 encoded as `None` for the empty set).
pub(crate) fn affine_rank(points: &[Vector], tol: f64) -> Option<usize> {
    let (first, rest) = points.split_first()?;
    Some(orthonormal_basis(rest.iter().map(|p| *p - *first), tol).len())
}

/// Euclidean distance from `x` to the affine hull of `points`.
pub(crate) fn distance_to_affine_hull(x: &Vector, points: &[Vector], tol: f64) -> f64 {
    let first = points[0];
    let basis = orthonormal_basis(points[1..].iter().map(|p| *p - first), tol);
    let mut r = *x - first;
    for _ in 0..2 {
        for b in &basis {
            r -= *b * r.dot(b);
        }
    }
    r.norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_enumerated_in_order() {
        let mut seen = Vec::new();
        for_each_combination(4, 2, |c| seen.push(c.to_vec()));
        assert_eq!(
            seen,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        let mut count = 0;
        for_each_combination(5, 0, |_| count += 1);
        assert_eq!(count, 1);
        for_each_combination(2, 3, |_| panic!("no 3-subsets of 2 elements"));
    }

    #[test]
    fn affine_helpers() {
        let pts = [
            Vector::from_slice(&[0.0, 0.0, 0.0]),
            Vector::from_slice(&[1.0, 0.0, 0.0]),
            Vector::from_slice(&[2.0, 0.0, 0.0]),
        ];
        assert_eq!(affine_rank(&pts, 1e-12), Some(1));
        let d = distance_to_affine_hull(&Vector::from_slice(&[5.0, 3.0, 4.0]), &pts, 1e-12);
        assert!((d - 5.0).abs() < 1e-12);
        assert_eq!(affine_rank(&[], 1e-12), None);
    }
}
