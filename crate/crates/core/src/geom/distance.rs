use super::lp::{LpProblem, LpStatus, Sense};
use super::{solve_square, BodyKind, ConvexBody, Polytope, Vector};
use crate::error::{check_dim, Error, Result};

/// K-norm diameter of `p`: the maximum over vertex pairs, since a convex
/// function on a polytope peaks at vertices.
pub fn diameter_in_norm(p: &Polytope, k: &ConvexBody) -> Result<f64> {
    check_dim(k.dim(), p.dim())?;
    let vs = p.vertices();
    let mut best: f64 = 0.0;
    for (i, u) in vs.iter().enumerate() {
        for v in &vs[i + 1..] {
            best = best.max(k.norm_of(&(*u - *v)));
        }
    }
    Ok(best)
}

/// min over p ∈ P, q ∈ Q of ‖p − q‖_K.
///
/// Works on the Minkowski difference D = conv{pᵢ − qⱼ}: for the Euclidean
/// ball the distance from the origin to D comes from GJK with an exact
/// sub-simplex projection; for a polytope K it is the LP
/// `min t  s.t.  d ∈ D, ‖d‖_K ≤ t`.
pub fn distance_in_norm(p: &Polytope, q: &Polytope, k: &ConvexBody) -> Result<f64> {
    check_dim(p.dim(), q.dim())?;
    check_dim(k.dim(), p.dim())?;
    match k.kind() {
        BodyKind::EuclideanBall => {
            Ok(euclidean_hull_distance(p.vertices(), q.vertices()) / k.scale())
        }
        BodyKind::SymmetricPolytope { facets, .. } => {
            polytope_norm_distance(p.vertices(), q.vertices(), facets, k.scale())
        }
    }
}

fn polytope_norm_distance(
    ps: &[Vector],
    qs: &[Vector],
    facets: &[Vector],
    scale: f64,
) -> Result<f64> {
    let diffs: Vec<Vector> = ps
        .iter()
        .flat_map(|p| qs.iter().map(move |q| *p - *q))
        .collect();
    let nd = diffs.len();
    // Variables: λ (convex weights on D's generators), then t.
    let mut costs = vec![0.0; nd + 1];
    costs[nd] = 1.0;
    let mut lp = LpProblem::minimize(costs);
    let mut sum = vec![1.0; nd + 1];
    sum[nd] = 0.0;
    lp.constrain(sum, Sense::Eq, 1.0);
    for a in facets {
        let mut row: Vec<f64> = diffs.iter().map(|d| a.dot(d)).collect();
        row.push(-1.0);
        lp.constrain(row, Sense::Le, 0.0);
    }
    let sol = lp.solve()?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.value.max(0.0) / scale),
        s => Err(Error::Internal(format!("polytope distance LP ended {s:?}"))),
    }
}

/// Euclidean distance between conv(ps) and conv(qs) (GJK).
pub fn euclidean_hull_distance(ps: &[Vector], qs: &[Vector]) -> f64 {
    let n = ps[0].dim();
    let support = |dir: &Vector| -> Vector {
        let p = ps
            .iter()
            .max_by(|a, b| a.dot(dir).total_cmp(&b.dot(dir)))
            .unwrap();
        let q = qs
            .iter()
            .min_by(|a, b| a.dot(dir).total_cmp(&b.dot(dir)))
            .unwrap();
        *p - *q
    };
    let mut v = ps[0] - qs[0];
    let mut simplex = vec![v];
    for _ in 0..256 {
        let vv = v.norm_sq();
        if vv <= 1e-30 {
            return 0.0;
        }
        let w = support(&-v);
        if vv - v.dot(&w) <= 1e-13 * vv
            || simplex
                .iter()
                .any(|s| s.approx_eq(&w, 1e-15 * (1.0 + vv.sqrt())))
        {
            return vv.sqrt();
        }
        simplex.push(w);
        let (nv, active) = closest_on_simplex(&simplex);
        simplex = active;
        v = nv;
        if simplex.len() == n + 1 {
            return 0.0;
        }
    }
    v.norm()
}

/// Closest point to the origin of conv(points) (at most n+1 points), and the
/// minimal subset whose relative interior contains it.
fn closest_on_simplex(points: &[Vector]) -> (Vector, Vec<Vector>) {
    let m = points.len();
    let mut best: Option<(f64, Vector, u32)> = None;
    for mask in 1u32..(1 << m) {
        let sub: Vec<Vector> = (0..m)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| points[i])
            .collect();
        let Some((x, lambdas)) = project_origin_affine(&sub) else {
            continue;
        };
        if lambdas.iter().any(|&l| l < -1e-12) {
            continue;
        }
        let d = x.norm_sq();
        if best.as_ref().is_none_or(|(bd, _, _)| d < *bd) {
            best = Some((d, x, mask));
        }
    }
    let (_, x, mask) = best.expect("singletons always project");
    (
        x,
        (0..m)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| points[i])
            .collect(),
    )
}

/// Projection of the origin onto aff(s₀..s_k) with barycentric coordinates,
/// or `None` if the points are affinely dependent.
fn project_origin_affine(s: &[Vector]) -> Option<(Vector, Vec<f64>)> {
    let s0 = s[0];
    let k = s.len() - 1;
    if k == 0 {
        return Some((s0, vec![1.0]));
    }
    let e: Vec<Vector> = s[1..].iter().map(|p| *p - s0).collect();
    let gram: Vec<Vector> = (0..k)
        .map(|i| Vector::from_fn(k, |j| e[i].dot(&e[j])))
        .collect();
    let rhs: Vec<f64> = e.iter().map(|ei| -ei.dot(&s0)).collect();
    let c = solve_square(&gram, &rhs)?;
    let mut x = s0;
    let mut lambdas = vec![1.0 - c.as_slice().iter().sum::<f64>()];
    for i in 0..k {
        x += e[i] * c[i];
        lambdas.push(c[i]);
    }
    Some((x, lambdas))
}
