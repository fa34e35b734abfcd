use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::{intersect_halfspaces, ConvexBody, Halfspace, Polytope, Vector, EPS_GEOM};
use crate::lattice::{Multilattice, Torus};

use super::index::for_each_box;
use super::PeriodicTiling;

/// Euclidean Voronoi tiling of a multilattice: one cell per translate,
/// each the set of points at least as close to its site as to every other
/// periodic site.
pub fn voronoi_tiling(m: &Multilattice) -> Result<PeriodicTiling> {
    let cells = voronoi_cells(m.torus(), m.translates())?;
    PeriodicTiling::new(m.clone(), cells)
}

/// Voronoi cells of the periodic point set `sites + Ω`, site i's cell
/// containing `sites[i]`.
pub(crate) fn voronoi_cells(torus: &Torus, sites: &[Vector]) -> Result<Vec<Polytope>> {
    let n = torus.dim();
    let lattice = torus.lattice();
    // Initial search radius: a few times the mean spacing.
    let spacing = (torus.volume() / sites.len() as f64).powf(1.0 / n as f64);
    let mut shifts: Vec<Vector> = Vec::new();
    for_each_box(&vec![-1; n], &vec![1; n], |z| {
        if z.iter().any(|&c| c != 0) {
            shifts.push(lattice.vector(z));
        }
    });
    let ball = ConvexBody::unit_ball(n);
    (0..sites.len())
        .into_par_iter()
        .map(|i| voronoi_cell(torus, sites, i, &shifts, &ball, 2.5 * spacing))
        .collect()
}

fn voronoi_cell(
    torus: &Torus,
    sites: &[Vector],
    i: usize,
    shifts: &[Vector],
    ball: &ConvexBody,
    mut radius: f64,
) -> Result<Polytope> {
    let n = torus.dim();
    let lattice = torus.lattice();
    let x = &sites[i];
    loop {
        // (distance, neighbor offset from x)
        let mut near: Vec<(f64, Vector)> = shifts.iter().map(|w| (w.norm(), *w)).collect();
        for (j, y) in sites.iter().enumerate() {
            let d = torus.centered_difference(y, x);
            let mut coincident = false;
            lattice.for_each_near(ball, &-d, radius, |z, w, dist| {
                let off = d + w;
                if j == i && z.iter().all(|&c| c == 0) {
                    return;
                }
                if j != i && dist <= EPS_GEOM {
                    coincident = true;
                }
                near.push((off.norm(), off));
            });
            if coincident {
                return Err(Error::Construction(format!(
                    "sites {i} and {j} coincide modulo the lattice"
                )));
            }
        }
        near.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.lex_cmp(&b.1)));
        near.dedup_by(|a, b| a.1.approx_eq(&b.1, 1e-12));
        let hs: Vec<Halfspace> = near
            .iter()
            .map(|(len, off)| Halfspace::new(*off, off.dot(x) + 0.5 * len * len))
            .collect();
        let cell = intersect_halfspaces(n, &hs)?;
        let reach = cell
            .vertices()
            .iter()
            .map(|v| (*v - *x).norm())
            .fold(0.0, f64::max);
        // Sites farther than twice the cell radius cannot cut the cell.
        if 2.0 * reach <= radius {
            return Ok(cell);
        }
        radius = 2.0 * reach * (1.0 + 1e-9);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_slice(xs)
    }

    fn has_vertex(p: &Polytope, x: &Vector) -> bool {
        p.vertices().iter().any(|v| v.approx_eq(x, 1e-9))
    }

    #[test]
    fn square_lattice_cell() {
        let t =
            voronoi_tiling(&Multilattice::lattice_only(Lattice::cubic(2, 1.0).unwrap())).unwrap();
        let c = &t.cells()[0];
        assert_eq!(c.vertices().len(), 4);
        for (a, b) in [(0.5, 0.5), (-0.5, 0.5), (0.5, -0.5), (-0.5, -0.5)] {
            assert!(has_vertex(c, &v(&[a, b])));
        }
    }

    #[test]
    fn hexagonal_lattice_cell() {
        let t = voronoi_tiling(&Multilattice::lattice_only(
            Lattice::hexagonal(1.0).unwrap(),
        ))
        .unwrap();
        let c = &t.cells()[0];
        assert_eq!(c.vertices().len(), 6);
        assert_eq!(c.halfspaces().len(), 6);
        for vtx in c.vertices() {
            assert!((vtx.norm() - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        }
        for h in c.halfspaces() {
            assert!((h.offset - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn cube_lattice_cell() {
        let t =
            voronoi_tiling(&Multilattice::lattice_only(Lattice::cubic(3, 2.0).unwrap())).unwrap();
        let c = &t.cells()[0];
        assert_eq!(c.vertices().len(), 8);
        assert!((c.volume() - 8.0).abs() < 1e-9);
        assert!(has_vertex(c, &v(&[1.0, -1.0, 1.0])));
    }

    #[test]
    fn multilattice_cells_partition_the_torus() {
        // Checkerboard-like pattern: ℤ² + {0, (½,½)} is the rotated lattice
        // with diamond cells of area ½.
        let m = Multilattice::new(
            Lattice::cubic(2, 1.0).unwrap(),
            vec![v(&[0.0, 0.0]), v(&[0.5, 0.5])],
        )
        .unwrap();
        let t = voronoi_tiling(&m).unwrap();
        for c in t.cells() {
            assert!((c.volume() - 0.5).abs() < 1e-12);
            assert_eq!(c.vertices().len(), 4);
        }
        let odd = Multilattice::new(
            Lattice::cubic(2, 1.0).unwrap(),
            vec![v(&[0.1, 0.2]), v(&[0.7, 0.4]), v(&[0.35, 0.85])],
        )
        .unwrap();
        let t = voronoi_tiling(&odd).unwrap();
        let total: f64 = t.cells().iter().map(Polytope::volume).sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn coincident_sites_rejected() {
        let torus = Torus::new(Lattice::cubic(2, 1.0).unwrap());
        assert!(voronoi_cells(&torus, &[v(&[0.1, 0.1]), v(&[0.1, 0.1])]).is_err());
    }
}
