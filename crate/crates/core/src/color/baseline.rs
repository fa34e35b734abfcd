use crate::error::Result;
use crate::geom::{ConvexBody, Vector};
use crate::lattice::{Lattice, Multilattice};
use crate::tiling::voronoi_tiling;

use super::{verify_coloring, Coloring, VerificationReport};

/// Hexagon diameter is 1 − this.
pub const SEVEN_COLOR_SLACK: f64 = 1e-3;
/// Torus grid resolution of the totality check.
const TOTALITY_RES: usize = 128;

/// The classical 7-coloring of the plane: hexagons of diameter 1 − 10⁻³,
/// colored by their class modulo the index-7 sublattice spanned by
/// 2h₁ + h₂ and −h₁ + 3h₂. Same-colored hexagons are more than 1 apart.
pub fn partition_seven_baseline(
    pair_samples: usize,
    seed: u64,
) -> Result<(Coloring, VerificationReport)> {
    let a = (1.0 - SEVEN_COLOR_SLACK) * 3f64.sqrt() / 2.0;
    let h1 = Vector::from_slice(&[a, 0.0]);
    let h2 = Vector::from_slice(&[a / 2.0, a * 3f64.sqrt() / 2.0]);
    let omega = Lattice::new(vec![h1 * 2.0 + h2, h2 * 3.0 - h1])?;
    // h₁ has order 7 modulo the sublattice, so its multiples hit every class.
    let sites = (0..7).map(|i| h1 * i as f64).collect();
    let tiling = voronoi_tiling(&Multilattice::new(omega, sites)?)?;
    let coloring =
        Coloring::cell_partition(ConvexBody::unit_ball(2), tiling, (0..7).collect(), 1.0)?;
    let report = verify_coloring(&coloring, pair_samples, seed, Some(TOTALITY_RES))?;
    Ok((coloring, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seven_colors_pass() {
        let (c, r) = partition_seven_baseline(20_000, 3).unwrap();
        assert_eq!(c.color_count(), 7);
        assert!(r.passed(), "{r:?}");
        // Hexagon diameter 2a/√3 = 1 − 10⁻³.
        assert!((r.structural.max_diameter - (1.0 - SEVEN_COLOR_SLACK)).abs() < 1e-9);
        // Vertex-to-edge distances over the nearest sublattice copies,
        // computed independently.
        assert!((r.structural.min_separation - 1.3215527798767623).abs() < 1e-9);
        assert!(r.structural.separation_attained);
        for i in 0..7 {
            let x = c.tiling().sites()[i];
            assert_eq!(c.color_of(&x).unwrap(), i);
        }
    }
}
