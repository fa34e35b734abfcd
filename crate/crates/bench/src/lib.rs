//! Benchmark fixtures.

use chromatic_tiler::cover::SetSystem;
use chromatic_tiler::lattice::{Lattice, Multilattice, Torus};
use chromatic_tiler::tiling::{
    tiling_parameters, voronoi_tiling, PeriodicTiling, TilingParameters,
};
use chromatic_tiler::ConvexBody;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn hexagonal() -> (PeriodicTiling, TilingParameters) {
    let t = voronoi_tiling(&Multilattice::lattice_only(
        Lattice::hexagonal(1.0).unwrap(),
    ))
    .unwrap();
    let p = tiling_parameters(&t, &ConvexBody::unit_ball(2), 1e-6).unwrap();
    (t, p)
}

pub fn unit_torus(n: usize) -> Torus {
    Torus::new(Lattice::cubic(n, 1.0).unwrap())
}

/// `sets` random subsets of `0..ground`, each element kept with
/// probability `p`, patched to be a feasible cover instance.
pub fn random_set_system(ground: usize, sets: usize, p: f64, seed: u64) -> SetSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lists: Vec<Vec<usize>> = (0..sets)
        .map(|_| (0..ground).filter(|_| rng.gen_bool(p)).collect())
        .collect();
    for e in 0..ground {
        if !lists.iter().any(|l| l.contains(&e)) {
            let j = rng.gen_range(0..sets);
            lists[j].push(e);
            lists[j].sort_unstable();
        }
    }
    SetSystem::from_lists(ground, &lists).unwrap()
}

/// `q` random distinct sites in the unit cube, for Voronoi benchmarks.
pub fn random_multilattice(n: usize, q: usize, seed: u64) -> Multilattice {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sites = (0..q)
        .map(|_| chromatic_tiler::Vector::from_fn(n, |_| rng.gen::<f64>()))
        .collect();
    Multilattice::new(Lattice::cubic(n, 1.0).unwrap(), sites).unwrap()
}
