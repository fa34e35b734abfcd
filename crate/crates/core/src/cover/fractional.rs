use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::lp::{LpProblem, LpStatus, Sense, EPS_LP};
use crate::tiling::TilingParameters;

use super::SetSystem;

/// Largest reduced instance (rows or columns) handed to the dense LP solver.
pub const LP_SIZE_LIMIT: usize = 2000;

/// Nonnegative weights on the sets with every element covered to ≥ 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FractionalCover {
    pub weights: Vec<f64>,
    pub total: f64,
}

/// Minimum fractional cover τ* of a set system.
///
/// The instance is first reduced: empty and duplicate sets are dropped, as
/// are sets strictly contained in another set (the superset can take their
/// weight); an element whose family of covering sets contains another
/// element's family is dropped too, since its constraint is implied. The
/// reduced covering LP is solved through its dual packing LP
/// `max Σ y_e  s.t.  Σ_{e∈S} y_e ≤ 1`, whose only rows are `≤ 1` rows, and
/// the set weights are read off the duals.
pub fn fractional_optimum(system: &SetSystem) -> Result<(FractionalCover, f64)> {
    let n = system.ground_size();
    if let Some(&e) = system.uncovered().first() {
        return Err(Error::invalid(format!(
            "infeasible cover instance: element {e} lies in no set"
        )));
    }
    if n == 0 {
        return Ok((
            FractionalCover {
                weights: vec![0.0; system.len()],
                total: 0.0,
            },
            0.0,
        ));
    }
    let cols = reduce_columns(system.sets());
    let col_sets: Vec<&FixedBitSet> = cols.iter().map(|&j| &system.sets()[j]).collect();
    let rows = reduce_rows(n, &col_sets);
    if rows.len() > LP_SIZE_LIMIT || cols.len() > LP_SIZE_LIMIT {
        return Err(Error::Unsupported(format!(
            "fractional cover LP with {} elements × {} sets after reduction exceeds the {LP_SIZE_LIMIT} limit",
            rows.len(),
            cols.len()
        )));
    }

    let mut lp = LpProblem::maximize(vec![1.0; rows.len()]);
    for s in &col_sets {
        let coeffs = rows
            .iter()
            .map(|&e| if s.contains(e) { 1.0 } else { 0.0 })
            .collect();
        lp.constrain(coeffs, Sense::Le, 1.0);
    }
    let sol = lp.solve()?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::Lp(format!(
            "fractional cover dual ended {:?}",
            sol.status
        )));
    }
    let mut weights = vec![0.0; system.len()];
    for (&j, &w) in cols.iter().zip(&sol.duals) {
        weights[j] = w.max(0.0);
    }
    for e in 0..n {
        let cover: f64 = system
            .sets()
            .iter()
            .zip(&weights)
            .filter(|(s, _)| s.contains(e))
            .map(|(_, w)| w)
            .sum();
        if cover < 1.0 - 1e3 * EPS_LP {
            return Err(Error::Lp(format!(
                "fractional cover leaves element {e} at coverage {cover}"
            )));
        }
    }
    let total: f64 = weights.iter().sum();
    if (total - sol.value).abs() > 1e3 * EPS_LP * (1.0 + total) {
        return Err(Error::Lp(format!(
            "primal weight {total} and dual value {} disagree",
            sol.value
        )));
    }
    Ok((FractionalCover { weights, total }, sol.value))
}

/// Indices of the sets kept: nonempty, first of each duplicate class, and
/// not strictly contained in another set.
fn reduce_columns(sets: &[FixedBitSet]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..sets.len())
        .filter(|&j| sets[j].count_ones(..) > 0)
        .collect();
    let size = |j: usize| sets[j].count_ones(..);
    // Larger sets first; a set can only be contained in one at least as large.
    order.sort_by(|&a, &b| size(b).cmp(&size(a)).then(a.cmp(&b)));
    let mut kept: Vec<usize> = Vec::new();
    for j in order {
        if !kept.iter().any(|&i| sets[j].is_subset(&sets[i])) {
            kept.push(j);
        }
    }
    kept.sort_unstable();
    kept
}

/// Elements kept as LP rows: those whose covering family contains no other
/// element's family (ties keep the lowest element).
fn reduce_rows(n: usize, sets: &[&FixedBitSet]) -> Vec<usize> {
    let families: Vec<FixedBitSet> = (0..n)
        .map(|e| {
            let mut f = FixedBitSet::with_capacity(sets.len());
            for (j, s) in sets.iter().enumerate() {
                if s.contains(e) {
                    f.insert(j);
                }
            }
            f
        })
        .collect();
    let size = |e: usize| families[e].count_ones(..);
    let mut order: Vec<usize> = (0..n).collect();
    // Smaller families first; only they can be contained in a later one.
    order.sort_by(|&a, &b| size(a).cmp(&size(b)).then(a.cmp(&b)));
    let mut kept: Vec<usize> = Vec::new();
    for e in order {
        if !kept.iter().any(|&f| families[f].is_subset(&families[e])) {
            kept.push(e);
        }
    }
    kept.sort_unstable();
    kept
}

/// ((1 + γ)/(1 − δ))ⁿ: the bound on τ* over the full family of translates of
/// the shrunk tiling, from the volume fraction each translate occupies.
pub fn measure_bound(params: &TilingParameters, delta: f64, n: usize) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    Ok(((1.0 + params.gamma) / (1.0 - delta)).powi(n as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::greedy_cover;
    use proptest::prelude::*;

    fn params(gamma: f64) -> TilingParameters {
        TilingParameters::from_alpha_beta(1.0, gamma, 1e-6).unwrap()
    }

    #[test]
    fn small_examples() {
        let s = SetSystem::from_lists(4, &[vec![0, 1, 2], vec![2, 3], vec![3]]).unwrap();
        let (fc, tau) = fractional_optimum(&s).unwrap();
        assert!((tau - 2.0).abs() < 1e-9);
        assert!((fc.weights[0] - 1.0).abs() < 1e-9);
        assert!((fc.weights[1] + fc.weights[2] - 1.0).abs() < 1e-9);
        let all = SetSystem::from_lists(5, &[vec![1], (0..5).collect()]).unwrap();
        assert!((fractional_optimum(&all).unwrap().1 - 1.0).abs() < 1e-9);
        let singles =
            SetSystem::from_lists(7, &(0..7).map(|i| vec![i]).collect::<Vec<_>>()).unwrap();
        assert!((fractional_optimum(&singles).unwrap().1 - 7.0).abs() < 1e-9);
    }

    #[test]
    fn fractional_optimum_below_integral() {
        // Triangle: every pair is a set; τ = 2 but τ* = 3/2.
        let s = SetSystem::from_lists(3, &[vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        let (fc, tau) = fractional_optimum(&s).unwrap();
        assert!((tau - 1.5).abs() < 1e-9);
        assert!(fc.weights.iter().all(|w| (w - 0.5).abs() < 1e-9));
    }

    #[test]
    fn infeasible_rejected() {
        let s = SetSystem::from_lists(3, &[vec![0, 1]]).unwrap();
        assert!(fractional_optimum(&s).is_err());
    }

    #[test]
    fn size_guard() {
        let lists: Vec<Vec<usize>> = (0..2001).map(|i| vec![i]).collect();
        let s = SetSystem::from_lists(2001, &lists).unwrap();
        assert!(matches!(fractional_optimum(&s), Err(Error::Unsupported(_))));
    }

    #[test]
    fn measure_bound_examples() {
        assert!((measure_bound(&params(2.0), 1e-12, 2).unwrap() - 9.0).abs() < 1e-9);
        let g = 2.0 / 3f64.sqrt();
        let v = measure_bound(&params(g), 1.0 / (4.0 * 2f64.ln()), 2).unwrap();
        assert!((v - 11.3587039763372).abs() < 1e-9);
        assert!((measure_bound(&params(1.0), 0.5, 1).unwrap() - 4.0).abs() < 1e-12);
        assert!(measure_bound(&params(1.0), 1.0, 1).is_err());
    }

    /// Random feasible system with ≤ 20 elements and ≤ 12 sets.
    fn random_system(seed: u64) -> SetSystem {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=20);
        let m = rng.gen_range(1..=12);
        let mut lists: Vec<Vec<usize>> = (0..m)
            .map(|_| (0..n).filter(|_| rng.gen_bool(0.3)).collect())
            .collect();
        for e in 0..n {
            if !lists.iter().any(|l| l.contains(&e)) {
                let j = rng.gen_range(0..m);
                lists[j].push(e);
            }
        }
        SetSystem::from_lists(n, &lists).unwrap()
    }

    /// The unreduced covering LP `min Σ w  s.t.  Σ_{S∋e} w_S ≥ 1`, solved
    /// directly (a different code path: ≥ rows go through phase 1).
    fn primal_optimum(s: &SetSystem) -> f64 {
        let mut lp = LpProblem::minimize(vec![1.0; s.len()]);
        for e in 0..s.ground_size() {
            lp.constrain(
                s.sets()
                    .iter()
                    .map(|set| if set.contains(e) { 1.0 } else { 0.0 })
                    .collect(),
                Sense::Ge,
                1.0,
            );
        }
        let sol = lp.solve().unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        sol.value
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn lp_bounds_hold(seed in any::<u64>()) {
            let s = random_system(seed);
            let (fc, tau) = fractional_optimum(&s).unwrap();
            let g = greedy_cover(&s).unwrap();
            let h = s.max_set_size() as f64;
            prop_assert!(tau <= g.len() as f64 + 1e-9);
            prop_assert!(tau >= s.ground_size() as f64 / h - 1e-9);
            prop_assert!((g.len() as f64) < (1.0 + h.ln()) * tau + 1e-9);
            prop_assert!(fc.weights.iter().all(|&w| w >= 0.0));
            prop_assert!((fc.total - tau).abs() < 1e-7);
            prop_assert!((tau - primal_optimum(&s)).abs() < 1e-7);
        }
    }
}
