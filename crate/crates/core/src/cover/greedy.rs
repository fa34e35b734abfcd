use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use crate::error::{Error, Result};

use super::SetSystem;

/// Greedy set cover: repeatedly take the set covering the most uncovered
/// elements, lowest index on ties. Scores are computed in parallel and
/// reduced sequentially, so the result does not depend on the thread count.
pub fn greedy_cover(system: &SetSystem) -> Result<Vec<usize>> {
    let n = system.ground_size();
    let mut uncovered = FixedBitSet::with_capacity(n);
    uncovered.insert_range(..);
    let mut remaining = n;
    let mut chosen = Vec::new();
    while remaining > 0 {
        let scores: Vec<usize> = system
            .sets()
            .par_iter()
            .map(|s| s.intersection(&uncovered).count())
            .collect();
        let (best, score) =
            scores
                .iter()
                .enumerate()
                .fold((0, 0), |acc, (j, &s)| if s > acc.1 { (j, s) } else { acc });
        if score == 0 {
            let e = uncovered.ones().next().unwrap_or(0);
            return Err(Error::invalid(format!(
                "infeasible cover instance: element {e} lies in no set"
            )));
        }
        uncovered.difference_with(&system.sets()[best]);
        remaining -= score;
        chosen.push(best);
    }
    Ok(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_examples() {
        let s = SetSystem::from_lists(4, &[vec![0, 1, 2], vec![2, 3], vec![3]]).unwrap();
        assert_eq!(greedy_cover(&s).unwrap(), vec![0, 1]);
        let all = SetSystem::from_lists(5, &[vec![1], (0..5).collect(), vec![2, 3]]).unwrap();
        assert_eq!(greedy_cover(&all).unwrap(), vec![1]);
        let singles =
            SetSystem::from_lists(6, &(0..6).map(|i| vec![i]).collect::<Vec<_>>()).unwrap();
        assert_eq!(greedy_cover(&singles).unwrap(), (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn ties_go_to_the_lowest_index() {
        let s = SetSystem::from_lists(4, &[vec![0, 1], vec![2, 3], vec![1, 2]]).unwrap();
        assert_eq!(greedy_cover(&s).unwrap(), vec![0, 1]);
    }

    #[test]
    fn infeasible_instance_is_an_error() {
        let s = SetSystem::from_lists(3, &[vec![0], vec![1]]).unwrap();
        assert!(greedy_cover(&s).is_err());
        let empty = SetSystem::from_lists(0, &[]).unwrap();
        assert!(greedy_cover(&empty).unwrap().is_empty());
    }

    /// Brute force over all subfamilies (≤ 12 sets).
    fn optimum(s: &SetSystem) -> usize {
        let m = s.len();
        (0u32..1 << m)
            .filter(|mask| {
                let sel: Vec<usize> = (0..m).filter(|j| mask >> j & 1 == 1).collect();
                s.uncovered_by(&sel).is_empty()
            })
            .map(|mask| mask.count_ones() as usize)
            .min()
            .unwrap()
    }

    #[test]
    fn greedy_is_feasible_and_no_better_than_optimum() {
        let s = SetSystem::from_lists(4, &[vec![0, 1, 2], vec![2, 3], vec![3]]).unwrap();
        assert_eq!(optimum(&s), 2);
        let s = SetSystem::from_lists(
            6,
            &[
                vec![0, 1, 2],
                vec![3, 4, 5],
                vec![0, 3],
                vec![1, 4],
                vec![2, 5],
                vec![0, 1, 3, 4],
            ],
        )
        .unwrap();
        let g = greedy_cover(&s).unwrap();
        assert!(s.uncovered_by(&g).is_empty());
        assert!(g.len() >= optimum(&s));
    }
}
