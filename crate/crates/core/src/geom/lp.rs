//! Small dense two-phase simplex solver.
//!
//! Sized for the LPs that appear in this crate: Chebyshev/bounding-box
//! problems with a handful of variables, polytope-norm distances, and
//! fractional set-cover relaxations with a few hundred rows. Pricing uses
//! Dantzig's rule and falls back to Bland's rule permanently once a run of
//! degenerate pivots is seen. Bland's rule alone still stalls in floating
//! point on the very degenerate cover LPs, so the right-hand sides of `≤`
//! rows are also perturbed by distinct tiny offsets; the true right-hand
//! side is carried through every pivot and the solution is read from it.
//! Every choice is index-ordered, so results are bit-reproducible.

use serde::Serialize;

use crate::error::{Error, Result};

/// Feasibility / optimality tolerance of the LP layer.
pub const EPS_LP: f64 = 1e-9;

const PIVOT_TOL: f64 = 1e-9;
const DEGENERATE_RUN_BEFORE_BLAND: usize = 50;
/// Relative size of the right-hand-side perturbation of `≤` rows.
const PERTURBATION: f64 = 1e-7;
/// How far a true basic value may fall below zero before the solve is rejected.
const UNPERTURB_TOL: f64 = 1e-5;

/// Distinct small offsets for the `≤` rows, which break the ties that make
/// degenerate LPs (like set-cover duals) stall.
fn perturbation(row: usize, rhs: f64) -> f64 {
    let spread = (row as f64 * 0.618_033_988_749_894_9).fract();
    PERTURBATION * (1.0 + rhs.abs()) * (1.0 + spread)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    Minimize,
    Maximize,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub sense: Sense,
    pub rhs: f64,
}

/// `opt c·x` subject to linear constraints; variables are nonnegative unless
/// marked free.
#[derive(Clone, Debug)]
pub struct LpProblem {
    pub objective: Objective,
    pub costs: Vec<f64>,
    pub free: Vec<bool>,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal solution (meaningful only when `Optimal`).
    pub x: Vec<f64>,
    pub value: f64,
    /// One dual value per constraint, signed so that `value == Σ rhsᵢ·dualsᵢ`
    /// at optimality.
    pub duals: Vec<f64>,
    pub pivots: usize,
}

impl LpProblem {
    pub fn minimize(costs: Vec<f64>) -> Self {
        Self::new(Objective::Minimize, costs)
    }

    pub fn maximize(costs: Vec<f64>) -> Self {
        Self::new(Objective::Maximize, costs)
    }

    fn new(objective: Objective, costs: Vec<f64>) -> Self {
        let n = costs.len();
        LpProblem {
            objective,
            costs,
            free: vec![false; n],
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.costs.len()
    }

    pub fn set_free(&mut self, var: usize) -> &mut Self {
        self.free[var] = true;
        self
    }

    pub fn constrain(&mut self, coeffs: Vec<f64>, sense: Sense, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint { coeffs, sense, rhs });
        self
    }

    /// Dual objective `Σ rhsᵢ·yᵢ` for the given dual vector.
    pub fn dual_value(&self, duals: &[f64]) -> f64 {
        self.constraints
            .iter()
            .zip(duals)
            .map(|(c, y)| c.rhs * y)
            .sum()
    }

    /// Largest constraint violation of `x` (0 when feasible), including sign
    /// constraints on non-free variables.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (j, &xj) in x.iter().enumerate() {
            if !self.free[j] {
                worst = worst.max(-xj);
            }
        }
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
            let v = match c.sense {
                Sense::Le => lhs - c.rhs,
                Sense::Ge => c.rhs - lhs,
                Sense::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(v);
        }
        worst
    }

    pub fn solve(&self) -> Result<LpSolution> {
        let n = self.num_vars();
        if self.free.len() != n {
            return Err(Error::Lp("free-variable mask length mismatch".into()));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(Error::Lp(format!(
                    "constraint {i} has {} coefficients, expected {n}",
                    c.coeffs.len()
                )));
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|a| !a.is_finite()) {
                return Err(Error::Lp(format!("constraint {i} is not finite")));
            }
        }
        if self.costs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Lp("objective is not finite".into()));
        }
        Simplex::build(self).run(self)
    }
}

/// Column layout: structural columns (free variables split into +/− parts),
/// then one slack or surplus column per inequality row, then one artificial
/// column per `Ge`/`Eq` row.
struct Simplex {
    m: usize,
    cols: usize,
    width: usize,
    a: Vec<f64>,
    basis: Vec<usize>,
    /// Structural column index → (original variable, sign).
    structural: Vec<(usize, f64)>,
    first_artificial: usize,
    /// Column carrying +eᵢ for row i (slack for `Le`, artificial otherwise).
    identity_col: Vec<usize>,
    row_flip: Vec<f64>,
    costs: Vec<f64>,
    pivots: usize,
    bland: bool,
}

impl Simplex {
    fn build(p: &LpProblem) -> Self {
        let m = p.constraints.len();
        let mut structural = Vec::new();
        for j in 0..p.num_vars() {
            structural.push((j, 1.0));
            if p.free[j] {
                structural.push((j, -1.0));
            }
        }
        let ns = structural.len();

        let mut senses = Vec::with_capacity(m);
        let mut row_flip = Vec::with_capacity(m);
        for c in &p.constraints {
            if c.rhs < 0.0 {
                row_flip.push(-1.0);
                senses.push(match c.sense {
                    Sense::Le => Sense::Ge,
                    Sense::Ge => Sense::Le,
                    Sense::Eq => Sense::Eq,
                });
            } else {
                row_flip.push(1.0);
                senses.push(c.sense);
            }
        }
        let n_slack = senses.iter().filter(|s| **s != Sense::Eq).count();
        let n_art = senses.iter().filter(|s| **s != Sense::Le).count();
        let cols = ns + n_slack + n_art;
        // Columns `cols` and `cols + 1` hold the perturbed and the true
        // right-hand side.
        let width = cols + 2;
        let first_artificial = ns + n_slack;

        let mut a = vec![0.0; m * width];
        let mut basis = vec![0; m];
        let mut identity_col = vec![0; m];
        let mut next_slack = ns;
        let mut next_art = first_artificial;
        for (i, c) in p.constraints.iter().enumerate() {
            let row = &mut a[i * width..(i + 1) * width];
            for (col, &(var, sign)) in structural.iter().enumerate() {
                row[col] = row_flip[i] * sign * c.coeffs[var];
            }
            let rhs = row_flip[i] * c.rhs;
            row[cols] = rhs;
            row[cols + 1] = rhs;
            match senses[i] {
                Sense::Le => {
                    row[cols] += perturbation(i, rhs);
                    row[next_slack] = 1.0;
                    basis[i] = next_slack;
                    identity_col[i] = next_slack;
                    next_slack += 1;
                }
                Sense::Ge => {
                    row[next_slack] = -1.0;
                    next_slack += 1;
                    row[next_art] = 1.0;
                    basis[i] = next_art;
                    identity_col[i] = next_art;
                    next_art += 1;
                }
                Sense::Eq => {
                    row[next_art] = 1.0;
                    basis[i] = next_art;
                    identity_col[i] = next_art;
                    next_art += 1;
                }
            }
        }

        let sign = match p.objective {
            Objective::Minimize => 1.0,
            Objective::Maximize => -1.0,
        };
        let mut costs = vec![0.0; cols];
        for (col, &(var, s)) in structural.iter().enumerate() {
            costs[col] = sign * s * p.costs[var];
        }

        Simplex {
            m,
            cols,
            width,
            a,
            basis,
            structural,
            first_artificial,
            identity_col,
            row_flip,
            costs,
            pivots: 0,
            bland: false,
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.width + j]
    }

    fn reduced_costs(&self, costs: &[f64]) -> Vec<f64> {
        let mut d = vec![0.0; self.width];
        d[..self.cols].copy_from_slice(costs);
        for i in 0..self.m {
            let cb = costs[self.basis[i]];
            if cb != 0.0 {
                let row = &self.a[i * self.width..(i + 1) * self.width];
                for (dj, aij) in d.iter_mut().zip(row) {
                    *dj -= cb * aij;
                }
            }
        }
        d
    }

    fn pivot(&mut self, r: usize, e: usize, d: &mut [f64]) {
        let w = self.width;
        let p = self.at(r, e);
        for j in 0..w {
            self.a[r * w + j] /= p;
        }
        let (before, rest) = self.a.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        for row in before.chunks_exact_mut(w).chain(after.chunks_exact_mut(w)) {
            let f = row[e];
            if f != 0.0 {
                for (x, y) in row.iter_mut().zip(prow.iter()) {
                    *x -= f * y;
                }
                row[e] = 0.0;
            }
        }
        let f = d[e];
        if f != 0.0 {
            for (x, y) in d.iter_mut().zip(prow.iter()) {
                *x -= f * y;
            }
            d[e] = 0.0;
        }
        self.basis[r] = e;
        self.pivots += 1;
    }

    /// Runs simplex iterations on reduced-cost row `d`. Columns at or beyond
    /// `enter_limit` may not enter. Returns false if unbounded.
    fn iterate(&mut self, d: &mut [f64], enter_limit: usize) -> Result<bool> {
        let mut degenerate_run = 0;
        let max_pivots = 50_000 + 200 * (self.m + self.cols);
        loop {
            let entering = if self.bland {
                (0..enter_limit).find(|&j| d[j] < -EPS_LP)
            } else {
                let mut best: Option<(usize, f64)> = None;
                for (j, &dj) in d.iter().enumerate().take(enter_limit) {
                    if dj < -EPS_LP && best.is_none_or(|(_, b)| dj < b) {
                        best = Some((j, dj));
                    }
                }
                best.map(|(j, _)| j)
            };
            let Some(e) = entering else { return Ok(true) };

            let rhs = self.cols;
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let aie = self.at(i, e);
                if aie > PIVOT_TOL {
                    let ratio = self.at(i, rhs).max(0.0) / aie;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            let tie = (ratio - lr).abs() <= 1e-12 * (1.0 + lr.abs());
                            if ratio < lr && !tie || tie && self.basis[i] < self.basis[li] {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((r, ratio)) = leave else {
                return Ok(false);
            };
            if ratio <= 1e-12 {
                degenerate_run += 1;
                if degenerate_run >= DEGENERATE_RUN_BEFORE_BLAND {
                    self.bland = true;
                }
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, e, d);
            if self.pivots > max_pivots {
                return Err(Error::Lp(format!("pivot limit {max_pivots} exceeded")));
            }
        }
    }

    fn run(mut self, p: &LpProblem) -> Result<LpSolution> {
        let m = self.m;
        let nvars = p.num_vars();
        let fail = |status, pivots| LpSolution {
            status,
            x: vec![0.0; nvars],
            value: f64::NAN,
            duals: vec![0.0; m],
            pivots,
        };

        // Phase 1.
        if self.first_artificial < self.cols {
            let mut c1 = vec![0.0; self.cols];
            for c in c1.iter_mut().skip(self.first_artificial) {
                *c = 1.0;
            }
            let mut d = self.reduced_costs(&c1);
            let cols = self.cols;
            self.iterate(&mut d, cols)?;
            let infeasibility = -d[self.cols + 1];
            let bscale = p.constraints.iter().fold(1.0f64, |s, c| s.max(c.rhs.abs()));
            if infeasibility > EPS_LP * bscale {
                return Ok(fail(LpStatus::Infeasible, self.pivots));
            }
            for i in 0..m {
                if self.basis[i] >= self.first_artificial {
                    let j = (0..self.first_artificial).find(|&j| self.at(i, j).abs() > PIVOT_TOL);
                    if let Some(j) = j {
                        let mut dummy = vec![0.0; self.width];
                        self.pivot(i, j, &mut dummy);
                    }
                }
            }
        }

        // Phase 2.
        let costs = self.costs.clone();
        let mut d = self.reduced_costs(&costs);
        let limit = self.first_artificial;
        if !self.iterate(&mut d, limit)? {
            return Ok(fail(LpStatus::Unbounded, self.pivots));
        }

        // The final basis is optimal for the perturbed data; it stays optimal
        // for the true data as long as it remains primal feasible there.
        let bscale = p.constraints.iter().fold(1.0f64, |s, c| s.max(c.rhs.abs()));
        let mut col_val = vec![0.0; self.cols];
        for i in 0..m {
            let v = self.at(i, self.cols + 1);
            if v < -UNPERTURB_TOL * bscale {
                return Err(Error::Lp(format!(
                    "basis loses feasibility without perturbation (basic value {v:.3e})"
                )));
            }
            col_val[self.basis[i]] = v.max(0.0);
        }
        let mut x = vec![0.0; nvars];
        for (col, &(var, sign)) in self.structural.iter().enumerate() {
            x[var] += sign * col_val[col];
        }
        let value: f64 = p.costs.iter().zip(&x).map(|(c, x)| c * x).sum();
        let obj_sign = match p.objective {
            Objective::Minimize => 1.0,
            Objective::Maximize => -1.0,
        };
        let duals = (0..m)
            .map(|i| obj_sign * self.row_flip[i] * -d[self.identity_col[i]])
            .collect();
        Ok(LpSolution {
            status: LpStatus::Optimal,
            x,
            value,
            duals,
            pivots: self.pivots,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn textbook_max() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), value 36.
        let mut lp = LpProblem::maximize(vec![3.0, 5.0]);
        lp.constrain(vec![1.0, 0.0], Sense::Le, 4.0)
            .constrain(vec![0.0, 2.0], Sense::Le, 12.0)
            .constrain(vec![3.0, 2.0], Sense::Le, 18.0);
        let s = lp.solve().unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value - 36.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
        assert!((lp.dual_value(&s.duals) - 36.0).abs() < 1e-9);
        assert!(s.duals.iter().all(|&y| y >= -1e-12));
    }

    #[test]
    fn ge_and_eq_rows_with_duals() {
        // min x + 2y, x + y ≥ 2, x − y = 1 → x = 1.5, y = 0.5, value 2.5.
        let mut lp = LpProblem::minimize(vec![1.0, 2.0]);
        lp.constrain(vec![1.0, 1.0], Sense::Ge, 2.0)
            .constrain(vec![1.0, -1.0], Sense::Eq, 1.0);
        let s = lp.solve().unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value - 2.5).abs() < 1e-9);
        assert!((lp.dual_value(&s.duals) - 2.5).abs() < 1e-9);
    }

    #[test]
    fn free_variables_and_negative_rhs() {
        // min x s.t. x ≥ −3 (x free) → −3.
        let mut lp = LpProblem::minimize(vec![1.0]);
        lp.set_free(0);
        lp.constrain(vec![1.0], Sense::Ge, -3.0);
        let s = lp.solve().unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] + 3.0).abs() < 1e-12);
        assert!((lp.dual_value(&s.duals) + 3.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LpProblem::minimize(vec![1.0]);
        lp.constrain(vec![1.0], Sense::Le, 1.0)
            .constrain(vec![1.0], Sense::Ge, 2.0);
        assert_eq!(lp.solve().unwrap().status, LpStatus::Infeasible);

        let mut lp = LpProblem::maximize(vec![1.0, 1.0]);
        lp.constrain(vec![1.0, -1.0], Sense::Le, 1.0);
        assert_eq!(lp.solve().unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn malformed_rejected() {
        let mut lp = LpProblem::minimize(vec![1.0, 1.0]);
        lp.constrain(vec![1.0], Sense::Le, 1.0);
        assert!(lp.solve().is_err());
    }

    #[test]
    fn degenerate_klee_minty_like_terminates() {
        // Highly degenerate: many constraints tight at the origin.
        let n = 6;
        let mut lp = LpProblem::maximize(vec![1.0; n]);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let mut c = vec![0.0; n];
                    c[i] = 1.0;
                    c[j] = -1.0;
                    lp.constrain(c, Sense::Le, 0.0);
                }
            }
        }
        lp.constrain(vec![1.0; n], Sense::Le, 6.0);
        let s = lp.solve().unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value - 6.0).abs() < 1e-9);
    }

    /// Brute-force oracle: enumerate every basic solution of a 2-variable LP
    /// with box bounds and keep the best feasible one.
    fn brute_force_2d(cost: [f64; 2], rows: &[([f64; 2], f64)]) -> f64 {
        let mut all: Vec<([f64; 2], f64)> = rows.to_vec();
        all.push(([-1.0, 0.0], 0.0));
        all.push(([0.0, -1.0], 0.0));
        let mut best = f64::INFINITY;
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                let (a, b) = (all[i], all[j]);
                let det = a.0[0] * b.0[1] - a.0[1] * b.0[0];
                if det.abs() < 1e-12 {
                    continue;
                }
                let x = (a.1 * b.0[1] - a.0[1] * b.1) / det;
                let y = (a.0[0] * b.1 - a.1 * b.0[0]) / det;
                if all.iter().all(|(n, r)| n[0] * x + n[1] * y <= r + 1e-9) {
                    best = best.min(cost[0] * x + cost[1] * y);
                }
            }
        }
        best
    }

    proptest! {
        #[test]
        fn matches_vertex_enumeration(
            c0 in -5.0f64..5.0, c1 in -5.0f64..5.0,
            rows in proptest::collection::vec(((0.1f64..3.0, 0.1f64..3.0), 1.0f64..10.0), 1..6),
        ) {
            // Positive coefficients with positive rhs keep the region bounded.
            let rows: Vec<([f64; 2], f64)> = rows.into_iter().map(|((a, b), r)| ([a, b], r)).collect();
            let mut lp = LpProblem::minimize(vec![c0, c1]);
            for (n, r) in &rows {
                lp.constrain(n.to_vec(), Sense::Le, *r);
            }
            let s = lp.solve().unwrap();
            prop_assert_eq!(s.status, LpStatus::Optimal);
            let oracle = brute_force_2d([c0, c1], &rows);
            prop_assert!((s.value - oracle).abs() < 1e-7, "{} vs {}", s.value, oracle);
            prop_assert!(lp.max_violation(&s.x) < 1e-9);
            prop_assert!((lp.dual_value(&s.duals) - s.value).abs() < 1e-7);
        }
    }
}
