//! Dense two-phase primal simplex.
//!
//! The oracle problems this crate solves are small (a few thousand nonzeros
//! at most) but must be reproducible: identical problems have to yield
//! identical solutions bit for bit, across platforms and runs. A dense
//! tableau with Bland's pivoting rule gives that determinism cheaply, at the
//! price of speed we do not need.
//!
//! Pivoting: the entering column is the lowest-index variable with reduced
//! cost below `-1e-9`; the leaving row is the ratio-test minimum, ties broken
//! by the lowest basic-variable index. Bland's rule makes cycling impossible
//! in exact arithmetic; an iteration cap turns any float-noise cycling into
//! an explicit error instead of a hang.

use thiserror::Error;

/// Optimization direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Row comparison operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Eq,
    Ge,
}

/// Domain of one variable. The default for every variable is `NonNegative`;
/// free variables are split into a difference of two nonnegative columns
/// internally.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum VarBound {
    #[default]
    NonNegative,
    Free,
}

/// One linear constraint `coeffs . x  (<=|=|>=)  rhs`.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub cmp: Cmp,
    pub rhs: f64,
}

/// A linear program in natural form.
#[derive(Clone, Debug)]
pub struct LpProblem {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<VarBound>,
}

impl LpProblem {
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        let n = objective.len();
        LpProblem {
            sense,
            objective,
            constraints: Vec::new(),
            bounds: vec![VarBound::NonNegative; n],
        }
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, cmp: Cmp, rhs: f64) {
        self.constraints.push(Constraint { coeffs, cmp, rhs });
    }

    pub fn set_free(&mut self, var: usize) {
        self.bounds[var] = VarBound::Free;
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }
}

/// Outcome classification of a solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Solver result. `objective` and `x` are meaningful only when `status` is
/// [`LpStatus::Optimal`]; otherwise `objective` is NaN and `x` is empty.
#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    pub x: Vec<f64>,
}

#[derive(Debug, Error)]
pub enum LpError {
    #[error("constraint {row} has {got} coefficients, expected {expected}")]
    DimensionMismatch {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("objective, constraint, or bound contains a non-finite value")]
    NonFiniteInput,
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
}

/// Relative feasibility tolerance used to verify the returned point: each
/// row may be violated by at most `FEASIBILITY_TOL * (1 + row norm)`.
pub const FEASIBILITY_TOL: f64 = 1e-8;

/// Tableau entries at or below this magnitude are never used as pivots.
pub const PIVOT_FLOOR: f64 = 1e-11;

const REDUCED_COST_TOL: f64 = 1e-9;

/// Solves the program with the two-phase primal simplex method.
///
/// Infeasible and unbounded programs are reported through
/// [`LpSolution::status`], not as errors; errors are reserved for malformed
/// input and numerical failure.
pub fn solve(problem: &LpProblem) -> Result<LpSolution, LpError> {
    let n = problem.num_vars();
    if problem.bounds.len() != n {
        return Err(LpError::DimensionMismatch {
            row: usize::MAX,
            got: problem.bounds.len(),
            expected: n,
        });
    }
    for (i, c) in problem.constraints.iter().enumerate() {
        if c.coeffs.len() != n {
            return Err(LpError::DimensionMismatch {
                row: i,
                got: c.coeffs.len(),
                expected: n,
            });
        }
        if !c.rhs.is_finite() || c.coeffs.iter().any(|v| !v.is_finite()) {
            return Err(LpError::NonFiniteInput);
        }
    }
    if problem.objective.iter().any(|v| !v.is_finite()) {
        return Err(LpError::NonFiniteInput);
    }

    let mut tableau = Tableau::build(problem);
    match tableau.run()? {
        LpStatus::Optimal => {
            let x = tableau.extract(problem);
            verify(problem, &x)?;
            let objective = problem
                .objective
                .iter()
                .zip(&x)
                .map(|(c, v)| c * v)
                .sum::<f64>();
            Ok(LpSolution {
                status: LpStatus::Optimal,
                objective,
                x,
            })
        }
        status => Ok(LpSolution {
            status,
            objective: f64::NAN,
            x: Vec::new(),
        }),
    }
}

/// Column bookkeeping: which solver column maps to which original variable
/// (positive or negative part), slack, or artificial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Col {
    Plus(usize),
    Minus(usize),
    Slack,
    Artificial,
}

struct Tableau {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    basis: Vec<usize>,
    cols: Vec<Col>,
    /// Phase-2 cost of each column (original objective mapped through the
    /// variable split, zero for slack and artificial columns).
    cost: Vec<f64>,
    max_pivots: usize,
}

impl Tableau {
    fn build(problem: &LpProblem) -> Tableau {
        let sign = match problem.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };

        let mut cols = Vec::new();
        let mut cost = Vec::new();
        // var_cols[v] = (plus column, optional minus column)
        let mut var_cols = Vec::with_capacity(problem.num_vars());
        for (v, bound) in problem.bounds.iter().enumerate() {
            let plus = cols.len();
            cols.push(Col::Plus(v));
            cost.push(sign * problem.objective[v]);
            let minus = match bound {
                VarBound::NonNegative => None,
                VarBound::Free => {
                    cols.push(Col::Minus(v));
                    cost.push(-sign * problem.objective[v]);
                    Some(plus + 1)
                }
            };
            var_cols.push((plus, minus));
        }

        let m = problem.constraints.len();
        let mut a: Vec<Vec<f64>> = Vec::with_capacity(m);
        let mut b = Vec::with_capacity(m);
        let mut basis = vec![usize::MAX; m];

        // Structural part, with rows normalized to rhs >= 0.
        let mut row_cmp = Vec::with_capacity(m);
        for c in &problem.constraints {
            let flip = c.rhs < 0.0;
            let s = if flip { -1.0 } else { 1.0 };
            let cmp = match (c.cmp, flip) {
                (Cmp::Le, true) => Cmp::Ge,
                (Cmp::Ge, true) => Cmp::Le,
                (other, _) => other,
            };
            let mut row = vec![0.0; cols.len()];
            for (v, &coef) in c.coeffs.iter().enumerate() {
                let (plus, minus) = var_cols[v];
                row[plus] = s * coef;
                if let Some(mc) = minus {
                    row[mc] = -s * coef;
                }
            }
            a.push(row);
            b.push(s * c.rhs);
            row_cmp.push(cmp);
        }

        // Slack and surplus columns.
        for (i, cmp) in row_cmp.iter().enumerate() {
            match cmp {
                Cmp::Le => {
                    let col = push_unit_col(&mut a, &mut cols, &mut cost, i, 1.0, Col::Slack);
                    basis[i] = col;
                }
                Cmp::Ge => {
                    push_unit_col(&mut a, &mut cols, &mut cost, i, -1.0, Col::Slack);
                }
                Cmp::Eq => {}
            }
        }
        // Artificial columns for rows without a slack basis.
        for (i, slot) in basis.iter_mut().enumerate() {
            if *slot == usize::MAX {
                *slot = push_unit_col(&mut a, &mut cols, &mut cost, i, 1.0, Col::Artificial);
            }
        }

        let max_pivots = 10_000 + 50 * (m + cols.len());
        Tableau {
            a,
            b,
            basis,
            cols,
            cost,
            max_pivots,
        }
    }

    fn run(&mut self) -> Result<LpStatus, LpError> {
        // Phase 1: minimize the sum of artificials.
        let phase1_cost: Vec<f64> = self
            .cols
            .iter()
            .map(|c| if *c == Col::Artificial { 1.0 } else { 0.0 })
            .collect();
        let feasible_scale = 1.0 + self.b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if self.cols.contains(&Col::Artificial) {
            let obj = self.iterate(&phase1_cost)?;
            if obj == f64::NEG_INFINITY {
                return Err(LpError::NumericalBreakdown(
                    "phase-1 objective unbounded below".into(),
                ));
            }
            if obj > FEASIBILITY_TOL * feasible_scale {
                return Ok(LpStatus::Infeasible);
            }
            self.drive_out_artificials();
        }

        // Phase 2 on the original costs (artificial columns are frozen by
        // drive_out_artificials and never re-enter).
        let cost = self.cost.clone();
        let obj = self.iterate(&cost)?;
        if obj == f64::NEG_INFINITY {
            return Ok(LpStatus::Unbounded);
        }
        Ok(LpStatus::Optimal)
    }

    /// Runs simplex iterations for the given cost vector. Returns the final
    /// objective value, or negative infinity when the program is unbounded
    /// below in that cost.
    fn iterate(&mut self, cost: &[f64]) -> Result<f64, LpError> {
        let m = self.a.len();
        let ncols = self.cols.len();

        // Reduced costs rc_j = c_j - c_B . column_j for the current basis.
        let mut rc: Vec<f64> = (0..ncols)
            .map(|j| {
                let mut v = cost[j];
                for i in 0..m {
                    v -= cost[self.basis[i]] * self.a[i][j];
                }
                v
            })
            .collect();

        for _ in 0..self.max_pivots {
            // Bland: lowest-index improving column. Frozen (artificial)
            // columns are marked by a poisoned reduced cost.
            let entering = (0..ncols)
                .find(|&j| rc[j] < -REDUCED_COST_TOL && self.cols[j] != Col::Artificial);
            let Some(e) = entering else {
                let obj = (0..m).map(|i| cost[self.basis[i]] * self.b[i]).sum();
                return Ok(obj);
            };

            // Ratio test; ties by lowest basic-variable index (Bland).
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let coef = self.a[i][e];
                if coef <= PIVOT_FLOOR {
                    continue;
                }
                let ratio = self.b[i] / coef;
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((best_i, best_r)) => {
                        if ratio < best_r - 1e-12
                            || ((ratio - best_r).abs() <= 1e-12
                                && self.basis[i] < self.basis[best_i])
                        {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
            let Some((r, _)) = leave else {
                return Ok(f64::NEG_INFINITY);
            };

            self.pivot(r, e, &mut rc)?;
        }
        Err(LpError::NumericalBreakdown(format!(
            "no convergence within {} pivots",
            self.max_pivots
        )))
    }

    fn pivot(&mut self, r: usize, e: usize, rc: &mut [f64]) -> Result<(), LpError> {
        let piv = self.a[r][e];
        if piv.abs() <= PIVOT_FLOOR {
            return Err(LpError::NumericalBreakdown(format!(
                "pivot magnitude {piv:e} below floor"
            )));
        }
        let inv = 1.0 / piv;
        for v in self.a[r].iter_mut() {
            *v *= inv;
        }
        self.b[r] *= inv;
        self.a[r][e] = 1.0;

        let m = self.a.len();
        for i in 0..m {
            if i == r {
                continue;
            }
            let factor = self.a[i][e];
            if factor == 0.0 {
                continue;
            }
            let (pivot_row, row) = if i < r {
                let (lo, hi) = self.a.split_at_mut(r);
                (&hi[0], &mut lo[i])
            } else {
                let (lo, hi) = self.a.split_at_mut(i);
                (&lo[r], &mut hi[0])
            };
            for (v, p) in row.iter_mut().zip(pivot_row) {
                *v -= factor * p;
            }
            row[e] = 0.0;
            self.b[i] -= factor * self.b[r];
        }

        let rc_factor = rc[e];
        if rc_factor != 0.0 {
            for (v, p) in rc.iter_mut().zip(&self.a[r]) {
                *v -= rc_factor * p;
            }
            rc[e] = 0.0;
        }
        self.basis[r] = e;
        Ok(())
    }

    /// After phase 1, pivots any artificial still in the basis (at zero
    /// level) onto a structural column, so phase 2 never touches
    /// artificials. A row whose structural part vanished is redundant and is
    /// left parked on its artificial; the zero row cannot pivot again.
    fn drive_out_artificials(&mut self) {
        let m = self.a.len();
        for r in 0..m {
            if self.cols[self.basis[r]] != Col::Artificial {
                continue;
            }
            let target = (0..self.cols.len()).find(|&j| {
                self.cols[j] != Col::Artificial && self.a[r][j].abs() > PIVOT_FLOOR
            });
            if let Some(e) = target {
                let mut dummy = vec![0.0; self.cols.len()];
                // Pivot on a zero-level row only reshuffles the basis.
                let _ = self.pivot(r, e, &mut dummy);
            }
        }
    }

    fn extract(&self, problem: &LpProblem) -> Vec<f64> {
        let mut plus = vec![0.0; problem.num_vars()];
        let mut minus = vec![0.0; problem.num_vars()];
        for (i, &bcol) in self.basis.iter().enumerate() {
            match self.cols[bcol] {
                Col::Plus(v) => plus[v] += self.b[i],
                Col::Minus(v) => minus[v] += self.b[i],
                _ => {}
            }
        }
        plus.iter().zip(&minus).map(|(p, m)| p - m).collect()
    }
}

fn push_unit_col(
    a: &mut [Vec<f64>],
    cols: &mut Vec<Col>,
    cost: &mut Vec<f64>,
    row: usize,
    value: f64,
    kind: Col,
) -> usize {
    let idx = cols.len();
    cols.push(kind);
    cost.push(0.0);
    for (i, r) in a.iter_mut().enumerate() {
        r.push(if i == row { value } else { 0.0 });
    }
    idx
}

/// Confirms the candidate point satisfies every row within the scaled
/// feasibility tolerance and every nonnegativity bound. A violation here
/// means the tableau degraded numerically.
fn verify(problem: &LpProblem, x: &[f64]) -> Result<(), LpError> {
    for (i, c) in problem.constraints.iter().enumerate() {
        let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
        let norm: f64 = c.coeffs.iter().map(|a| a.abs()).sum::<f64>() + c.rhs.abs();
        let tol = FEASIBILITY_TOL * (1.0 + norm);
        let violated = match c.cmp {
            Cmp::Le => lhs > c.rhs + tol,
            Cmp::Ge => lhs < c.rhs - tol,
            Cmp::Eq => (lhs - c.rhs).abs() > tol,
        };
        if violated {
            return Err(LpError::NumericalBreakdown(format!(
                "row {i} violated by {:e} after solve",
                (lhs - c.rhs).abs()
            )));
        }
    }
    for (v, (&bound, &val)) in problem.bounds.iter().zip(x).enumerate() {
        if bound == VarBound::NonNegative && val < -FEASIBILITY_TOL {
            return Err(LpError::NumericalBreakdown(format!(
                "variable {v} negative ({val:e}) after solve"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::solve_dense;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn feasible_2x2() -> LpProblem {
        let mut p = LpProblem::new(Sense::Maximize, vec![1.0, 1.0]);
        p.add_row(vec![1.0, 0.0], Cmp::Le, 1.0);
        p.add_row(vec![0.0, 1.0], Cmp::Le, 1.0);
        p
    }

    #[test]
    fn box_corner_optimum() {
        let sol = solve(&feasible_2x2()).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 2.0).abs() < 1e-9);
        assert!((sol.x[0] - 1.0).abs() < 1e-9);
        assert!((sol.x[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        let mut p = LpProblem::new(Sense::Minimize, vec![0.0]);
        p.add_row(vec![1.0], Cmp::Ge, 1.0);
        p.add_row(vec![1.0], Cmp::Le, 0.0);
        let sol = solve(&p).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
    }

    #[test]
    fn open_direction_is_unbounded() {
        let mut p = LpProblem::new(Sense::Maximize, vec![1.0, 0.0]);
        p.add_row(vec![0.0, 1.0], Cmp::Le, 5.0);
        let sol = solve(&p).unwrap();
        assert_eq!(sol.status, LpStatus::Unbounded);
    }

    #[test]
    fn free_variable_can_settle_negative() {
        // Shape of the stationary-slack problems: maximize a free scalar
        // pushed below zero by every constraint.
        let mut p = LpProblem::new(Sense::Maximize, vec![1.0]);
        p.set_free(0);
        p.add_row(vec![1.0], Cmp::Le, -0.25);
        let sol = solve(&p).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - (-0.25)).abs() < 1e-9);
        assert!((sol.x[0] - (-0.25)).abs() < 1e-9);
    }

    #[test]
    fn equality_rows_hold_exactly() {
        let mut p = LpProblem::new(Sense::Minimize, vec![1.0, 2.0, 0.0]);
        p.add_row(vec![1.0, 1.0, 1.0], Cmp::Eq, 10.0);
        p.add_row(vec![1.0, -1.0, 0.0], Cmp::Eq, 2.0);
        let sol = solve(&p).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        let s: f64 = sol.x.iter().sum();
        assert!((s - 10.0).abs() < 1e-8);
        assert!((sol.x[0] - sol.x[1] - 2.0).abs() < 1e-8);
        // Cheapest: route everything through the costless third variable.
        assert!((sol.x[0] - 2.0).abs() < 1e-8);
        assert!(sol.x[1].abs() < 1e-8);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let mut p = LpProblem::new(Sense::Minimize, vec![1.0, 1.0]);
        p.add_row(vec![1.0], Cmp::Le, 1.0);
        assert!(matches!(
            solve(&p),
            Err(LpError::DimensionMismatch { row: 0, .. })
        ));
    }

    #[test]
    fn identical_problems_solve_identically() {
        let p = random_bounded_lp(7, 9, 0xBEEF);
        let a = solve(&p).unwrap();
        let b = solve(&p).unwrap();
        assert_eq!(a.status, b.status);
        assert_eq!(a.objective.to_bits(), b.objective.to_bits());
        let bits =
            |xs: &[f64]| xs.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a.x), bits(&b.x));
    }

    /// Builds a random bounded LP with a known feasible point: rows
    /// `a . x <= a . x0 + margin` around a random nonnegative `x0`, plus a
    /// simplex-style cap that keeps the feasible set bounded.
    fn random_bounded_lp(nvars: usize, nrows: usize, seed: u64) -> LpProblem {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x0: Vec<f64> = (0..nvars).map(|_| rng.random_range(0.0..3.0)).collect();
        let mut p = LpProblem::new(
            Sense::Maximize,
            (0..nvars).map(|_| rng.random_range(-1.0..2.0)).collect(),
        );
        for _ in 0..nrows {
            let coeffs: Vec<f64> =
                (0..nvars).map(|_| rng.random_range(-1.0..1.0)).collect();
            let rhs: f64 = coeffs.iter().zip(&x0).map(|(a, v)| a * v).sum::<f64>()
                + rng.random_range(0.1..2.0);
            p.add_row(coeffs, Cmp::Le, rhs);
        }
        let cap = x0.iter().sum::<f64>() + rng.random_range(5.0..20.0);
        p.add_row(vec![1.0; nvars], Cmp::Le, cap);
        p
    }

    /// Brute-force baseline: enumerate every choice of `n` active
    /// constraints (rows at equality or variables at zero), solve the
    /// resulting square system, keep feasible vertices, and return the best
    /// objective. Only valid for bounded programs over nonnegative
    /// variables, which is what `random_bounded_lp` produces.
    fn best_vertex_objective(p: &LpProblem) -> Option<f64> {
        let n = p.num_vars();
        let m = p.constraints.len();
        let total = m + n;
        let mut best: Option<f64> = None;
        let mut chosen = vec![0usize; n];

        fn rec(
            p: &LpProblem,
            start: usize,
            depth: usize,
            total: usize,
            chosen: &mut Vec<usize>,
            best: &mut Option<f64>,
        ) {
            let n = p.num_vars();
            if depth == n {
                let m = p.constraints.len();
                let mut a = Vec::with_capacity(n);
                let mut b = Vec::with_capacity(n);
                for &c in chosen.iter() {
                    if c < m {
                        a.push(p.constraints[c].coeffs.clone());
                        b.push(p.constraints[c].rhs);
                    } else {
                        let mut row = vec![0.0; n];
                        row[c - m] = 1.0;
                        a.push(row);
                        b.push(0.0);
                    }
                }
                let Some(x) = solve_dense(a, b) else { return };
                let feasible = x.iter().all(|v| *v >= -1e-7)
                    && p.constraints.iter().all(|c| {
                        let lhs: f64 =
                            c.coeffs.iter().zip(&x).map(|(a, v)| a * v).sum();
                        match c.cmp {
                            Cmp::Le => lhs <= c.rhs + 1e-7,
                            Cmp::Ge => lhs >= c.rhs - 1e-7,
                            Cmp::Eq => (lhs - c.rhs).abs() <= 1e-7,
                        }
                    });
                if feasible {
                    let obj: f64 =
                        p.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
                    *best = Some(match best {
                        None => obj,
                        Some(b) => b.max(obj),
                    });
                }
                return;
            }
            for c in start..total {
                chosen[depth] = c;
                rec(p, c + 1, depth + 1, total, chosen, best);
            }
        }

        rec(p, 0, 0, total, &mut chosen, &mut best);
        best
    }

    #[test]
    fn matches_vertex_enumeration_on_random_programs() {
        for seed in 0..12u64 {
            let (nvars, nrows) = if seed < 2 { (10, 10) } else { (6, 7) };
            let p = random_bounded_lp(nvars, nrows, 1000 + seed);
            let sol = solve(&p).unwrap();
            assert_eq!(sol.status, LpStatus::Optimal, "seed {seed}");
            let oracle = best_vertex_objective(&p).expect("oracle found no vertex");
            assert!(
                (sol.objective - oracle).abs() <= 1e-7 * (1.0 + oracle.abs()),
                "seed {seed}: simplex {} vs enumeration {}",
                sol.objective,
                oracle
            );
        }
    }

    #[test]
    fn degenerate_ties_terminate() {
        // Many redundant rows through the same vertex force degenerate
        // pivots; Bland's rule must still terminate.
        let mut p = LpProblem::new(Sense::Maximize, vec![1.0, 1.0]);
        for _ in 0..6 {
            p.add_row(vec![1.0, 1.0], Cmp::Le, 1.0);
        }
        p.add_row(vec![1.0, -1.0], Cmp::Le, 0.0);
        p.add_row(vec![-1.0, 1.0], Cmp::Le, 0.0);
        let sol = solve(&p).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 1.0).abs() < 1e-8);
    }
}
