//! Minimal pool for a scheduler that knows the whole trace in advance.
//!
//! Slots with identical excess vectors are interchangeable to any
//! scheduler, so the search works on groups: choose how many slots of each
//! group to serve with each allowed subset. That keeps the integer program
//! sized by the excess alphabet rather than the horizon. Feasibility at a
//! given pool size is decided by branch-and-bound over the grouped counts,
//! with the linear relaxation (minimizing total shortfall) supplying prune
//! bounds; the pool size itself is bisected, which is sound because a
//! bigger pool only enlarges every group's action set.

use super::{allowed_actions, OracleCaps, OracleError};
use crate::lp::{solve, Cmp, LpProblem, LpStatus, Sense};
use crate::scheduler::slot_capacity;
use crate::stats::ExcessTrace;
use std::collections::BTreeMap;

const SHORTFALL_TOL: f64 = 1e-6;

/// How one group's slots are served in the offline solution.
#[derive(Clone, Debug)]
pub struct GroupAssignment {
    pub excess: Vec<i64>,
    pub slots: u64,
    /// Served subset and the number of the group's slots it is used on;
    /// counts sum to `slots`.
    pub served: Vec<(Vec<usize>, u64)>,
}

#[derive(Clone, Debug)]
pub struct OfflineResult {
    pub w_c_offline: u64,
    pub assignment: Vec<GroupAssignment>,
    /// Shortfall objectives of branch-and-bound nodes pruned by bound
    /// during the search; each certifies its subtree infeasible.
    pub bound_certificates: Vec<f64>,
}

/// Minimal integer pool with which some (non-causal) schedule meets all
/// required coverage counts on this trace.
pub fn offline_optimal(
    excess: &ExcessTrace,
    required: &[u64],
    caps: &OracleCaps,
) -> Result<OfflineResult, OracleError> {
    let n = excess.slice_count();
    if required.len() != n {
        return Err(OracleError::DimensionMismatch {
            expected: n,
            got: required.len(),
        });
    }

    let mut groups: BTreeMap<Vec<i64>, u64> = BTreeMap::new();
    for row in excess.rows() {
        *groups.entry(row.to_vec()).or_insert(0) += 1;
    }
    let groups: Vec<(Vec<i64>, u64)> = groups.into_iter().collect();

    if required.iter().all(|&k| k == 0) {
        let assignment = groups
            .iter()
            .map(|(excess, slots)| GroupAssignment {
                excess: excess.clone(),
                slots: *slots,
                served: vec![(Vec::new(), *slots)],
            })
            .collect();
        return Ok(OfflineResult {
            w_c_offline: 0,
            assignment,
            bound_certificates: Vec::new(),
        });
    }

    let mut certificates = Vec::new();
    let mut memo: BTreeMap<u64, Option<Vec<GroupAssignment>>> = BTreeMap::new();
    let mut probe = |w_c: u64, certs: &mut Vec<f64>| -> Result<bool, OracleError> {
        if let Some(cached) = memo.get(&w_c) {
            return Ok(cached.is_some());
        }
        let found = feasible_assignment(&groups, required, w_c, caps, certs)?;
        let ok = found.is_some();
        memo.insert(w_c, found);
        Ok(ok)
    };

    let ub = excess.max_positive_sum();
    if !probe(ub, &mut certificates)? {
        return Err(OracleError::InfeasibleAtUpperBound { w_c: ub });
    }
    let (mut lo, mut hi) = (0u64, ub);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if probe(mid, &mut certificates)? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }

    let assignment = memo
        .remove(&lo)
        .flatten()
        .expect("bisection endpoint was probed feasible");
    verify_assignment(&groups, &assignment, required, lo)?;
    Ok(OfflineResult {
        w_c_offline: lo,
        assignment,
        bound_certificates: certificates,
    })
}

/// Decides whether the grouped counts admit an integral solution at pool
/// size `w_c`, returning one if so. Depth-first branch-and-bound on the
/// most fractional count, exploring the rounded-up side first (it pushes
/// coverage toward the targets).
fn feasible_assignment(
    groups: &[(Vec<i64>, u64)],
    required: &[u64],
    w_c: u64,
    caps: &OracleCaps,
    certificates: &mut Vec<f64>,
) -> Result<Option<Vec<GroupAssignment>>, OracleError> {
    let n = required.len();
    let actions: Vec<Vec<Vec<usize>>> = groups
        .iter()
        .map(|(excess, _)| allowed_actions(excess, w_c))
        .collect();

    let n_x: usize = actions.iter().map(|a| a.len()).sum();
    if n_x + n > caps.ilp_vars {
        return Err(OracleError::ModelTooLarge {
            vars: n_x + n,
            cap: caps.ilp_vars,
        });
    }
    let mut offsets = Vec::with_capacity(actions.len());
    let mut next = 0usize;
    for acts in &actions {
        offsets.push(next);
        next += acts.len();
    }

    // Count variables first, then one shortfall variable per slice; the
    // objective is total shortfall, so value zero means feasible.
    let n_cols = n_x + n;
    let mut objective = vec![0.0; n_cols];
    for entry in objective.iter_mut().skip(n_x) {
        *entry = 1.0;
    }
    let mut base = LpProblem::new(Sense::Minimize, objective);
    for (g, acts) in actions.iter().enumerate() {
        let mut row = vec![0.0; n_cols];
        for a in 0..acts.len() {
            row[offsets[g] + a] = 1.0;
        }
        base.add_row(row, Cmp::Eq, groups[g].1 as f64);
    }
    for i in 0..n {
        let mut row = vec![0.0; n_cols];
        for (g, acts) in actions.iter().enumerate() {
            for (a, serve) in acts.iter().enumerate() {
                if serve.contains(&i) {
                    row[offsets[g] + a] = 1.0;
                }
            }
        }
        row[n_x + i] = 1.0;
        base.add_row(row, Cmp::Ge, required[i] as f64);
    }

    let mut stack: Vec<Vec<(usize, Cmp, f64)>> = vec![Vec::new()];
    let mut nodes = 0usize;
    while let Some(bounds) = stack.pop() {
        nodes += 1;
        if nodes > caps.bb_nodes {
            return Err(OracleError::SearchBudgetExceeded { cap: caps.bb_nodes });
        }
        let mut lp = base.clone();
        for &(var, cmp, rhs) in &bounds {
            let mut row = vec![0.0; n_cols];
            row[var] = 1.0;
            lp.add_row(row, cmp, rhs);
        }
        let solution = solve(&lp)?;
        match solution.status {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                return Err(OracleError::UnexpectedLpStatus(LpStatus::Unbounded))
            }
            LpStatus::Optimal => {}
        }
        if solution.objective > SHORTFALL_TOL {
            certificates.push(solution.objective);
            continue;
        }

        // Branch on the most fractional count; accept when none is.
        let mut branch_var = None;
        let mut worst = SHORTFALL_TOL;
        for v in 0..n_x {
            let x = solution.x[v];
            let fractionality = (x - x.round()).abs();
            if fractionality > worst {
                worst = fractionality;
                branch_var = Some((v, x));
            }
        }
        match branch_var {
            None => {
                let counts: Vec<u64> = solution.x[..n_x]
                    .iter()
                    .map(|&x| x.round().max(0.0) as u64)
                    .collect();
                let assignment = groups
                    .iter()
                    .enumerate()
                    .map(|(g, (excess, slots))| GroupAssignment {
                        excess: excess.clone(),
                        slots: *slots,
                        served: actions[g]
                            .iter()
                            .enumerate()
                            .filter(|&(a, _)| counts[offsets[g] + a] > 0)
                            .map(|(a, serve)| (serve.clone(), counts[offsets[g] + a]))
                            .collect(),
                    })
                    .collect();
                return Ok(Some(assignment));
            }
            Some((v, x)) => {
                let mut down = bounds.clone();
                down.push((v, Cmp::Le, x.floor()));
                let mut up = bounds;
                up.push((v, Cmp::Ge, x.ceil()));
                stack.push(down);
                stack.push(up);
            }
        }
    }
    Ok(None)
}

/// Exact integer re-check of a returned assignment: per-group counts sum
/// to the group size, every used subset fits the slot budget, and the
/// coverage counts reach the requirements.
fn verify_assignment(
    groups: &[(Vec<i64>, u64)],
    assignment: &[GroupAssignment],
    required: &[u64],
    w_c: u64,
) -> Result<(), OracleError> {
    let mut coverage = vec![0u64; required.len()];
    if assignment.len() != groups.len() {
        return Err(OracleError::IntegralityLost);
    }
    for (group, (excess, slots)) in assignment.iter().zip(groups) {
        let mut used = 0u64;
        for (serve, count) in &group.served {
            used += count;
            let spent: u64 = serve.iter().map(|&i| excess[i].max(0) as u64).sum();
            if spent > slot_capacity(excess, w_c) || serve.iter().any(|&i| excess[i] <= 0) {
                return Err(OracleError::IntegralityLost);
            }
            for &i in serve {
                coverage[i] += count;
            }
        }
        if used != *slots {
            return Err(OracleError::IntegralityLost);
        }
    }
    if coverage.iter().zip(required).any(|(&c, &k)| c < k) {
        return Err(OracleError::IntegralityLost);
    }
    Ok(())
}
