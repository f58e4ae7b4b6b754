//! Ground-truth baselines for the scheduler.
//!
//! Three independent vantage points bound what any causal scheduler can do:
//!
//! * [`static_epsilon`] solves, exactly, the best randomized policy that
//!   looks only at the current excess vector. Its slack `epsilon_star` is
//!   the margin by which per-slot targets are met in expectation; a
//!   negative value proves the targets unreachable at that pool size by
//!   any policy of that class.
//! * [`offline_optimal`] finds the minimal pool a non-causal scheduler
//!   needs on a concrete trace, by integer programming over slots grouped
//!   by their excess vector.
//! * [`drift_check`] enumerates the exact one-step expected drift of the
//!   quadratic potential `L(d) = sum(d_i^2) / 2` under the real Max-Weight
//!   decisions and compares it with the closed-form bound
//!   `B - epsilon_star * sum(d_i)`.
//!
//! Everything here works on the exact stationary law of the demand model,
//! so oracle values carry no sampling noise.

mod offline;

pub use offline::{offline_optimal, GroupAssignment, OfflineResult};

use crate::demand::markov::MarkovDemandModel;
use crate::demand::{DemandError, TraceParams};
use crate::lp::{solve, Cmp, LpError, LpProblem, LpStatus, Sense};
use crate::scheduler::{deficit_update, slot_capacity, solve_knapsack};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("joint excess space needs up to {columns} policy columns, above the cap of {cap}")]
    StateSpaceTooLarge { columns: usize, cap: usize },
    #[error("grouped integer program has {vars} variables, above the cap of {cap}")]
    ModelTooLarge { vars: usize, cap: usize },
    #[error("branch-and-bound exceeded its budget of {cap} nodes")]
    SearchBudgetExceeded { cap: usize },
    #[error("coverage counts unreachable even with the largest useful pool w_c={w_c}")]
    InfeasibleAtUpperBound { w_c: u64 },
    #[error("expected {expected} entries, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("trace visited excess state {0:?} that the policy does not cover")]
    PolicyStateMissing(Vec<i64>),
    #[error("linear program ended {0:?} where an optimum must exist")]
    UnexpectedLpStatus(LpStatus),
    #[error("integer search produced a non-integral accepted point")]
    IntegralityLost,
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Demand(#[from] DemandError),
}

/// Size limits for the oracle computations. All three searches are exact,
/// so the caps bound work, not accuracy.
#[derive(Clone, Copy, Debug)]
pub struct OracleCaps {
    /// Upper bound on `|joint states| * 2^N`, the worst-case number of
    /// policy columns in the stationary program.
    pub lp_columns: usize,
    /// Upper bound on variables in the grouped integer program.
    pub ilp_vars: usize,
    /// Upper bound on branch-and-bound nodes per feasibility probe.
    pub bb_nodes: usize,
}

impl Default for OracleCaps {
    fn default() -> Self {
        OracleCaps {
            lp_columns: 4096,
            ilp_vars: 20_000,
            bb_nodes: 20_000,
        }
    }
}

/// Stationary law of the per-slice excess processes, in product form.
/// Slices are independent chains, so a joint state's probability is the
/// product of its per-slice masses.
#[derive(Clone, Debug)]
pub struct ExcessModel {
    /// Per slice: distinct excess values (ascending) with stationary mass.
    slices: Vec<Vec<(i64, f64)>>,
    floors: Vec<u32>,
}

impl ExcessModel {
    pub fn new(model: &MarkovDemandModel, floors: &[u32]) -> Result<Self, OracleError> {
        if floors.len() != model.slice_count() {
            return Err(OracleError::DimensionMismatch {
                expected: model.slice_count(),
                got: floors.len(),
            });
        }
        let slices = model
            .chains()
            .iter()
            .zip(floors)
            .map(|(chain, &floor)| {
                let mut masses: Vec<(i64, f64)> = Vec::new();
                for (&state, &pi) in chain.states().iter().zip(chain.stationary()) {
                    let excess = state as i64 - floor as i64;
                    match masses.iter_mut().find(|(v, _)| *v == excess) {
                        Some((_, p)) => *p += pi,
                        None => masses.push((excess, pi)),
                    }
                }
                masses.sort_by_key(|(v, _)| *v);
                masses
            })
            .collect();
        Ok(ExcessModel {
            slices,
            floors: floors.to_vec(),
        })
    }

    /// Builds a model directly from per-slice excess distributions; useful
    /// when the law is known without a chain. Masses must sum to one.
    pub fn from_distributions(
        slices: Vec<Vec<(i64, f64)>>,
        floors: Vec<u32>,
    ) -> Result<Self, OracleError> {
        if slices.is_empty() || slices.len() != floors.len() {
            return Err(OracleError::DimensionMismatch {
                expected: slices.len().max(1),
                got: floors.len(),
            });
        }
        for dist in &slices {
            let total: f64 = dist.iter().map(|(_, p)| p).sum();
            assert!(
                (total - 1.0).abs() < 1e-9 && dist.iter().all(|(_, p)| *p >= 0.0),
                "each slice's masses must form a distribution"
            );
        }
        let slices = slices
            .into_iter()
            .map(|mut dist| {
                dist.sort_by_key(|(v, _)| *v);
                dist
            })
            .collect();
        Ok(ExcessModel { slices, floors })
    }

    pub fn slice_count(&self) -> usize {
        self.slices.len()
    }

    pub fn floors(&self) -> &[u32] {
        &self.floors
    }

    pub fn state_count(&self) -> usize {
        self.slices.iter().map(|s| s.len()).product()
    }

    /// Largest possible per-slot sum of positive excess; pools beyond this
    /// change nothing.
    pub fn max_positive_sum(&self) -> u64 {
        self.slices
            .iter()
            .map(|s| s.iter().map(|&(v, _)| v.max(0) as u64).max().unwrap_or(0))
            .sum()
    }

    /// Joint states in deterministic order (last slice varying fastest)
    /// with their product-form probabilities.
    pub fn joint_states(&self) -> Vec<(Vec<i64>, f64)> {
        let n = self.slices.len();
        let mut out = Vec::with_capacity(self.state_count());
        let mut index = vec![0usize; n];
        loop {
            let mut excess = Vec::with_capacity(n);
            let mut prob = 1.0;
            for (i, &k) in index.iter().enumerate() {
                let (v, p) = self.slices[i][k];
                excess.push(v);
                prob *= p;
            }
            out.push((excess, prob));
            let mut pos = n;
            loop {
                if pos == 0 {
                    return out;
                }
                pos -= 1;
                index[pos] += 1;
                if index[pos] < self.slices[pos].len() {
                    break;
                }
                index[pos] = 0;
            }
        }
    }
}

/// All subsets of the positive-excess slices that fit within the slot's
/// budget, enumerated by backtracking in index order with capacity pruning
/// (so tight budgets never pay for the full power set). The empty action is
/// always first.
pub(crate) fn allowed_actions(excess: &[i64], w_c: u64) -> Vec<Vec<usize>> {
    let capacity = slot_capacity(excess, w_c);
    let positive: Vec<(usize, u64)> = excess
        .iter()
        .enumerate()
        .filter(|&(_, &e)| e > 0)
        .map(|(i, &e)| (i, e as u64))
        .collect();
    let mut actions = Vec::new();
    let mut prefix = Vec::new();
    backtrack(&positive, 0, capacity, &mut prefix, &mut actions);
    actions
}

fn backtrack(
    items: &[(usize, u64)],
    k: usize,
    budget: u64,
    prefix: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if k == items.len() {
        out.push(prefix.clone());
        return;
    }
    backtrack(items, k + 1, budget, prefix, out);
    let (index, weight) = items[k];
    if weight <= budget {
        prefix.push(index);
        backtrack(items, k + 1, budget - weight, prefix, out);
        prefix.pop();
    }
}

/// One action of the stationary policy: the slice subset it serves and the
/// probability of choosing it in that state.
#[derive(Clone, Debug)]
pub struct PolicyAction {
    pub serve: Vec<usize>,
    pub probability: f64,
}

/// Optimal stationary excess-only policy and its feasibility slack.
#[derive(Clone, Debug)]
pub struct StaticLpResult {
    pub epsilon_star: f64,
    pub floors: Vec<u32>,
    /// Joint excess states with product-form probabilities, in the same
    /// order as `policy`.
    pub joint_states: Vec<(Vec<i64>, f64)>,
    pub policy: Vec<Vec<PolicyAction>>,
    /// Expected served fraction per slice under the policy.
    pub coverage: Vec<f64>,
}

/// Best achievable uniform slack of a randomized policy that sees only the
/// current excess vector: maximize `eps` subject to each slice's expected
/// served fraction reaching `target_i + eps`, over per-state action
/// distributions restricted to what the slot budget allows.
pub fn static_epsilon(
    model: &ExcessModel,
    w_c: u64,
    targets: &[f64],
    caps: &OracleCaps,
) -> Result<StaticLpResult, OracleError> {
    let n = model.slice_count();
    if targets.len() != n {
        return Err(OracleError::DimensionMismatch {
            expected: n,
            got: targets.len(),
        });
    }
    let states = model.state_count();
    let worst_columns = states.saturating_mul(1usize << n.min(usize::BITS as usize - 1));
    if worst_columns > caps.lp_columns {
        return Err(OracleError::StateSpaceTooLarge {
            columns: worst_columns,
            cap: caps.lp_columns,
        });
    }

    let joint_states = model.joint_states();
    let actions: Vec<Vec<Vec<usize>>> = joint_states
        .iter()
        .map(|(excess, _)| allowed_actions(excess, w_c))
        .collect();

    // Variable 0 is eps (free); then one probability per (state, action).
    let n_x: usize = actions.iter().map(|a| a.len()).sum();
    let mut offsets = Vec::with_capacity(actions.len());
    let mut next = 1usize;
    for acts in &actions {
        offsets.push(next);
        next += acts.len();
    }

    let mut objective = vec![0.0; 1 + n_x];
    objective[0] = 1.0;
    let mut lp = LpProblem::new(Sense::Maximize, objective);
    lp.set_free(0);

    for (s, acts) in actions.iter().enumerate() {
        let mut row = vec![0.0; 1 + n_x];
        for a in 0..acts.len() {
            row[offsets[s] + a] = 1.0;
        }
        lp.add_row(row, Cmp::Eq, 1.0);
    }
    for (i, &target) in targets.iter().enumerate() {
        let mut row = vec![0.0; 1 + n_x];
        row[0] = -1.0;
        for (s, acts) in actions.iter().enumerate() {
            let p_state = joint_states[s].1;
            for (a, serve) in acts.iter().enumerate() {
                if serve.contains(&i) {
                    row[offsets[s] + a] = p_state;
                }
            }
        }
        lp.add_row(row, Cmp::Ge, target);
    }

    let solution = solve(&lp)?;
    if solution.status != LpStatus::Optimal {
        return Err(OracleError::UnexpectedLpStatus(solution.status));
    }

    let mut policy = Vec::with_capacity(actions.len());
    for (s, acts) in actions.iter().enumerate() {
        let mut state_policy = Vec::with_capacity(acts.len());
        let mut total = 0.0;
        for (a, serve) in acts.iter().enumerate() {
            let p = solution.x[offsets[s] + a].max(0.0);
            total += p;
            state_policy.push(PolicyAction {
                serve: serve.clone(),
                probability: p,
            });
        }
        debug_assert!((total - 1.0).abs() < 1e-7, "state {s} policy mass {total}");
        for action in &mut state_policy {
            action.probability /= total;
        }
        policy.push(state_policy);
    }

    let mut coverage = vec![0.0; n];
    for (s, state_policy) in policy.iter().enumerate() {
        let p_state = joint_states[s].1;
        for action in state_policy {
            for &i in &action.serve {
                coverage[i] += p_state * action.probability;
            }
        }
    }

    Ok(StaticLpResult {
        epsilon_star: solution.objective,
        floors: model.floors().to_vec(),
        joint_states,
        policy,
        coverage,
    })
}

/// Slack never decreases with the pool: every action allowed at `w_c` is
/// still allowed at `w_c + 1`, so the feasible region only grows.
const EPSILON_FLOOR: f64 = -1e-9;

/// Minimal integer pool whose stationary slack is nonnegative (within the
/// solver's tolerance). Bisection is sound here because the slack is
/// provably nondecreasing in the pool size.
pub fn static_threshold(
    model: &ExcessModel,
    targets: &[f64],
    caps: &OracleCaps,
) -> Result<u64, OracleError> {
    let ub = model.max_positive_sum();
    let feasible = |w_c: u64| -> Result<bool, OracleError> {
        Ok(static_epsilon(model, w_c, targets, caps)?.epsilon_star >= EPSILON_FLOOR)
    };
    if !feasible(ub)? {
        return Err(OracleError::InfeasibleAtUpperBound { w_c: ub });
    }
    let (mut lo, mut hi) = (0u64, ub);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if feasible(mid)? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(lo)
}

/// Runs the randomized stationary policy on a freshly generated trace and
/// reports the served fraction per slice. The policy stream is decoupled
/// from the traffic stream so both are reproducible from one seed.
pub fn simulate_static_scheduler(
    model: &MarkovDemandModel,
    lp: &StaticLpResult,
    params: &TraceParams,
) -> Result<Vec<f64>, OracleError> {
    let n = model.slice_count();
    if lp.floors.len() != n {
        return Err(OracleError::DimensionMismatch {
            expected: n,
            got: lp.floors.len(),
        });
    }
    let trace = model.generate(params)?;
    let index: HashMap<&[i64], usize> = lp
        .joint_states
        .iter()
        .enumerate()
        .map(|(s, (excess, _))| (excess.as_slice(), s))
        .collect();

    let mut action_rng = ChaCha8Rng::seed_from_u64(params.seed ^ 0x5157_A1B2_C3D4_E5F6);
    let mut counts = vec![0u64; n];
    let mut excess_row = vec![0i64; n];
    for row in trace.rows() {
        for i in 0..n {
            excess_row[i] = row[i] as i64 - lp.floors[i] as i64;
        }
        let &s = index
            .get(excess_row.as_slice())
            .ok_or_else(|| OracleError::PolicyStateMissing(excess_row.clone()))?;
        let draw: f64 = action_rng.random();
        let mut acc = 0.0;
        let mut chosen = lp.policy[s].last();
        for action in &lp.policy[s] {
            acc += action.probability;
            if draw < acc {
                chosen = Some(action);
                break;
            }
        }
        if let Some(action) = chosen {
            for &i in &action.serve {
                counts[i] += 1;
            }
        }
    }
    let t = trace.horizon() as f64;
    Ok(counts.iter().map(|&c| c as f64 / t).collect())
}

/// Exact expected drift of `L(d) = sum(d_i^2) / 2` at one grid point.
#[derive(Clone, Debug)]
pub struct DriftPoint {
    pub d: Vec<f64>,
    pub drift: f64,
    pub bound: f64,
    pub margin: f64,
}

/// Drift diagnostics over a deficit grid. `b_std` is the derived constant
/// `sum(1 + target_i^2) / 2`; `b_alt = 1 + sum(target_i^2) / N` is reported
/// for comparison but carries no guarantee here.
#[derive(Clone, Debug)]
pub struct DriftReport {
    pub epsilon_star: f64,
    pub b_std: f64,
    pub b_alt: f64,
    pub points: Vec<DriftPoint>,
}

impl DriftReport {
    pub fn min_margin(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.margin)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Enumerates, for each deficit vector on the grid, the exact one-step
/// expected drift under the real Max-Weight decisions, and the bound
/// `b_std - epsilon_star * sum(d)`. With nonnegative targets the bound
/// holds pointwise; negative-target slices void the derivation, so margins
/// are reported either way and asserted only by callers that know the
/// targets' signs.
pub fn drift_check(
    model: &ExcessModel,
    w_c: u64,
    targets: &[f64],
    grid: &[Vec<f64>],
    caps: &OracleCaps,
) -> Result<DriftReport, OracleError> {
    let n = model.slice_count();
    let lp = static_epsilon(model, w_c, targets, caps)?;
    let joint = &lp.joint_states;

    let b_std = 0.5 * targets.iter().map(|a| 1.0 + a * a).sum::<f64>();
    let b_alt = 1.0 + targets.iter().map(|a| a * a).sum::<f64>() / n as f64;

    let mut points = Vec::with_capacity(grid.len());
    for d in grid {
        if d.len() != n {
            return Err(OracleError::DimensionMismatch {
                expected: n,
                got: d.len(),
            });
        }
        let level = |v: &[f64]| 0.5 * v.iter().map(|x| x * x).sum::<f64>();
        let l_now = level(d);
        let mut expected = 0.0;
        for (excess, p_state) in joint {
            let eligible: Vec<usize> = (0..n).filter(|&i| excess[i] > 0).collect();
            let values: Vec<f64> = eligible.iter().map(|&i| d[i]).collect();
            let weights: Vec<u64> = eligible.iter().map(|&i| excess[i] as u64).collect();
            let selection = solve_knapsack(&values, &weights, slot_capacity(excess, w_c));
            let mut served = vec![false; n];
            for &k in &selection.chosen {
                served[eligible[k]] = true;
            }
            let mut next = d.clone();
            deficit_update(&mut next, targets, &served, excess);
            expected += p_state * level(&next);
        }
        let drift = expected - l_now;
        let bound = b_std - lp.epsilon_star * d.iter().sum::<f64>();
        points.push(DriftPoint {
            d: d.clone(),
            drift,
            bound,
            margin: bound - drift,
        });
    }
    Ok(DriftReport {
        epsilon_star: lp.epsilon_star,
        b_std,
        b_alt,
        points,
    })
}

/// Cartesian power of `values`, one coordinate per slice, in deterministic
/// order (last slice fastest). Convenience for drift grids.
pub fn deficit_grid(values: &[f64], n: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(values.len().pow(n as u32));
    let mut index = vec![0usize; n];
    loop {
        out.push(index.iter().map(|&k| values[k]).collect());
        let mut pos = n;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            index[pos] += 1;
            if index[pos] < values.len() {
                break;
            }
            index[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Two independent slices, each bursting to 10 with probability one
    /// half; floors at zero.
    fn burst_pair() -> ExcessModel {
        ExcessModel::from_distributions(
            vec![
                vec![(0, 0.5), (10, 0.5)],
                vec![(0, 0.5), (10, 0.5)],
            ],
            vec![0, 0],
        )
        .unwrap()
    }

    /// Single slice, excess uniform over 0..=9 (floor zero).
    fn uniform_slice() -> ExcessModel {
        ExcessModel::from_distributions(
            vec![(0..10).map(|v| (v as i64, 0.1)).collect()],
            vec![0],
        )
        .unwrap()
    }

    #[test]
    fn joint_states_multiply_marginals() {
        let model = burst_pair();
        let joint = model.joint_states();
        assert_eq!(joint.len(), 4);
        assert_eq!(joint[0].0, vec![0, 0]);
        assert_eq!(joint[3].0, vec![10, 10]);
        for (_, p) in &joint {
            assert!((p - 0.25).abs() < 1e-12);
        }
        assert_eq!(model.max_positive_sum(), 20);
    }

    #[test]
    fn action_enumeration_respects_budget() {
        // Budget 10 fits either burst alone but not both.
        let actions = allowed_actions(&[10, 10], 10);
        assert_eq!(actions.len(), 3);
        assert!(actions.contains(&vec![]));
        assert!(actions.contains(&vec![0]));
        assert!(actions.contains(&vec![1]));

        // Lent floor space raises the budget enough for both.
        let actions = allowed_actions(&[10, 10, -10], 10);
        assert_eq!(actions.len(), 4);

        let only_empty = allowed_actions(&[10, 10], 9);
        assert_eq!(only_empty, vec![Vec::<usize>::new()]);
    }

    #[test]
    fn burst_pair_slack_matches_hand_lp() {
        let model = burst_pair();
        let caps = OracleCaps::default();
        let at_ten = static_epsilon(&model, 10, &[0.25, 0.25], &caps).unwrap();
        assert!(
            (at_ten.epsilon_star - 0.125).abs() < 1e-9,
            "eps = {}",
            at_ten.epsilon_star
        );
        assert!((at_ten.coverage[0] - 0.375).abs() < 1e-9);
        assert!((at_ten.coverage[1] - 0.375).abs() < 1e-9);

        let at_zero = static_epsilon(&model, 0, &[0.25, 0.25], &caps).unwrap();
        assert!((at_zero.epsilon_star + 0.25).abs() < 1e-9);
    }

    #[test]
    fn slack_is_nondecreasing_in_pool() {
        let model = burst_pair();
        let caps = OracleCaps::default();
        let mut prev = f64::NEG_INFINITY;
        for w_c in 0..=20 {
            let eps = static_epsilon(&model, w_c, &[0.25, 0.25], &caps)
                .unwrap()
                .epsilon_star;
            assert!(eps >= prev - 1e-9, "slack dipped at w_c={w_c}");
            prev = eps;
        }
    }

    #[test]
    fn policy_masses_sum_to_one_per_state() {
        let model = burst_pair();
        let lp = static_epsilon(&model, 10, &[0.25, 0.25], &OracleCaps::default()).unwrap();
        for state_policy in &lp.policy {
            let total: f64 = state_policy.iter().map(|a| a.probability).sum();
            assert!((total - 1.0).abs() < 1e-9);
            assert!(state_policy.iter().all(|a| a.probability >= 0.0));
        }
    }

    #[test]
    fn vacuous_targets_keep_positive_slack() {
        let model = burst_pair();
        let lp = static_epsilon(&model, 0, &[-0.3, -0.1], &OracleCaps::default()).unwrap();
        // No pool means zero coverage, so the slack is exactly the least
        // headroom among the vacuous targets.
        assert!((lp.epsilon_star - 0.1).abs() < 1e-9);
    }

    #[test]
    fn threshold_is_the_burst_size() {
        let model = burst_pair();
        let caps = OracleCaps::default();
        assert_eq!(static_threshold(&model, &[0.25, 0.25], &caps).unwrap(), 10);
        assert_eq!(static_threshold(&model, &[-0.1, 0.0], &caps).unwrap(), 0);
    }

    #[test]
    fn threshold_on_uniform_slice_covers_eight_deciles() {
        let model = uniform_slice();
        let caps = OracleCaps::default();
        assert_eq!(static_threshold(&model, &[0.8], &caps).unwrap(), 8);
    }

    #[test]
    fn unreachable_targets_error_at_upper_bound() {
        let model = burst_pair();
        let err = static_threshold(&model, &[0.6, 0.6], &OracleCaps::default()).unwrap_err();
        assert!(matches!(
            err,
            OracleError::InfeasibleAtUpperBound { w_c: 20 }
        ));
    }

    #[test]
    fn column_cap_is_enforced() {
        let model = burst_pair();
        let caps = OracleCaps {
            lp_columns: 10,
            ..OracleCaps::default()
        };
        let err = static_epsilon(&model, 10, &[0.25, 0.25], &caps).unwrap_err();
        assert!(matches!(err, OracleError::StateSpaceTooLarge { .. }));
    }

    #[test]
    fn simulated_policy_tracks_expected_coverage() {
        let chains = (0..2)
            .map(|_| {
                (
                    vec![0u32, 10],
                    vec![vec![0.5, 0.5], vec![0.5, 0.5]],
                )
            })
            .collect();
        let model = MarkovDemandModel::from_parts(chains).unwrap();
        let excess = ExcessModel::new(&model, &[0, 0]).unwrap();
        let lp = static_epsilon(&excess, 10, &[0.25, 0.25], &OracleCaps::default()).unwrap();
        let params = TraceParams {
            horizon: 100_000,
            seed: 5,
            ..TraceParams::default()
        };
        let coverage = simulate_static_scheduler(&model, &lp, &params).unwrap();
        for (i, (&measured, &expected)) in coverage.iter().zip(&lp.coverage).enumerate() {
            assert!(
                (measured - expected).abs() < 0.01,
                "slice {i}: empirical {measured} vs expected {expected}"
            );
        }
    }

    #[test]
    fn drift_matches_hand_enumeration() {
        // Single slice, excess 1 with probability one half, target 0.25,
        // pool 1, deficit 1. Served branch: deficit becomes 0.25; idle
        // branch: deficit becomes 1.25.
        let model = ExcessModel::from_distributions(
            vec![vec![(0, 0.5), (1, 0.5)]],
            vec![0],
        )
        .unwrap();
        let report = drift_check(
            &model,
            1,
            &[0.25],
            &[vec![1.0], vec![0.0]],
            &OracleCaps::default(),
        )
        .unwrap();
        let expected = 0.5 * (0.5 * 0.25f64.powi(2) + 0.5 * 1.25f64.powi(2)) - 0.5;
        assert!((report.points[0].drift - expected).abs() < 1e-12);
        assert!((report.epsilon_star - 0.25).abs() < 1e-9);
        assert!(report.points[0].margin >= 0.0);
        // At the origin the drift cannot exceed the constant term.
        assert!(report.points[1].drift <= report.b_std);
    }

    #[test]
    fn drift_bound_holds_across_grid_with_positive_targets() {
        let model = burst_pair();
        let grid = deficit_grid(&[0.0, 1.0, 2.0, 4.0, 8.0], 2);
        assert_eq!(grid.len(), 25);
        let report = drift_check(&model, 10, &[0.25, 0.25], &grid, &OracleCaps::default()).unwrap();
        assert!(report.epsilon_star > 0.0);
        assert!(
            report.min_margin() >= -1e-9,
            "worst margin {}",
            report.min_margin()
        );
    }

    #[test]
    fn grid_helper_is_cartesian_power() {
        let grid = deficit_grid(&[0.0, 1.0], 2);
        assert_eq!(
            grid,
            vec![
                vec![0.0, 0.0],
                vec![0.0, 1.0],
                vec![1.0, 0.0],
                vec![1.0, 1.0],
            ]
        );
    }
}
