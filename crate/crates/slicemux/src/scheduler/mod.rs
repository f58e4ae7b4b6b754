//! Deficit-driven Max-Weight scheduling over an excess trace.
//!
//! Each slot the scheduler may serve a subset of the slices whose demand
//! exceeds their isolation floor. Serving slice `i` costs its excess
//! `w_e[i]` PRBs; the budget is the shared pool plus whatever dedicated
//! bandwidth the under-floor slices are not using this slot. Among feasible
//! subsets, the scheduler picks the one with the largest total deficit,
//! where a slice's deficit grows by its per-slot target and drains when its
//! excess is served. Keeping every deficit sublinear in the horizon is
//! exactly meeting the long-run availability targets.

mod knapsack;

pub use knapsack::{solve_knapsack, KnapsackSelection};

use crate::demand::DemandTrace;
use crate::sla::SlaSpec;
use crate::stats::ExcessTrace;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SchedulerError {
    #[error("{what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
}

/// Bandwidth available for excess service in one slot: the shared pool plus
/// the unused part of each under-floor slice's dedicated bandwidth.
pub fn slot_capacity(excess_row: &[i64], w_c: u64) -> u64 {
    w_c + excess_row.iter().map(|&e| (-e).max(0) as u64).sum::<u64>()
}

/// One deficit step. A slice's deficit drains by 1 only when its positive
/// excess was actually served; the outer clamp keeps deficits nonnegative
/// for slices whose per-slot target is negative (their constraint is
/// vacuous and must not bank credit).
pub fn deficit_update(d: &mut [f64], targets: &[f64], served: &[bool], excess_row: &[i64]) {
    for i in 0..d.len() {
        let drain = if served[i] && excess_row[i] > 0 { 1.0 } else { 0.0 };
        d[i] = ((d[i] - drain).max(0.0) + targets[i]).max(0.0);
    }
}

/// Trajectory of one scheduler run.
///
/// `decisions[t][i]` is true when slice `i`'s demand was met in slot `t`,
/// either within its floor (excess at most zero) or by serving its excess.
/// Coverage counts only the served-excess slots, so the accounting identity
/// `availability = isolation + coverage` holds exactly on counts.
#[derive(Clone, Debug)]
pub struct ScheduleResult {
    pub decisions: Vec<Vec<bool>>,
    pub coverage: Vec<f64>,
    pub coverage_counts: Vec<u64>,
    pub deficit_max: Vec<f64>,
    pub deficit_final: Vec<f64>,
    pub deficit_over_t: Vec<f64>,
}

/// Runs Max-Weight over the whole excess trace with shared pool `w_c`.
/// Deterministic: deficits start at zero and the knapsack tie-break is
/// fixed, so identical inputs give identical trajectories.
pub fn run_max_weight(excess: &ExcessTrace, w_c: u64, targets: &[f64]) -> ScheduleResult {
    let n = excess.slice_count();
    assert_eq!(targets.len(), n, "one per-slot target per slice");
    let horizon = excess.horizon();

    let mut d = vec![0.0f64; n];
    let mut deficit_max = vec![0.0f64; n];
    let mut coverage_counts = vec![0u64; n];
    let mut decisions = Vec::with_capacity(horizon);

    let mut eligible = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut served = vec![false; n];

    for row in excess.rows() {
        eligible.clear();
        values.clear();
        weights.clear();
        for (i, &e) in row.iter().enumerate() {
            if e > 0 {
                eligible.push(i);
                values.push(d[i]);
                weights.push(e as u64);
            }
        }
        let selection = solve_knapsack(&values, &weights, slot_capacity(row, w_c));
        debug_assert!(selection.weight <= slot_capacity(row, w_c));

        served.iter_mut().for_each(|s| *s = false);
        for &k in &selection.chosen {
            served[eligible[k]] = true;
        }
        decisions.push(
            row.iter()
                .zip(&served)
                .map(|(&e, &s)| e <= 0 || s)
                .collect(),
        );
        for i in 0..n {
            if served[i] {
                coverage_counts[i] += 1;
            }
        }
        deficit_update(&mut d, targets, &served, row);
        for i in 0..n {
            deficit_max[i] = deficit_max[i].max(d[i]);
        }
    }

    let t = horizon as f64;
    ScheduleResult {
        decisions,
        coverage: coverage_counts.iter().map(|&c| c as f64 / t).collect(),
        coverage_counts,
        deficit_max,
        deficit_final: d.clone(),
        deficit_over_t: d.iter().map(|&v| v / t).collect(),
    }
}

/// Attained service fractions and pass flags for one run.
#[derive(Clone, Debug)]
pub struct SlaReport {
    pub availability: Vec<f64>,
    pub isolation: Vec<f64>,
    pub availability_counts: Vec<u64>,
    pub isolation_counts: Vec<u64>,
    pub pass: Vec<bool>,
}

impl SlaReport {
    pub fn all_pass(&self) -> bool {
        self.pass.iter().all(|&p| p)
    }
}

/// Counts demand-met slots against the targets. A slot counts toward
/// availability when demand stayed within the floor or the decision served
/// it; only the within-floor slots count toward isolation.
pub fn evaluate_sla(
    trace: &DemandTrace,
    decisions: &[Vec<bool>],
    floors: &[u32],
    sla: &SlaSpec,
    slack: f64,
) -> Result<SlaReport, SchedulerError> {
    let n = trace.slice_count();
    for (what, got) in [
        ("floors", floors.len()),
        ("SLA entries", sla.slice_count()),
    ] {
        if got != n {
            return Err(SchedulerError::DimensionMismatch {
                what,
                expected: n,
                got,
            });
        }
    }
    if decisions.len() != trace.horizon() {
        return Err(SchedulerError::DimensionMismatch {
            what: "decision rows",
            expected: trace.horizon(),
            got: decisions.len(),
        });
    }

    let mut availability_counts = vec![0u64; n];
    let mut isolation_counts = vec![0u64; n];
    for (t, row) in trace.rows().enumerate() {
        if decisions[t].len() != n {
            return Err(SchedulerError::DimensionMismatch {
                what: "decision row width",
                expected: n,
                got: decisions[t].len(),
            });
        }
        for i in 0..n {
            if row[i] <= floors[i] {
                isolation_counts[i] += 1;
                availability_counts[i] += 1;
            } else if decisions[t][i] {
                availability_counts[i] += 1;
            }
        }
    }

    let t = trace.horizon() as f64;
    let availability: Vec<f64> = availability_counts.iter().map(|&c| c as f64 / t).collect();
    let isolation: Vec<f64> = isolation_counts.iter().map(|&c| c as f64 / t).collect();
    let pass = (0..n)
        .map(|i| availability[i] >= sla.p_h[i] - slack && isolation[i] >= sla.p_l[i] - slack)
        .collect();
    Ok(SlaReport {
        availability,
        isolation,
        availability_counts,
        isolation_counts,
        pass,
    })
}
