//! Executable checks that the two provisioning formulations agree.
//!
//! The planner solves a pinned form: every slice's reserve sits exactly at
//! its isolation floor and all remaining bandwidth is pooled. The general
//! form lets each reserve float anywhere at or above the floor. This
//! module carries the constructions that connect them on concrete traces:
//! a decision rewrite that moves reserve headroom into the pool without
//! changing total bandwidth or served demand, and an exhaustive comparison
//! showing the pinned form attains the free form's optimum on small
//! instances. Both run as property tests over generated feasible points.

use crate::demand::DemandTrace;
use crate::oracle::{offline_optimal, OracleCaps, OracleError};
use crate::provision::{provision_max_weight, required_counts, ProvisionError};
use crate::scheduler::{run_max_weight, slot_capacity};
use crate::sla::{SlaError, SlaSpec};
use crate::stats::{isolation_floors, ExcessTrace, StatsError};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Enumeration guard for the free-reserve comparison.
const RESERVE_GRID_CAP: usize = 4096;

#[derive(Debug, Error)]
pub enum EquivalenceError {
    #[error("{what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("input point is not feasible for the reserved-floor form")]
    InputInfeasible,
    #[error("reserve grid has {cells} cells, cap is {cap}")]
    GridTooLarge { cells: usize, cap: usize },
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Sla(#[from] SlaError),
    #[error(transparent)]
    Provision(#[from] ProvisionError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// A concrete operating point: common pool size, per-slice reserves, and
/// the scheduler's per-slot serve decisions.
#[derive(Clone, Debug)]
pub struct SolutionPoint {
    pub w_c: u64,
    pub w_r: Vec<u32>,
    pub decisions: Vec<Vec<bool>>,
}

impl SolutionPoint {
    /// Total provisioned bandwidth, pool plus reserves.
    pub fn objective(&self) -> u64 {
        self.w_c + self.w_r.iter().map(|&w| u64::from(w)).sum::<u64>()
    }
}

/// Rewrites one slot's decisions when the reserve headroom above each
/// isolation floor moves into the shared pool. A slice is marked served
/// if it was served beyond its old reserve, or its demand reached the
/// floor but stayed within the old reserve (that span is pool bandwidth
/// after the move).
pub fn lift_decision(
    u_row: &[bool],
    demand_row: &[u32],
    floors: &[u32],
    extra: &[u32],
) -> Vec<bool> {
    assert_eq!(u_row.len(), demand_row.len());
    assert_eq!(u_row.len(), floors.len());
    assert_eq!(u_row.len(), extra.len());
    u_row
        .iter()
        .zip(demand_row)
        .zip(floors.iter().zip(extra))
        .map(|((&u, &w), (&w_l, &e))| {
            let w = u64::from(w);
            let w_l = u64::from(w_l);
            let reserve = w_l + u64::from(e);
            (u && w > reserve) || (w_l <= w && w <= reserve)
        })
        .collect()
}

/// Per-slot capacity test: bandwidth served beyond reserves must fit the
/// pool plus whatever reserve space idle slices leave unused.
pub fn check_capacity(
    point: &SolutionPoint,
    trace: &DemandTrace,
) -> Result<Vec<bool>, EquivalenceError> {
    let n = trace.slice_count();
    if point.w_r.len() != n {
        return Err(EquivalenceError::DimensionMismatch {
            what: "reserves",
            expected: n,
            got: point.w_r.len(),
        });
    }
    if point.decisions.len() != trace.horizon() {
        return Err(EquivalenceError::DimensionMismatch {
            what: "decision slots",
            expected: trace.horizon(),
            got: point.decisions.len(),
        });
    }
    let mut fits = Vec::with_capacity(trace.horizon());
    for (row, decisions) in trace.rows().zip(&point.decisions) {
        if decisions.len() != n {
            return Err(EquivalenceError::DimensionMismatch {
                what: "decision row",
                expected: n,
                got: decisions.len(),
            });
        }
        let mut spent = 0u64;
        let mut lent = 0u64;
        for ((&w, &w_r), &served) in row.iter().zip(&point.w_r).zip(decisions) {
            let w = u64::from(w);
            let w_r = u64::from(w_r);
            if served {
                spent += w.saturating_sub(w_r);
            }
            lent += w_r.saturating_sub(w);
        }
        fits.push(spent <= point.w_c + lent);
    }
    Ok(fits)
}

/// Outcome of the reserve-lifting check on one operating point.
#[derive(Clone, Debug)]
pub struct Prop1Report {
    pub original_objective: u64,
    pub lifted_objective: u64,
    pub original_availability: Vec<u64>,
    pub lifted_availability: Vec<u64>,
    pub lifted_isolation: Vec<u64>,
    pub required_isolation: Vec<u64>,
    pub lifted_capacity_ok: bool,
    pub pass: bool,
}

/// Moves every reserve down to its isolation floor, adds the freed
/// bandwidth to the pool, and rewrites the decisions. Checks that nothing
/// is lost: total bandwidth is unchanged, each slice's availability count
/// is exactly preserved, the floor-form isolation counts still meet their
/// targets, and every slot still fits its capacity.
pub fn verify_prop1(
    point: &SolutionPoint,
    trace: &DemandTrace,
    sla: &SlaSpec,
) -> Result<Prop1Report, EquivalenceError> {
    sla.validate()?;
    let n = trace.slice_count();
    if sla.slice_count() != n {
        return Err(EquivalenceError::DimensionMismatch {
            what: "sla slices",
            expected: n,
            got: sla.slice_count(),
        });
    }
    let horizon = trace.horizon();
    let floors = isolation_floors(trace, &sla.p_l)?;
    let w_l: Vec<u32> = floors.iter().map(|f| f.w_l).collect();
    let mut extra = Vec::with_capacity(n);
    for (&w_r, &floor) in point.w_r.iter().zip(&w_l) {
        match w_r.checked_sub(floor) {
            Some(e) => extra.push(e),
            None => return Err(EquivalenceError::InputInfeasible),
        }
    }

    let required_availability = required_counts(&sla.p_h, horizon);
    let required_isolation = required_counts(&sla.p_l, horizon);
    let original_availability = availability_counts(trace, &point.decisions, &point.w_r);
    let original_isolation = within_reserve_counts(trace, &point.w_r);
    let original_ok = check_capacity(point, trace)?.iter().all(|&fits| fits)
        && meets(&original_availability, &required_availability)
        && meets(&original_isolation, &required_isolation);
    if !original_ok {
        return Err(EquivalenceError::InputInfeasible);
    }

    let freed: u64 = extra.iter().map(|&e| u64::from(e)).sum();
    let lifted = SolutionPoint {
        w_c: point.w_c + freed,
        w_r: w_l.clone(),
        decisions: trace
            .rows()
            .zip(&point.decisions)
            .map(|(row, u_row)| lift_decision(u_row, row, &w_l, &extra))
            .collect(),
    };

    let lifted_capacity_ok = check_capacity(&lifted, trace)?.iter().all(|&fits| fits);
    let lifted_availability = availability_counts(trace, &lifted.decisions, &lifted.w_r);
    let lifted_isolation = within_reserve_counts(trace, &w_l);
    let pass = point.objective() == lifted.objective()
        && original_availability == lifted_availability
        && meets(&lifted_isolation, &required_isolation)
        && lifted_capacity_ok;
    Ok(Prop1Report {
        original_objective: point.objective(),
        lifted_objective: lifted.objective(),
        original_availability,
        lifted_availability,
        lifted_isolation,
        required_isolation,
        lifted_capacity_ok,
        pass,
    })
}

/// Slots where each slice's demand is met: within its reserve or served.
fn availability_counts(trace: &DemandTrace, decisions: &[Vec<bool>], w_r: &[u32]) -> Vec<u64> {
    let mut counts = vec![0u64; w_r.len()];
    for (row, served) in trace.rows().zip(decisions) {
        for (i, ((&w, &reserve), &hit)) in row.iter().zip(w_r).zip(served).enumerate() {
            if w <= reserve || hit {
                counts[i] += 1;
            }
        }
    }
    counts
}

/// Slots where each slice's demand fits inside its reserve alone.
fn within_reserve_counts(trace: &DemandTrace, w_r: &[u32]) -> Vec<u64> {
    let mut counts = vec![0u64; w_r.len()];
    for row in trace.rows() {
        for (i, (&w, &reserve)) in row.iter().zip(w_r).enumerate() {
            if w <= reserve {
                counts[i] += 1;
            }
        }
    }
    counts
}

fn meets(counts: &[u64], required: &[u64]) -> bool {
    counts.iter().zip(required).all(|(&c, &k)| c >= k)
}

/// Builds feasible reserved-floor operating points: reserves are raised a
/// seeded random amount above the isolation floors, the pool is sized by
/// the provisioner at those reserves, and leftover slot capacity is
/// granted to extra slices at random. Random raw decisions are almost
/// never feasible, so the corpus is constructed rather than sampled.
pub fn generate_feasible_corpus(
    trace: &DemandTrace,
    sla: &SlaSpec,
    count: usize,
    seed: u64,
) -> Result<Vec<SolutionPoint>, EquivalenceError> {
    sla.validate()?;
    let n = trace.slice_count();
    if sla.slice_count() != n {
        return Err(EquivalenceError::DimensionMismatch {
            what: "sla slices",
            expected: n,
            got: sla.slice_count(),
        });
    }
    let horizon = trace.horizon();
    let floors = isolation_floors(trace, &sla.p_l)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut corpus = Vec::with_capacity(count);
    for _ in 0..count {
        let w_r: Vec<u32> = floors
            .iter()
            .map(|f| f.w_l + rng.random_range(0..4u32))
            .collect();
        let excess = ExcessTrace::new(trace, &w_r)?;
        let within = within_reserve_counts(trace, &w_r);
        let targets: Vec<f64> = sla
            .p_h
            .iter()
            .zip(&within)
            .map(|(&p_h, &w)| p_h - w as f64 / horizon as f64)
            .collect();
        let w_c = provision_max_weight(&excess, &targets, horizon)?;
        let mut decisions = run_max_weight(&excess, w_c, &targets).decisions;
        for (slot, row) in decisions.iter_mut().enumerate() {
            let excess_row = excess.row(slot);
            let budget = slot_capacity(excess_row, w_c);
            let mut spent: u64 = row
                .iter()
                .zip(excess_row)
                .filter(|&(&served, &e)| served && e > 0)
                .map(|(_, &e)| e as u64)
                .sum();
            for i in 0..n {
                if !row[i]
                    && excess_row[i] > 0
                    && spent + excess_row[i] as u64 <= budget
                    && rng.random_bool(0.3)
                {
                    row[i] = true;
                    spent += excess_row[i] as u64;
                }
            }
        }
        corpus.push(SolutionPoint {
            w_c,
            w_r,
            decisions,
        });
    }
    Ok(corpus)
}

/// Outcome of the free-reserve versus pinned-reserve comparison.
#[derive(Clone, Debug)]
pub struct Prop2Report {
    pub floor_objective: u64,
    pub best_objective: u64,
    pub best_w_r: Vec<u32>,
    pub grid_points: usize,
    pub pass: bool,
}

/// Exhaustive check, on a small trace, that freeing the reserves buys
/// nothing: enumerates every integer reserve vector between the isolation
/// floors and the peak demands, solves the offline pool problem at each,
/// and compares the best total against the floor-pinned total.
pub fn verify_prop2_small(
    trace: &DemandTrace,
    sla: &SlaSpec,
    caps: &OracleCaps,
) -> Result<Prop2Report, EquivalenceError> {
    sla.validate()?;
    let n = trace.slice_count();
    if sla.slice_count() != n {
        return Err(EquivalenceError::DimensionMismatch {
            what: "sla slices",
            expected: n,
            got: sla.slice_count(),
        });
    }
    let horizon = trace.horizon();
    let floors = isolation_floors(trace, &sla.p_l)?;
    let w_l: Vec<u32> = floors.iter().map(|f| f.w_l).collect();
    let peaks: Vec<u32> = (0..n)
        .map(|i| trace.column(i).into_iter().max().unwrap_or(0))
        .collect();

    let mut cells = 1usize;
    for (&floor, &peak) in w_l.iter().zip(&peaks) {
        let span = (peak - floor) as usize + 1;
        cells = cells
            .checked_mul(span)
            .filter(|&c| c <= RESERVE_GRID_CAP)
            .ok_or(EquivalenceError::GridTooLarge {
                cells: usize::MAX,
                cap: RESERVE_GRID_CAP,
            })?;
    }

    let required_availability = required_counts(&sla.p_h, horizon);
    let mut floor_objective = None;
    let mut best: Option<(u64, Vec<u32>)> = None;
    let mut grid_points = 0usize;
    let mut w_r = w_l.clone();
    loop {
        grid_points += 1;
        let within = within_reserve_counts(trace, &w_r);
        let required: Vec<u64> = required_availability
            .iter()
            .zip(&within)
            .map(|(&k, &w)| k.saturating_sub(w))
            .collect();
        let excess = ExcessTrace::new(trace, &w_r)?;
        let offline = offline_optimal(&excess, &required, caps)?;
        let objective =
            offline.w_c_offline + w_r.iter().map(|&w| u64::from(w)).sum::<u64>();
        if w_r == w_l {
            floor_objective = Some(objective);
        }
        if best.as_ref().is_none_or(|(obj, _)| objective < *obj) {
            best = Some((objective, w_r.clone()));
        }

        // Odometer step, last axis fastest.
        let mut rolled_over = true;
        for axis in (0..n).rev() {
            if w_r[axis] < peaks[axis] {
                w_r[axis] += 1;
                rolled_over = false;
                break;
            }
            w_r[axis] = w_l[axis];
        }
        if rolled_over {
            break;
        }
    }

    let floor_objective = floor_objective.expect("grid starts at the floors");
    let (best_objective, best_w_r) = best.expect("grid is nonempty");
    Ok(Prop2Report {
        floor_objective,
        best_objective,
        best_w_r,
        grid_points,
        pass: floor_objective == best_objective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn alternating_pair(horizon: usize) -> DemandTrace {
        let rows = (0..horizon)
            .map(|t| {
                if t % 2 == 0 {
                    vec![10, 0]
                } else {
                    vec![0, 10]
                }
            })
            .collect();
        DemandTrace::new(1.0, 0, rows).unwrap()
    }

    fn mixed_period_trace(horizon: usize) -> DemandTrace {
        let rows = (0..horizon)
            .map(|t| vec![(t % 10) as u32, ((t * 3) % 7) as u32])
            .collect();
        DemandTrace::new(1.0, 0, rows).unwrap()
    }

    #[test]
    fn lift_with_zero_extra_keeps_pool_serves() {
        let u = [true, false, true, true];
        let demand = [5, 5, 3, 2];
        let floors = [3, 3, 3, 3];
        let lifted = lift_decision(&u, &demand, &floors, &[0; 4]);
        // Above the floor the pool decision stands; at the floor the slot
        // is served by definition; below it the floor alone answers.
        assert_eq!(lifted, vec![true, false, true, false]);
    }

    #[test]
    fn lift_marks_demand_inside_old_reserve_as_served() {
        for u in [false, true] {
            let lifted = lift_decision(&[u], &[8], &[5], &[5]);
            assert_eq!(lifted, vec![true]);
        }
    }

    #[test]
    fn lift_beyond_old_reserve_follows_the_pool_decision() {
        assert_eq!(lift_decision(&[false], &[12], &[5], &[5]), vec![false]);
        assert_eq!(lift_decision(&[true], &[12], &[5], &[5]), vec![true]);
    }

    #[test]
    fn capacity_holds_when_sole_demander_is_served() {
        let trace = alternating_pair(4);
        let point = SolutionPoint {
            w_c: 10,
            w_r: vec![0, 0],
            decisions: vec![vec![true; 2]; 4],
        };
        assert!(check_capacity(&point, &trace).unwrap().iter().all(|&ok| ok));
    }

    #[test]
    fn capacity_fails_when_both_bursts_land_together() {
        let trace = DemandTrace::new(1.0, 0, vec![vec![10, 10]]).unwrap();
        let point = SolutionPoint {
            w_c: 10,
            w_r: vec![0, 0],
            decisions: vec![vec![true, true]],
        };
        assert_eq!(check_capacity(&point, &trace).unwrap(), vec![false]);
    }

    #[test]
    fn capacity_is_trivial_on_idle_slots() {
        let trace = DemandTrace::new(1.0, 0, vec![vec![0, 0]]).unwrap();
        let point = SolutionPoint {
            w_c: 0,
            w_r: vec![0, 0],
            decisions: vec![vec![false, false]],
        };
        assert_eq!(check_capacity(&point, &trace).unwrap(), vec![true]);
    }

    #[test]
    fn corpus_points_are_feasible_by_construction() {
        let trace = mixed_period_trace(400);
        let sla = SlaSpec::new(vec![0.9, 0.8], vec![0.5, 0.4]).unwrap();
        let corpus = generate_feasible_corpus(&trace, &sla, 10, 3).unwrap();
        assert_eq!(corpus.len(), 10);
        let required = required_counts(&sla.p_h, trace.horizon());
        for point in &corpus {
            assert!(check_capacity(point, &trace).unwrap().iter().all(|&ok| ok));
            let avail = availability_counts(&trace, &point.decisions, &point.w_r);
            assert!(meets(&avail, &required));
        }
    }

    #[test]
    fn lifting_preserves_corpus_feasibility() {
        let trace = mixed_period_trace(400);
        let sla = SlaSpec::new(vec![0.9, 0.8], vec![0.5, 0.4]).unwrap();
        for seed in 0..5 {
            let corpus = generate_feasible_corpus(&trace, &sla, 10, seed).unwrap();
            for point in &corpus {
                let report = verify_prop1(point, &trace, &sla).unwrap();
                assert!(report.pass, "seed {seed}: {report:?}");
                assert_eq!(report.original_objective, report.lifted_objective);
                assert_eq!(report.original_availability, report.lifted_availability);
            }
        }
    }

    #[test]
    fn reserve_below_floor_is_rejected() {
        let trace = mixed_period_trace(100);
        let sla = SlaSpec::new(vec![0.9, 0.8], vec![0.5, 0.4]).unwrap();
        let mut point = generate_feasible_corpus(&trace, &sla, 1, 0)
            .unwrap()
            .pop()
            .unwrap();
        point.w_r = vec![0, 0];
        let err = verify_prop1(&point, &trace, &sla).unwrap_err();
        assert!(matches!(err, EquivalenceError::InputInfeasible));
    }

    #[test]
    fn starved_input_point_is_rejected() {
        let trace = alternating_pair(4);
        let sla = SlaSpec::new(vec![1.0, 1.0], vec![0.5, 0.5]).unwrap();
        // Floors are 0; serving nobody leaves availability at half.
        let point = SolutionPoint {
            w_c: 0,
            w_r: vec![0, 0],
            decisions: vec![vec![false; 2]; 4],
        };
        let err = verify_prop1(&point, &trace, &sla).unwrap_err();
        assert!(matches!(err, EquivalenceError::InputInfeasible));
    }

    #[test]
    fn overspent_input_point_is_rejected() {
        let trace = DemandTrace::new(1.0, 0, vec![vec![10, 10]]).unwrap();
        let sla = SlaSpec::new(vec![1.0, 1.0], vec![0.0, 0.0]).unwrap();
        let point = SolutionPoint {
            w_c: 10,
            w_r: vec![0, 0],
            decisions: vec![vec![true, true]],
        };
        let err = verify_prop1(&point, &trace, &sla).unwrap_err();
        assert!(matches!(err, EquivalenceError::InputInfeasible));
    }

    #[test]
    fn pinned_reserves_attain_the_free_optimum_on_bursts() {
        let trace = alternating_pair(4);
        let sla = SlaSpec::new(vec![1.0, 1.0], vec![0.0, 0.0]).unwrap();
        let report = verify_prop2_small(&trace, &sla, &OracleCaps::default()).unwrap();
        assert!(report.pass, "{report:?}");
        assert_eq!(report.floor_objective, 10);
        assert_eq!(report.grid_points, 121);
    }

    #[test]
    fn oversized_reserve_grid_is_rejected() {
        let trace = DemandTrace::new(1.0, 0, vec![vec![5000], vec![0]]).unwrap();
        let sla = SlaSpec::new(vec![1.0], vec![0.0]).unwrap();
        let err = verify_prop2_small(&trace, &sla, &OracleCaps::default()).unwrap_err();
        assert!(matches!(err, EquivalenceError::GridTooLarge { .. }));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn lifting_never_loses_feasibility_or_bandwidth(
            rows in proptest::collection::vec(
                proptest::collection::vec(0u32..8, 2),
                8..30,
            ),
            seed in 0u64..1000,
            (p_h, p_l) in prop_oneof![
                Just((vec![0.75, 0.9], vec![0.25, 0.5])),
                Just((vec![0.5, 0.5], vec![0.0, 0.5])),
                Just((vec![0.9, 0.25], vec![0.5, 0.0])),
            ],
        ) {
            let trace = DemandTrace::new(1.0, 0, rows).unwrap();
            let sla = SlaSpec::new(p_h, p_l).unwrap();
            let corpus = generate_feasible_corpus(&trace, &sla, 3, seed).unwrap();
            for point in &corpus {
                let report = verify_prop1(point, &trace, &sla).unwrap();
                prop_assert!(report.pass, "{report:?}");
            }
        }

        #[test]
        fn free_reserves_never_beat_pinned_ones(
            rows in proptest::collection::vec(
                proptest::collection::vec(0u32..4, 2),
                2..6,
            ),
            (p_h, p_l) in prop_oneof![
                Just((vec![1.0, 0.75], vec![0.0, 0.5])),
                Just((vec![0.5, 0.5], vec![0.5, 0.0])),
                Just((vec![0.75, 1.0], vec![0.25, 0.25])),
            ],
        ) {
            let trace = DemandTrace::new(1.0, 0, rows).unwrap();
            let sla = SlaSpec::new(p_h, p_l).unwrap();
            let report = verify_prop2_small(&trace, &sla, &OracleCaps::default()).unwrap();
            prop_assert!(report.pass, "{report:?}");
        }
    }
}
