//! Bandwidth provisioning: minimal shared pool under Max-Weight, full
//! plans, tradeoff sweeps, and the no-multiplexing baseline.
//!
//! A plan dedicates each slice its isolation floor and adds one shared pool
//! sized so that the scheduler meets every slice's availability target on
//! the trace. Availability over a finite horizon is a served-slot count:
//! slice `i` needs `K_i = ceil((p_h[i] - p_m[i]) * T)` of its above-floor
//! slots served. Pool sizing is a one-dimensional search over integers;
//! feasibility is treated as monotone in the pool size and the returned
//! bracket is re-verified, with a full upward scan as the fallback if a
//! finite trace ever breaks monotonicity.

use crate::demand::DemandTrace;
use crate::scheduler::run_max_weight;
use crate::sla::{SlaError, SlaSpec};
use crate::stats::{isolation_floor, EmpiricalCdf, ExcessTrace, StatsError};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Ceiling on sweep grid cells unless the caller raises it explicitly.
pub const DEFAULT_CELL_CAP: usize = 10_000;

#[derive(Debug, Error)]
pub enum ProvisionError {
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Sla(#[from] SlaError),
    #[error("coverage counts unreachable even with the largest useful pool w_c={w_c}")]
    InfeasibleAtUpperBound { w_c: u64 },
    #[error("sweep grid has {cells} cells, above the cap of {cap}")]
    GridTooLarge { cells: usize, cap: usize },
    #[error("sweep step {0} is outside (0, 1]")]
    InvalidStep(f64),
    #[error("horizon {given} does not match the trace horizon {actual}")]
    HorizonMismatch { given: usize, actual: usize },
}

/// Dedicated floors plus the shared pool; `total` is the bandwidth the
/// operator must provision.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProvisionPlan {
    pub w_l: Vec<u32>,
    pub p_m: Vec<f64>,
    pub w_c: u64,
    pub total: u64,
}

impl ProvisionPlan {
    fn assemble(w_l: Vec<u32>, p_m: Vec<f64>, w_c: u64) -> Self {
        let total = w_c + w_l.iter().map(|&w| w as u64).sum::<u64>();
        ProvisionPlan { w_l, p_m, w_c, total }
    }
}

/// Served-slot counts that realize the per-slot targets over `horizon`
/// slots: `ceil(target * horizon)`, never negative. The small guard keeps a
/// product like `0.4 * 1e5` (stored a hair above the integer) from rounding
/// one slot too high.
pub fn required_counts(targets: &[f64], horizon: usize) -> Vec<u64> {
    targets
        .iter()
        .map(|&a| {
            let scaled = (a * horizon as f64 - 1e-6).ceil();
            if scaled <= 0.0 {
                0
            } else {
                scaled as u64
            }
        })
        .collect()
}

pub fn meets_counts(counts: &[u64], required: &[u64]) -> bool {
    counts.iter().zip(required).all(|(&c, &k)| c >= k)
}

/// Minimal integer pool size under which Max-Weight meets all coverage
/// counts on this trace. The search space is `[0, max slot excess sum]`:
/// at the top everything fits every slot, so only a target exceeding a
/// slice's entire above-floor frequency can make even that infeasible.
pub fn provision_max_weight(
    excess: &ExcessTrace,
    targets: &[f64],
    horizon: usize,
) -> Result<u64, ProvisionError> {
    if horizon != excess.horizon() {
        return Err(ProvisionError::HorizonMismatch {
            given: horizon,
            actual: excess.horizon(),
        });
    }
    assert_eq!(targets.len(), excess.slice_count(), "one target per slice");

    let required = required_counts(targets, horizon);
    if required.iter().all(|&k| k == 0) {
        return Ok(0);
    }

    let mut memo: BTreeMap<u64, bool> = BTreeMap::new();
    let mut feasible = |w_c: u64| -> bool {
        *memo.entry(w_c).or_insert_with(|| {
            let result = run_max_weight(excess, w_c, targets);
            meets_counts(&result.coverage_counts, &required)
        })
    };

    let ub = excess.max_positive_sum();
    if !feasible(ub) {
        return Err(ProvisionError::InfeasibleAtUpperBound { w_c: ub });
    }
    let (mut lo, mut hi) = (0u64, ub);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }

    // The bisection assumed feasibility is monotone in the pool size. The
    // trajectories do not guarantee that on a finite trace, so check both
    // sides of the bracket and fall back to the authoritative scan.
    let ok_here = feasible(lo);
    let ok_below = lo > 0 && feasible(lo - 1);
    if !ok_here || ok_below {
        for w_c in 0..=ub {
            if feasible(w_c) {
                return Ok(w_c);
            }
        }
        unreachable!("upper bound verified feasible above");
    }
    Ok(lo)
}

/// Floors from the trace's own distribution, then the minimal pool on the
/// resulting excess trace.
pub fn full_plan(trace: &DemandTrace, sla: &SlaSpec) -> Result<ProvisionPlan, ProvisionError> {
    sla.validate()?;
    let cdfs = per_slice_cdfs(trace)?;
    plan_with_cdfs(trace, &cdfs, sla)
}

fn per_slice_cdfs(trace: &DemandTrace) -> Result<Vec<EmpiricalCdf>, StatsError> {
    (0..trace.slice_count())
        .map(|i| EmpiricalCdf::from_samples(&trace.column(i)))
        .collect()
}

fn plan_with_cdfs(
    trace: &DemandTrace,
    cdfs: &[EmpiricalCdf],
    sla: &SlaSpec,
) -> Result<ProvisionPlan, ProvisionError> {
    let mut w_l = Vec::with_capacity(cdfs.len());
    let mut p_m = Vec::with_capacity(cdfs.len());
    for (cdf, &p_l) in cdfs.iter().zip(&sla.p_l) {
        let floor = isolation_floor(cdf, p_l)?;
        w_l.push(floor.w_l);
        p_m.push(floor.p_m);
    }
    let excess = ExcessTrace::new(trace, &w_l)?;
    let targets: Vec<f64> = sla.p_h.iter().zip(&p_m).map(|(&h, &m)| h - m).collect();
    let w_c = provision_max_weight(&excess, &targets, trace.horizon())?;
    Ok(ProvisionPlan::assemble(w_l, p_m, w_c))
}

/// One sweep cell: the isolation degrees it was planned for and the plan.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepRow {
    pub p_l: Vec<f64>,
    pub plan: ProvisionPlan,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TradeoffSurface {
    pub rows: Vec<SweepRow>,
}

/// Plans every point of the grid `{0, step, 2·step, ...} x ... `, each axis
/// capped at that slice's availability target (which is always included as
/// the last point). Rows come out in row-major order with the last slice's
/// axis varying fastest, independent of how cells are computed.
pub fn isolation_sweep(
    trace: &DemandTrace,
    sla: &SlaSpec,
    step: f64,
) -> Result<TradeoffSurface, ProvisionError> {
    isolation_sweep_with_cap(trace, sla, step, DEFAULT_CELL_CAP)
}

pub fn isolation_sweep_with_cap(
    trace: &DemandTrace,
    sla: &SlaSpec,
    step: f64,
    cell_cap: usize,
) -> Result<TradeoffSurface, ProvisionError> {
    sla.validate()?;
    if !(step > 0.0 && step <= 1.0) || !step.is_finite() {
        return Err(ProvisionError::InvalidStep(step));
    }
    let axes: Vec<Vec<f64>> = sla.p_h.iter().map(|&p_h| axis_points(step, p_h)).collect();
    let cells = axes.iter().map(|a| a.len()).product::<usize>();
    if cells > cell_cap {
        return Err(ProvisionError::GridTooLarge {
            cells,
            cap: cell_cap,
        });
    }

    let cdfs = per_slice_cdfs(trace)?;
    let mut rows = Vec::with_capacity(cells);
    let mut index = vec![0usize; axes.len()];
    loop {
        let p_l: Vec<f64> = index.iter().zip(&axes).map(|(&k, axis)| axis[k]).collect();
        let cell_sla = SlaSpec {
            p_h: sla.p_h.clone(),
            p_l: p_l.clone(),
        };
        let plan = plan_with_cdfs(trace, &cdfs, &cell_sla)?;
        rows.push(SweepRow { p_l, plan });

        // Odometer increment, last axis fastest.
        let mut pos = axes.len();
        loop {
            if pos == 0 {
                return Ok(TradeoffSurface { rows });
            }
            pos -= 1;
            index[pos] += 1;
            if index[pos] < axes[pos].len() {
                break;
            }
            index[pos] = 0;
        }
    }
}

fn axis_points(step: f64, p_h: f64) -> Vec<f64> {
    let mut points = Vec::new();
    let mut k = 0u32;
    loop {
        let v = k as f64 * step;
        if v >= p_h - 1e-12 {
            break;
        }
        points.push(v);
        k += 1;
    }
    points.push(p_h);
    points
}

/// Total bandwidth with no multiplexing at all: every slice holds its own
/// availability-quantile floor and the shared pool is empty.
pub fn full_isolation_baseline(trace: &DemandTrace, p_h: &[f64]) -> Result<u64, ProvisionError> {
    if p_h.len() != trace.slice_count() {
        return Err(ProvisionError::Stats(StatsError::DimensionMismatch {
            expected: trace.slice_count(),
            got: p_h.len(),
        }));
    }
    let mut total = 0u64;
    for (i, &target) in p_h.iter().enumerate() {
        let cdf = EmpiricalCdf::from_samples(&trace.column(i))?;
        total += isolation_floor(&cdf, target)?.w_l as u64;
    }
    Ok(total)
}
