//! Demand distributions and isolation floors.
//!
//! The isolation floor of a slice is the smallest bandwidth `w` whose
//! demand quantile reaches the isolation degree: `F(w) >= p_l`. Demands at
//! or below the floor are covered by dedicated bandwidth no matter what the
//! other slices do; the attained quantile `p_m = F(w)` is usually a little
//! above `p_l` because the distribution is discrete, and that overshoot is
//! exactly the share of slots the shared pool no longer needs to cover.
//!
//! [`EmpiricalCdf`] works both from observed traces and from exact state
//! probabilities, so the same floor search serves measured data and model
//! analysis.

use crate::demand::DemandTrace;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("cannot build a distribution from zero samples")]
    EmptyTrace,
    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("probability mass is invalid: {0}")]
    BadMass(&'static str),
    #[error("expected {expected} floors, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Right-continuous step distribution over integer PRB demands.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalCdf {
    /// Strictly increasing observed values.
    values: Vec<u32>,
    /// `fractions[k] = F(values[k])`; nondecreasing, last entry exactly 1.
    fractions: Vec<f64>,
    /// Number of samples behind the estimate; zero when built from an exact
    /// probability mass function.
    sample_count: usize,
}

impl EmpiricalCdf {
    pub fn from_samples(samples: &[u32]) -> Result<Self, StatsError> {
        if samples.is_empty() {
            return Err(StatsError::EmptyTrace);
        }
        let mut sorted = samples.to_vec();
        sorted.sort_unstable();
        let total = sorted.len();
        let mut values = Vec::new();
        let mut fractions = Vec::new();
        let mut seen = 0usize;
        let mut i = 0;
        while i < total {
            let v = sorted[i];
            let mut j = i;
            while j < total && sorted[j] == v {
                j += 1;
            }
            seen += j - i;
            values.push(v);
            fractions.push(seen as f64 / total as f64);
            i = j;
        }
        Ok(EmpiricalCdf {
            values,
            fractions,
            sample_count: total,
        })
    }

    /// Builds the exact distribution of a known probability mass function.
    /// Duplicate values are merged; masses must be nonnegative and sum to
    /// one within 1e-9.
    pub fn from_pmf(values: &[u32], probs: &[f64]) -> Result<Self, StatsError> {
        if values.is_empty() {
            return Err(StatsError::EmptyTrace);
        }
        if values.len() != probs.len() {
            return Err(StatsError::DimensionMismatch {
                expected: values.len(),
                got: probs.len(),
            });
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(StatsError::BadMass("negative or non-finite mass"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(StatsError::BadMass("masses do not sum to one"));
        }
        let mut pairs: Vec<(u32, f64)> = values.iter().copied().zip(probs.iter().copied()).collect();
        pairs.sort_by_key(|(v, _)| *v);
        let mut out_values = Vec::new();
        let mut out_fractions = Vec::new();
        let mut acc = 0.0;
        let mut i = 0;
        while i < pairs.len() {
            let v = pairs[i].0;
            while i < pairs.len() && pairs[i].0 == v {
                acc += pairs[i].1;
                i += 1;
            }
            out_values.push(v);
            out_fractions.push(acc / total);
        }
        // Pin the final step to exactly one so quantile searches terminate.
        *out_fractions.last_mut().unwrap() = 1.0;
        Ok(EmpiricalCdf {
            values: out_values,
            fractions: out_fractions,
            sample_count: 0,
        })
    }

    /// `F(w)`: fraction of mass at or below `w`.
    pub fn fraction_at(&self, w: u32) -> f64 {
        let idx = self.values.partition_point(|&v| v <= w);
        if idx == 0 {
            0.0
        } else {
            self.fractions[idx - 1]
        }
    }

    pub fn min_value(&self) -> u32 {
        self.values[0]
    }

    pub fn max_value(&self) -> u32 {
        *self.values.last().unwrap()
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn support(&self) -> &[u32] {
        &self.values
    }
}

/// Result of the floor search: the dedicated bandwidth and the quantile it
/// actually attains.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IsolationFloor {
    pub w_l: u32,
    pub p_m: f64,
}

/// Smallest `w` with `F(w) >= p_l`, found by bisection on the integer
/// domain `[0, max_value]`; monotonicity of `F` makes the bracket exact.
pub fn isolation_floor(cdf: &EmpiricalCdf, p_l: f64) -> Result<IsolationFloor, StatsError> {
    if !(0.0..=1.0).contains(&p_l) || !p_l.is_finite() {
        return Err(StatsError::InvalidProbability(p_l));
    }
    let mut lo = 0u32;
    let mut hi = cdf.max_value();
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if cdf.fraction_at(mid) >= p_l {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(IsolationFloor {
        w_l: lo,
        p_m: cdf.fraction_at(lo),
    })
}

/// Per-slice floors for a trace under the given isolation degrees.
pub fn isolation_floors(
    trace: &DemandTrace,
    p_l: &[f64],
) -> Result<Vec<IsolationFloor>, StatsError> {
    if p_l.len() != trace.slice_count() {
        return Err(StatsError::DimensionMismatch {
            expected: trace.slice_count(),
            got: p_l.len(),
        });
    }
    (0..trace.slice_count())
        .map(|i| {
            let cdf = EmpiricalCdf::from_samples(&trace.column(i))?;
            isolation_floor(&cdf, p_l[i])
        })
        .collect()
}

/// Signed demand above the floors: `excess[t][i] = demand[t][i] - w_l[i]`.
/// Negative entries are spare dedicated bandwidth that the scheduler can
/// lend to the shared pool within the slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExcessTrace {
    floors: Vec<u32>,
    rows: Vec<Vec<i64>>,
}

impl ExcessTrace {
    pub fn new(trace: &DemandTrace, floors: &[u32]) -> Result<Self, StatsError> {
        if floors.len() != trace.slice_count() {
            return Err(StatsError::DimensionMismatch {
                expected: trace.slice_count(),
                got: floors.len(),
            });
        }
        let rows = trace
            .rows()
            .map(|r| {
                r.iter()
                    .zip(floors)
                    .map(|(&d, &f)| d as i64 - f as i64)
                    .collect()
            })
            .collect();
        Ok(ExcessTrace {
            floors: floors.to_vec(),
            rows,
        })
    }

    /// Wraps precomputed excess rows (each row one slot) without a source
    /// trace; rows must be rectangular and nonempty.
    pub fn from_rows(floors: Vec<u32>, rows: Vec<Vec<i64>>) -> Result<Self, StatsError> {
        if rows.is_empty() {
            return Err(StatsError::EmptyTrace);
        }
        let n = floors.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(StatsError::DimensionMismatch {
                expected: n,
                got: rows.iter().map(|r| r.len()).find(|&l| l != n).unwrap_or(0),
            });
        }
        Ok(ExcessTrace { floors, rows })
    }

    pub fn horizon(&self) -> usize {
        self.rows.len()
    }

    pub fn slice_count(&self) -> usize {
        self.floors.len()
    }

    pub fn floors(&self) -> &[u32] {
        &self.floors
    }

    pub fn row(&self, t: usize) -> &[i64] {
        &self.rows[t]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i64]> {
        self.rows.iter().map(|r| r.as_slice())
    }

    /// Largest per-slot sum of positive excess; serving everything is
    /// possible with this much shared bandwidth, so it upper-bounds any
    /// sensible pool size.
    pub fn max_positive_sum(&self) -> u64 {
        self.rows
            .iter()
            .map(|r| r.iter().map(|&e| e.max(0) as u64).sum())
            .max()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn floor_on_decile_grid() {
        let samples: Vec<u32> = (1..=10).collect();
        let cdf = EmpiricalCdf::from_samples(&samples).unwrap();
        let floor = isolation_floor(&cdf, 0.85).unwrap();
        assert_eq!(floor.w_l, 9);
        assert!((floor.p_m - 0.9).abs() < 1e-12);
    }

    #[test]
    fn floor_on_uniform_ten_values() {
        let samples: Vec<u32> = (0..10).collect();
        let cdf = EmpiricalCdf::from_samples(&samples).unwrap();
        let floor = isolation_floor(&cdf, 0.5).unwrap();
        assert_eq!(floor.w_l, 4);
        assert!((floor.p_m - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zero_degree_floor_is_zero() {
        let cdf = EmpiricalCdf::from_samples(&[3, 5, 9]).unwrap();
        let floor = isolation_floor(&cdf, 0.0).unwrap();
        assert_eq!(floor.w_l, 0);
        assert_eq!(floor.p_m, 0.0);
    }

    #[test]
    fn full_degree_floor_is_max_demand() {
        let cdf = EmpiricalCdf::from_samples(&[3, 5, 9]).unwrap();
        let floor = isolation_floor(&cdf, 1.0).unwrap();
        assert_eq!(floor.w_l, 9);
        assert_eq!(floor.p_m, 1.0);
    }

    #[test]
    fn pmf_and_samples_agree_on_uniform_law() {
        let samples: Vec<u32> = (0..10).collect();
        let from_samples = EmpiricalCdf::from_samples(&samples).unwrap();
        let from_pmf = EmpiricalCdf::from_pmf(&samples, &[0.1; 10]).unwrap();
        for w in 0..=10 {
            assert!((from_samples.fraction_at(w) - from_pmf.fraction_at(w)).abs() < 1e-12);
        }
    }

    #[test]
    fn pmf_merges_duplicate_values() {
        let cdf = EmpiricalCdf::from_pmf(&[5, 0, 5], &[0.25, 0.5, 0.25]).unwrap();
        assert_eq!(cdf.support(), &[0, 5]);
        assert!((cdf.fraction_at(0) - 0.5).abs() < 1e-12);
        assert_eq!(cdf.fraction_at(5), 1.0);
    }

    #[test]
    fn fraction_below_support_is_zero() {
        let cdf = EmpiricalCdf::from_samples(&[4, 6]).unwrap();
        assert_eq!(cdf.fraction_at(3), 0.0);
    }

    #[test]
    fn excess_is_signed_difference() {
        let trace = DemandTrace::new(1.0, 0, vec![vec![7, 3]]).unwrap();
        let excess = ExcessTrace::new(&trace, &[5, 5]).unwrap();
        assert_eq!(excess.row(0), &[2, -2]);
    }

    #[test]
    fn max_positive_sum_ignores_negative_entries() {
        let trace =
            DemandTrace::new(1.0, 0, vec![vec![7, 3], vec![9, 8], vec![0, 0]]).unwrap();
        let excess = ExcessTrace::new(&trace, &[5, 5]).unwrap();
        // Rows of positive excess: [2, 0], [4, 3], [0, 0].
        assert_eq!(excess.max_positive_sum(), 7);
    }

    /// Reference implementation for the bisection: scan w upward until the
    /// quantile is reached.
    fn floor_by_scan(cdf: &EmpiricalCdf, p_l: f64) -> u32 {
        (0..=cdf.max_value())
            .find(|&w| cdf.fraction_at(w) >= p_l)
            .unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn bisection_matches_linear_scan(
            samples in proptest::collection::vec(0u32..200, 1..60),
            p_raw in 0u32..=1000,
        ) {
            let p_l = p_raw as f64 / 1000.0;
            let cdf = EmpiricalCdf::from_samples(&samples).unwrap();
            let floor = isolation_floor(&cdf, p_l).unwrap();
            prop_assert_eq!(floor.w_l, floor_by_scan(&cdf, p_l));
            prop_assert!(floor.p_m >= p_l);
            if floor.w_l > 0 {
                prop_assert!(cdf.fraction_at(floor.w_l - 1) < p_l);
            }
        }

        #[test]
        fn fractions_are_monotone(samples in proptest::collection::vec(0u32..50, 1..40)) {
            let cdf = EmpiricalCdf::from_samples(&samples).unwrap();
            let mut prev = 0.0;
            for w in 0..=cdf.max_value() {
                let f = cdf.fraction_at(w);
                prop_assert!(f >= prev);
                prev = f;
            }
            prop_assert_eq!(cdf.fraction_at(cdf.max_value()), 1.0);
        }
    }
}
