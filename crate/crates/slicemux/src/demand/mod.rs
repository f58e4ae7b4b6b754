//! Per-slot bandwidth demand traces and the models that generate them.
//!
//! A trace is a `T x N` matrix of nonnegative integer demands in physical
//! resource blocks (PRBs): one row per scheduling slot, one column per
//! slice. Three generators are provided:
//!
//! * [`markov::MarkovDemandModel`]: independent ergodic Markov chains, one
//!   per slice, each state carrying a fixed PRB demand. This is the analysis
//!   workhorse because its stationary law is known exactly.
//! * [`onoff::OnOffSourceSpec`]: a population of on-off users (heavy-tailed
//!   active periods, exponential idle periods) feeding a constant-rate flow
//!   while active. Stands in for voice and video tenants.
//! * [`web::WebBrowsingSpec`]: a renewal page-download cycle (fetch objects,
//!   parse, read) that stands in for web-browsing tenants.
//!
//! Generation is deterministic: a master seed plus the slice index fully
//! determine each column, and regenerating with the same parameters
//! reproduces the trace byte for byte.

pub mod markov;
pub mod onoff;
pub mod web;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default cell capacity in PRBs; demands are clipped here during generation.
pub const DEFAULT_SYSTEM_BANDWIDTH: u32 = 100;

#[derive(Debug, Error)]
pub enum DemandError {
    #[error("trace must contain at least one slot")]
    EmptyTrace,
    #[error("trace must contain at least one slice")]
    NoSlices,
    #[error("row {row} has {got} entries, expected {expected}")]
    RaggedRows {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("slice {slice}: {source}")]
    Chain {
        slice: usize,
        source: markov::ChainError,
    },
    #[error("parameter {name} = {value} is invalid: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("window size must be at least 1")]
    ZeroWindow,
}

/// Common knobs for trace generation, shared by every model.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TraceParams {
    /// Number of slots to generate.
    pub horizon: usize,
    /// Slot duration in milliseconds.
    pub slot_ms: f64,
    /// Master seed; column `i` uses the stream derived for slice `i`.
    pub seed: u64,
    /// Hard cap applied to every generated demand.
    pub system_bandwidth: u32,
}

impl Default for TraceParams {
    fn default() -> Self {
        TraceParams {
            horizon: 10_000,
            slot_ms: 1.0,
            seed: 0,
            system_bandwidth: DEFAULT_SYSTEM_BANDWIDTH,
        }
    }
}

/// Derives the per-slice RNG stream from the master seed. Streams for
/// different slices are decorrelated by a golden-ratio stride.
pub(crate) fn slice_rng(master: u64, slice: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    let seed = master ^ (slice.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    ChaCha8Rng::seed_from_u64(seed)
}

/// A rectangular demand trace: `demands[t][i]` is slice `i`'s demand in slot
/// `t`, in PRBs.
#[derive(Clone, Debug, PartialEq)]
pub struct DemandTrace {
    pub slot_ms: f64,
    pub seed: u64,
    demands: Vec<Vec<u32>>,
}

impl DemandTrace {
    pub fn new(slot_ms: f64, seed: u64, demands: Vec<Vec<u32>>) -> Result<Self, DemandError> {
        if demands.is_empty() {
            return Err(DemandError::EmptyTrace);
        }
        let width = demands[0].len();
        if width == 0 {
            return Err(DemandError::NoSlices);
        }
        for (row, r) in demands.iter().enumerate() {
            if r.len() != width {
                return Err(DemandError::RaggedRows {
                    row,
                    got: r.len(),
                    expected: width,
                });
            }
        }
        Ok(DemandTrace {
            slot_ms,
            seed,
            demands,
        })
    }

    /// Assembles a trace from per-slice columns of equal length.
    pub fn from_columns(
        slot_ms: f64,
        seed: u64,
        columns: Vec<Vec<u32>>,
    ) -> Result<Self, DemandError> {
        if columns.is_empty() {
            return Err(DemandError::NoSlices);
        }
        let t = columns[0].len();
        if t == 0 {
            return Err(DemandError::EmptyTrace);
        }
        for (i, c) in columns.iter().enumerate() {
            if c.len() != t {
                return Err(DemandError::RaggedRows {
                    row: i,
                    got: c.len(),
                    expected: t,
                });
            }
        }
        let demands = (0..t)
            .map(|slot| columns.iter().map(|c| c[slot]).collect())
            .collect();
        Ok(DemandTrace {
            slot_ms,
            seed,
            demands,
        })
    }

    pub fn horizon(&self) -> usize {
        self.demands.len()
    }

    pub fn slice_count(&self) -> usize {
        self.demands[0].len()
    }

    pub fn row(&self, t: usize) -> &[u32] {
        &self.demands[t]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.demands.iter().map(|r| r.as_slice())
    }

    pub fn column(&self, slice: usize) -> Vec<u32> {
        self.demands.iter().map(|r| r[slice]).collect()
    }

    /// Collapses every window of `window_slots` consecutive slots into one
    /// slot holding the windowed maximum per slice; a trailing partial
    /// window is kept and collapsed the same way. The slot duration of the
    /// result grows accordingly. `window_slots == 1` is the identity.
    pub fn window_max(&self, window_slots: usize) -> Result<DemandTrace, DemandError> {
        if window_slots == 0 {
            return Err(DemandError::ZeroWindow);
        }
        let n = self.slice_count();
        let mut out = Vec::with_capacity(self.horizon().div_ceil(window_slots));
        for chunk in self.demands.chunks(window_slots) {
            let mut row = vec![0u32; n];
            for r in chunk {
                for (m, v) in row.iter_mut().zip(r) {
                    *m = (*m).max(*v);
                }
            }
            out.push(row);
        }
        Ok(DemandTrace {
            slot_ms: self.slot_ms * window_slots as f64,
            seed: self.seed,
            demands: out,
        })
    }
}

/// Scalar distribution used by the traffic-source parameters.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Dist {
    Constant { value: f64 },
    Uniform { lo: f64, hi: f64 },
    Exponential { mean: f64 },
    /// Classic Pareto with density support `[scale, inf)`; the mean is
    /// `scale * shape / (shape - 1)` when `shape > 1`.
    Pareto { scale: f64, shape: f64 },
    /// Log-normal parameterized in log space.
    LogNormal { mu_log: f64, sigma_log: f64 },
}

impl Dist {
    pub fn validate(&self, name: &'static str) -> Result<(), DemandError> {
        let bad = |value: f64, reason: &'static str| DemandError::InvalidParameter {
            name,
            value,
            reason,
        };
        match *self {
            Dist::Constant { value } => {
                if !value.is_finite() || value < 0.0 {
                    return Err(bad(value, "constant must be finite and nonnegative"));
                }
            }
            Dist::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 || hi < lo {
                    return Err(bad(lo, "uniform needs 0 <= lo <= hi, both finite"));
                }
            }
            Dist::Exponential { mean } => {
                if !mean.is_finite() || mean < 0.0 {
                    return Err(bad(mean, "exponential mean must be finite and nonnegative"));
                }
            }
            Dist::Pareto { scale, shape } => {
                if !(scale.is_finite() && shape.is_finite()) || scale <= 0.0 || shape <= 0.0 {
                    return Err(bad(shape, "pareto needs positive scale and shape"));
                }
            }
            Dist::LogNormal { mu_log, sigma_log } => {
                if !(mu_log.is_finite() && sigma_log.is_finite()) || sigma_log < 0.0 {
                    return Err(bad(sigma_log, "log-normal sigma must be finite, nonnegative"));
                }
            }
        }
        Ok(())
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        use rand_distr::Distribution;
        match *self {
            Dist::Constant { value } => value,
            Dist::Uniform { lo, hi } => {
                if hi > lo {
                    rng.random_range(lo..hi)
                } else {
                    lo
                }
            }
            Dist::Exponential { mean } => {
                if mean <= 0.0 {
                    0.0
                } else {
                    rand_distr::Exp::new(1.0 / mean).unwrap().sample(rng)
                }
            }
            Dist::Pareto { scale, shape } => {
                rand_distr::Pareto::new(scale, shape).unwrap().sample(rng)
            }
            Dist::LogNormal { mu_log, sigma_log } => rand_distr::LogNormal::new(mu_log, sigma_log)
                .unwrap()
                .sample(rng),
        }
    }

    /// Distribution mean, used only to spread initial phases; heavy-tailed
    /// cases without a finite mean fall back to the scale parameter.
    pub fn mean(&self) -> f64 {
        match *self {
            Dist::Constant { value } => value,
            Dist::Uniform { lo, hi } => 0.5 * (lo + hi),
            Dist::Exponential { mean } => mean,
            Dist::Pareto { scale, shape } => {
                if shape > 1.0 {
                    scale * shape / (shape - 1.0)
                } else {
                    scale
                }
            }
            Dist::LogNormal { mu_log, sigma_log } => (mu_log + 0.5 * sigma_log * sigma_log).exp(),
        }
    }
}
