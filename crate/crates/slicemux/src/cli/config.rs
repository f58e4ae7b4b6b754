//! Scenario files: one JSON document describing the slices, their SLA
//! targets, and the run parameters shared by every subcommand.
//!
//! `horizon` counts raw generated slots; when `window_slots` exceeds one,
//! the trace is aggregated by per-window maxima before anything downstream
//! sees it, so the emitted trace has `ceil(horizon / window_slots)` slots.

use crate::demand::markov::{ChainError, MarkovDemandModel, SliceChain};
use crate::demand::onoff::OnOffSourceSpec;
use crate::demand::web::WebBrowsingSpec;
use crate::demand::{slice_rng, DemandError, DemandTrace, TraceParams, DEFAULT_SYSTEM_BANDWIDTH};
use crate::oracle::OracleCaps;
use crate::provision::DEFAULT_CELL_CAP;
use crate::sla::{SlaError, SlaSpec};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario has no slices")]
    NoSlices,
    #[error("horizon must be at least 1 slot")]
    ZeroHorizon,
    #[error("window_slots must be at least 1")]
    ZeroWindow,
    #[error("slot_ms must be positive and finite")]
    BadSlotMs,
    #[error("system_bandwidth must be at least 1 PRB")]
    ZeroBandwidth,
    #[error("solver cap {name} must be positive")]
    ZeroCap { name: &'static str },
    #[error("slice {slice}: {source}")]
    Chain {
        slice: usize,
        #[source]
        source: ChainError,
    },
    #[error("slice {slice}: {source}")]
    Model {
        slice: usize,
        #[source]
        source: DemandError,
    },
    #[error(transparent)]
    Sla(#[from] SlaError),
}

/// Solver size limits; every field is optional in the file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CapsConfig {
    /// Cap on stationary-program policy columns (`|joint states| * 2^N`).
    pub lp_columns: usize,
    /// Cap on variables in the grouped offline integer program.
    pub ilp_vars: usize,
    /// Cap on branch-and-bound nodes per feasibility probe.
    pub bb_nodes: usize,
    /// Cap on sweep grid cells.
    pub sweep_cells: usize,
}

impl Default for CapsConfig {
    fn default() -> Self {
        let oracle = OracleCaps::default();
        CapsConfig {
            lp_columns: oracle.lp_columns,
            ilp_vars: oracle.ilp_vars,
            bb_nodes: oracle.bb_nodes,
            sweep_cells: DEFAULT_CELL_CAP,
        }
    }
}

impl CapsConfig {
    pub fn oracle(&self) -> OracleCaps {
        OracleCaps {
            lp_columns: self.lp_columns,
            ilp_vars: self.ilp_vars,
            bb_nodes: self.bb_nodes,
        }
    }

    pub(super) fn validate(&self) -> Result<(), ScenarioError> {
        for (name, value) in [
            ("lp_columns", self.lp_columns),
            ("ilp_vars", self.ilp_vars),
            ("bb_nodes", self.bb_nodes),
            ("sweep_cells", self.sweep_cells),
        ] {
            if value == 0 {
                return Err(ScenarioError::ZeroCap { name });
            }
        }
        Ok(())
    }
}

/// Traffic model of one slice, tagged by `kind`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SliceModel {
    Markov {
        states: Vec<u32>,
        transition: Vec<Vec<f64>>,
    },
    #[serde(rename = "onoff")]
    OnOff(OnOffSourceSpec),
    Web(WebBrowsingSpec),
}

/// One slice: its traffic model and SLA targets.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SliceConfig {
    pub model: SliceModel,
    pub p_h: f64,
    pub p_l: f64,
}

fn default_slot_ms() -> f64 {
    1.0
}

fn default_window() -> usize {
    1
}

fn default_system_bandwidth() -> u32 {
    DEFAULT_SYSTEM_BANDWIDTH
}

/// A full experiment description.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Scenario {
    pub slices: Vec<SliceConfig>,
    /// Raw slots to generate, before window aggregation.
    pub horizon: usize,
    #[serde(default = "default_slot_ms")]
    pub slot_ms: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_window")]
    pub window_slots: usize,
    #[serde(default = "default_system_bandwidth")]
    pub system_bandwidth: u32,
    #[serde(default)]
    pub caps: CapsConfig,
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.slices.is_empty() {
            return Err(ScenarioError::NoSlices);
        }
        if self.horizon == 0 {
            return Err(ScenarioError::ZeroHorizon);
        }
        if self.window_slots == 0 {
            return Err(ScenarioError::ZeroWindow);
        }
        if !(self.slot_ms.is_finite() && self.slot_ms > 0.0) {
            return Err(ScenarioError::BadSlotMs);
        }
        if self.system_bandwidth == 0 {
            return Err(ScenarioError::ZeroBandwidth);
        }
        self.caps.validate()?;
        for (slice, spec) in self.slices.iter().enumerate() {
            let model_check = match &spec.model {
                SliceModel::Markov { states, transition } => {
                    SliceChain::new(states.clone(), transition.clone())
                        .map(|_| ())
                        .map_err(|source| ScenarioError::Chain { slice, source })
                }
                SliceModel::OnOff(spec) => spec
                    .validate()
                    .map_err(|source| ScenarioError::Model { slice, source }),
                SliceModel::Web(spec) => spec
                    .validate()
                    .map_err(|source| ScenarioError::Model { slice, source }),
            };
            model_check?;
        }
        self.sla()?;
        Ok(())
    }

    /// Per-slice SLA targets in slice order.
    pub fn sla(&self) -> Result<SlaSpec, SlaError> {
        SlaSpec::new(
            self.slices.iter().map(|s| s.p_h).collect(),
            self.slices.iter().map(|s| s.p_l).collect(),
        )
    }

    pub fn slice_count(&self) -> usize {
        self.slices.len()
    }

    fn trace_params(&self, seed: u64) -> TraceParams {
        TraceParams {
            horizon: self.horizon,
            slot_ms: self.slot_ms,
            seed,
            system_bandwidth: self.system_bandwidth,
        }
    }

    /// Generates the scenario's demand trace. Slice `i` draws from its own
    /// seed stream, so an all-Markov scenario reproduces
    /// [`MarkovDemandModel::generate`] column for column.
    pub fn generate_trace(&self, seed: u64) -> Result<DemandTrace, DemandError> {
        let params = self.trace_params(seed);
        let mut columns = Vec::with_capacity(self.slices.len());
        for (i, spec) in self.slices.iter().enumerate() {
            let mut rng = slice_rng(seed, i as u64);
            let column = match &spec.model {
                SliceModel::Markov { states, transition } => {
                    let chain = SliceChain::new(states.clone(), transition.clone())
                        .map_err(|source| DemandError::Chain { slice: i, source })?;
                    chain.generate_column(params.horizon, 0, params.system_bandwidth, &mut rng)
                }
                SliceModel::OnOff(spec) => spec.generate_column_with_stats(&params, &mut rng)?.0,
                SliceModel::Web(spec) => spec.generate_column(&params, &mut rng)?,
            };
            columns.push(column);
        }
        let trace = DemandTrace::from_columns(params.slot_ms, seed, columns)?;
        if self.window_slots > 1 {
            trace.window_max(self.window_slots)
        } else {
            Ok(trace)
        }
    }

    /// The exact per-slice chains when every slice is Markov, `None`
    /// otherwise. Oracle computations need the exact stationary law.
    pub fn markov_model(&self) -> Result<Option<MarkovDemandModel>, DemandError> {
        let mut parts = Vec::with_capacity(self.slices.len());
        for spec in &self.slices {
            match &spec.model {
                SliceModel::Markov { states, transition } => {
                    parts.push((states.clone(), transition.clone()));
                }
                _ => return Ok(None),
            }
        }
        MarkovDemandModel::from_parts(parts).map(Some)
    }
}
