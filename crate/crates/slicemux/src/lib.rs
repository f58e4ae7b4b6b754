//! Bandwidth provisioning and deficit-based multiplexing for sliced radio
//! access networks.
//!
//! A slice is a tenant with a per-slot bandwidth demand (in physical resource
//! blocks, PRBs) and a two-sided service agreement: an availability degree
//! (fraction of slots in which its demand must be fully met) and an isolation
//! degree (fraction of slots that must be covered by bandwidth reserved for
//! that slice alone, immune to the other tenants' behavior). The operator
//! provisions a dedicated floor per slice plus one shared pool multiplexed
//! across slices; the goal is the cheapest provisioning that honors every
//! agreement.
//!
//! The pipeline, end to end:
//!
//! 1. [`demand`] generates per-slot demand traces: ergodic Markov chains,
//!    on-off packet sources, and a simplified web-browsing renewal process.
//! 2. [`stats`] builds per-slice empirical distributions and turns the
//!    isolation degree into a dedicated floor (the smallest bandwidth whose
//!    demand quantile reaches the target).
//! 3. [`scheduler`] runs the deficit-driven max-weight policy on the excess
//!    demand above the floors: each slot solves an exact 0/1 knapsack that
//!    favors the slices furthest behind their availability targets.
//! 4. [`provision`] binary searches the smallest shared pool under which the
//!    scheduler meets every target, and sweeps the isolation grid to map the
//!    efficiency/isolation tradeoff.
//! 5. [`oracle`] provides the baselines that keep the scheduler honest: a
//!    stationary LP over the joint excess distribution, a non-causal offline
//!    optimum solved by branch and bound, and an exact expected-drift check
//!    for the deficit dynamics.
//! 6. [`equivalence`] verifies the reformulation steps that justify
//!    provisioning at exactly the isolation floor.
//!
//! [`lp`] is the in-crate dense simplex solver backing the oracle module, and
//! [`validate`] bundles the self-checks behind `slicemux validate`.
//!
//! # Examples directory
//!
//! The primary interface of this crate is the `examples/` directory; each
//! file is a runnable walkthrough of one capability:
//!
//! ```text
//! cargo run --example generate_traces      # demand models and windowed maxima
//! cargo run --example isolation_floors     # quantile floors from a trace
//! cargo run --example max_weight_schedule  # deficit scheduler on a hand trace
//! cargo run --example provision_plan       # full plan for a two-slice scenario
//! cargo run --example tradeoff_sweep       # isolation grid and savings
//! cargo run --example oracle_baselines     # stationary LP and offline optimum
//! cargo run --example drift_diagnostics    # expected-drift certificates
//! cargo run --example equivalence_checks   # floor-lifting property suite
//! cargo run --example scheduler_bench      # per-slot solve timing
//! ```
//!
//! A thin `slicemux` binary wraps the same library calls for batch use
//! (subcommands `trace`, `stats`, `provision`, `sweep`, `oracle`, `bench`,
//! `validate`); see the repository README for file formats and exit codes.

pub mod bench;
pub mod cli;
pub mod demand;
pub mod equivalence;
mod linalg;
pub mod lp;
pub mod oracle;
pub mod provision;
pub mod scheduler;
pub mod sla;
pub mod stats;
pub mod validate;

pub use demand::DemandTrace;
pub use sla::SlaSpec;
