//! Simplified web-browsing traffic: each user cycles through downloading a
//! page's objects, parsing between objects, and reading before the next
//! page.
//!
//! While downloading, a user asks each slot for all PRBs still needed for
//! the current object (capped at the system bandwidth), so small objects
//! arrive as one-slot bursts and large ones stretch over several slots.
//! Parsing and reading are idle phases. Users start at random points of a
//! reading phase so page starts are not synchronized across the population.

use super::{slice_rng, DemandError, DemandTrace, Dist, TraceParams};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Bounds applied to sampled page parameters before use. They keep
/// heavy-tailed size distributions from producing nonsensical pages.
const MAX_OBJECT_BYTES: f64 = 1e8;
const MAX_OBJECTS_PER_PAGE: f64 = 10_000.0;
/// Cap on the random initial reading offset, in seconds. The offset only
/// desynchronizes users, so it never needs to exceed a few page cycles.
const MAX_INITIAL_OFFSET_S: f64 = 30.0;

/// Parameters of one web-browsing slice.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct WebBrowsingSpec {
    pub user_count: u32,
    /// Size of one page object in bytes.
    pub object_size_bytes: Dist,
    /// Objects fetched per page; samples are rounded and clamped to >= 1.
    pub objects_per_page: Dist,
    /// Idle gap between objects of the same page, in seconds.
    pub parsing_time_s: Dist,
    /// Idle gap between pages, in seconds.
    pub reading_time_s: Dist,
    /// PRB payload in bits.
    pub bits_per_prb: u32,
}

impl WebBrowsingSpec {
    /// Defaults shaped like the classic HTTP traffic mix: log-normal object
    /// sizes around 11 kB with a heavy tail, a handful of objects per page,
    /// sub-second parsing, and seconds-scale reading.
    pub fn with_users(user_count: u32) -> Self {
        WebBrowsingSpec {
            user_count,
            object_size_bytes: Dist::LogNormal {
                mu_log: 8.37,
                sigma_log: 1.37,
            },
            objects_per_page: Dist::Pareto {
                scale: 2.0,
                shape: 1.5,
            },
            parsing_time_s: Dist::Exponential { mean: 0.13 },
            reading_time_s: Dist::Exponential { mean: 5.0 },
            bits_per_prb: 1_000,
        }
    }

    pub fn validate(&self) -> Result<(), DemandError> {
        if self.user_count == 0 {
            return Err(DemandError::InvalidParameter {
                name: "user_count",
                value: 0.0,
                reason: "need at least one user",
            });
        }
        if self.bits_per_prb == 0 {
            return Err(DemandError::InvalidParameter {
                name: "bits_per_prb",
                value: 0.0,
                reason: "PRB payload must be positive",
            });
        }
        self.object_size_bytes.validate("object_size_bytes")?;
        self.objects_per_page.validate("objects_per_page")?;
        self.parsing_time_s.validate("parsing_time_s")?;
        self.reading_time_s.validate("reading_time_s")?;
        Ok(())
    }

    pub fn generate_column(
        &self,
        params: &TraceParams,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<u32>, DemandError> {
        self.validate()?;
        if params.horizon == 0 {
            return Err(DemandError::EmptyTrace);
        }
        let slots_per_s = 1000.0 / params.slot_ms;

        enum Phase {
            /// Bits still owed for the current object, and objects left in
            /// the page after it.
            Download { remaining_bits: f64, left: u32 },
            /// Idle slots left, and objects left to download afterwards.
            Parse { slots: f64, left: u32 },
            /// Idle slots left before the next page.
            Read { slots: f64 },
        }

        let sample_object = |rng: &mut ChaCha8Rng, spec: &WebBrowsingSpec| -> f64 {
            let bytes = spec
                .object_size_bytes
                .sample(rng)
                .clamp(1.0, MAX_OBJECT_BYTES);
            bytes * 8.0
        };
        let sample_page_len = |rng: &mut ChaCha8Rng, spec: &WebBrowsingSpec| -> u32 {
            spec.objects_per_page
                .sample(rng)
                .round()
                .clamp(1.0, MAX_OBJECTS_PER_PAGE) as u32
        };

        let mut users: Vec<Phase> = (0..self.user_count)
            .map(|_| {
                let offset_s = rng
                    .random_range(0.0..self.reading_time_s.mean().clamp(1e-3, MAX_INITIAL_OFFSET_S));
                Phase::Read {
                    slots: offset_s * slots_per_s,
                }
            })
            .collect();

        let mut col = Vec::with_capacity(params.horizon);
        for _ in 0..params.horizon {
            let mut slice_prbs: u64 = 0;
            for phase in users.iter_mut() {
                loop {
                    match phase {
                        Phase::Download {
                            remaining_bits,
                            left,
                        } => {
                            let want =
                                (*remaining_bits / self.bits_per_prb as f64).ceil() as u64;
                            let granted = want.min(params.system_bandwidth as u64);
                            slice_prbs += granted;
                            *remaining_bits -= (granted * self.bits_per_prb as u64) as f64;
                            if *remaining_bits <= 0.0 {
                                *phase = if *left > 0 {
                                    Phase::Parse {
                                        slots: self.parsing_time_s.sample(rng) * slots_per_s,
                                        left: *left - 1,
                                    }
                                } else {
                                    Phase::Read {
                                        slots: self.reading_time_s.sample(rng) * slots_per_s,
                                    }
                                };
                            }
                            break;
                        }
                        Phase::Parse { slots, left } => {
                            if *slots > 0.0 {
                                *slots -= 1.0;
                                break;
                            }
                            *phase = Phase::Download {
                                remaining_bits: sample_object(rng, self),
                                left: *left,
                            };
                        }
                        Phase::Read { slots } => {
                            if *slots > 0.0 {
                                *slots -= 1.0;
                                break;
                            }
                            let total = sample_page_len(rng, self);
                            *phase = Phase::Download {
                                remaining_bits: sample_object(rng, self),
                                left: total - 1,
                            };
                        }
                    }
                }
            }
            col.push((slice_prbs.min(params.system_bandwidth as u64)) as u32);
        }
        Ok(col)
    }

    /// Single-slice convenience wrapper producing a full trace.
    pub fn generate(&self, params: &TraceParams) -> Result<DemandTrace, DemandError> {
        let mut rng = slice_rng(params.seed, 0);
        let col = self.generate_column(params, &mut rng)?;
        DemandTrace::from_columns(params.slot_ms, params.seed, vec![col])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_pages() -> WebBrowsingSpec {
        WebBrowsingSpec {
            user_count: 1,
            object_size_bytes: Dist::Constant { value: 125.0 },
            objects_per_page: Dist::Constant { value: 1.0 },
            parsing_time_s: Dist::Constant { value: 0.01 },
            reading_time_s: Dist::Constant { value: 0.05 },
            bits_per_prb: 1_000,
        }
    }

    #[test]
    fn one_kilobit_objects_burst_one_prb_slot() {
        let params = TraceParams {
            horizon: 20_000,
            seed: 5,
            ..TraceParams::default()
        };
        let trace = tiny_pages().generate(&params).unwrap();
        let col = trace.column(0);
        // 125 bytes = 1000 bits = exactly one PRB, so each page is a burst
        // of exactly one 1-PRB slot.
        assert!(col.iter().all(|&v| v <= 1));
        let pages: usize = col.iter().filter(|&&v| v == 1).count();
        // ~0.06 s cycle per page over 20 s of trace.
        assert!(pages > 100, "only {pages} pages in the trace");
    }

    #[test]
    fn infinite_reading_stops_after_first_page() {
        let spec = WebBrowsingSpec {
            reading_time_s: Dist::Constant { value: 1e15 },
            ..tiny_pages()
        };
        let params = TraceParams {
            horizon: 60_000,
            seed: 9,
            ..TraceParams::default()
        };
        let col = spec.generate(&params).unwrap().column(0);
        let first = col.iter().position(|&v| v > 0);
        let last = col.iter().rposition(|&v| v > 0);
        // The initial offset is capped at 30 s, so the single page fires
        // within the horizon and nothing follows it.
        let (first, last) = (first.expect("page never started"), last.unwrap());
        assert_eq!(first, last, "a second page appeared");
    }

    #[test]
    fn large_objects_spread_over_slots() {
        let spec = WebBrowsingSpec {
            // 50 kB = 400 kbits = 400 PRBs: four slots at a 100-PRB cap.
            object_size_bytes: Dist::Constant { value: 50_000.0 },
            ..tiny_pages()
        };
        let params = TraceParams {
            horizon: 40_000,
            seed: 13,
            system_bandwidth: 100,
            ..TraceParams::default()
        };
        let col = spec.generate(&params).unwrap().column(0);
        assert!(col.contains(&100), "no capped slot seen");
        assert!(col.iter().all(|&v| v <= 100));
    }

    #[test]
    fn zero_users_rejected() {
        let spec = WebBrowsingSpec {
            user_count: 0,
            ..tiny_pages()
        };
        assert!(spec.validate().is_err());
    }
}
