//! On-off traffic sources: a population of users that alternate between
//! heavy-tailed active periods and exponential idle periods, each pushing a
//! constant bit rate while active.
//!
//! Per slot, the slice demand is `ceil(active_users * rate_bps * slot_s /
//! bits_per_prb)` clipped at the system bandwidth. Duration residuals are
//! carried across slots in fractional form so that the long-run active
//! fraction converges to `active_mean_s / (active_mean_s + idle_mean_s)`
//! without per-period rounding bias.

use super::{slice_rng, DemandError, DemandTrace, TraceParams};
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

fn default_pareto_shape() -> f64 {
    1.5
}

/// Parameters of one on-off slice.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct OnOffSourceSpec {
    /// Number of independent users in the slice.
    pub user_count: u32,
    /// Mean active-period duration in seconds (Pareto distributed).
    pub active_mean_s: f64,
    /// Mean idle-period duration in seconds (exponential); zero keeps every
    /// user permanently active.
    pub idle_mean_s: f64,
    /// Pareto tail exponent of the active duration; must exceed 1 so the
    /// mean exists.
    #[serde(default = "default_pareto_shape")]
    pub pareto_shape: f64,
    /// Per-user bit rate while active.
    pub rate_bps: f64,
    /// Nominal packet size in bytes. Descriptive: demand aggregation works
    /// at rate granularity, but the packet size documents what the rate is
    /// made of and is validated for plausibility.
    pub packet_bytes: u32,
    /// PRB payload in bits; converts aggregate bits per slot into PRBs.
    pub bits_per_prb: u32,
}

impl OnOffSourceSpec {
    pub fn validate(&self) -> Result<(), DemandError> {
        let bad = |name: &'static str, value: f64, reason: &'static str| {
            Err(DemandError::InvalidParameter {
                name,
                value,
                reason,
            })
        };
        if self.user_count == 0 {
            return bad("user_count", 0.0, "need at least one user");
        }
        if !self.active_mean_s.is_finite() || self.active_mean_s <= 0.0 {
            return bad(
                "active_mean_s",
                self.active_mean_s,
                "active mean must be positive",
            );
        }
        if !self.idle_mean_s.is_finite() || self.idle_mean_s < 0.0 {
            return bad(
                "idle_mean_s",
                self.idle_mean_s,
                "idle mean must be nonnegative",
            );
        }
        if !self.pareto_shape.is_finite() || self.pareto_shape <= 1.0 {
            return bad(
                "pareto_shape",
                self.pareto_shape,
                "shape must exceed 1 for a finite mean",
            );
        }
        if !self.rate_bps.is_finite() || self.rate_bps <= 0.0 {
            return bad("rate_bps", self.rate_bps, "rate must be positive");
        }
        if self.packet_bytes == 0 {
            return bad("packet_bytes", 0.0, "packet size must be positive");
        }
        if self.bits_per_prb == 0 {
            return bad("bits_per_prb", 0.0, "PRB payload must be positive");
        }
        Ok(())
    }

    /// Long-run fraction of time one user spends active.
    pub fn active_fraction(&self) -> f64 {
        self.active_mean_s / (self.active_mean_s + self.idle_mean_s)
    }

    /// Generates one slice column plus the measured fraction of user-slots
    /// spent active (for calibration against [`active_fraction`]).
    ///
    /// [`active_fraction`]: Self::active_fraction
    pub fn generate_column_with_stats(
        &self,
        params: &TraceParams,
        rng: &mut ChaCha8Rng,
    ) -> Result<(Vec<u32>, f64), DemandError> {
        self.validate()?;
        if params.horizon == 0 {
            return Err(DemandError::EmptyTrace);
        }
        let slots_per_s = 1000.0 / params.slot_ms;
        // Pareto scale chosen so the mean comes out at active_mean_s.
        let active_scale = self.active_mean_s * (self.pareto_shape - 1.0) / self.pareto_shape;
        let active_dist = rand_distr::Pareto::new(active_scale, self.pareto_shape).unwrap();
        let idle_dist = if self.idle_mean_s > 0.0 {
            Some(rand_distr::Exp::new(1.0 / self.idle_mean_s).unwrap())
        } else {
            None
        };
        let bits_per_user_slot = self.rate_bps * params.slot_ms / 1000.0;

        struct User {
            active: bool,
            remaining_slots: f64,
        }
        let frac = self.active_fraction();
        let mut users: Vec<User> = (0..self.user_count)
            .map(|_| {
                let active = rand::Rng::random::<f64>(rng) < frac;
                let dur_s = if active {
                    active_dist.sample(rng)
                } else {
                    idle_dist.map_or(0.0, |d| d.sample(rng))
                };
                User {
                    active,
                    remaining_slots: dur_s * slots_per_s,
                }
            })
            .collect();

        let mut col = Vec::with_capacity(params.horizon);
        let mut active_user_slots: u64 = 0;
        for _ in 0..params.horizon {
            let mut active_now = 0u64;
            for u in users.iter_mut() {
                // Settle expirations before counting this slot; idle periods
                // of zero length collapse immediately back to active.
                while u.remaining_slots <= 0.0 {
                    u.active = !u.active;
                    let dur_s = if u.active {
                        active_dist.sample(rng)
                    } else {
                        match idle_dist {
                            Some(d) => d.sample(rng),
                            None => {
                                u.active = true;
                                active_dist.sample(rng)
                            }
                        }
                    };
                    u.remaining_slots += dur_s * slots_per_s;
                }
                if u.active {
                    active_now += 1;
                }
                u.remaining_slots -= 1.0;
            }
            active_user_slots += active_now;
            let bits = active_now as f64 * bits_per_user_slot;
            let prbs = (bits / self.bits_per_prb as f64).ceil() as u32;
            col.push(prbs.min(params.system_bandwidth));
        }
        let measured = active_user_slots as f64 / (params.horizon as u64 * self.user_count as u64) as f64;
        Ok((col, measured))
    }

    /// Single-slice convenience wrapper producing a full trace.
    pub fn generate(&self, params: &TraceParams) -> Result<DemandTrace, DemandError> {
        let mut rng = slice_rng(params.seed, 0);
        let (col, _) = self.generate_column_with_stats(params, &mut rng)?;
        DemandTrace::from_columns(params.slot_ms, params.seed, vec![col])
    }
}
