//! Per-slice service-level targets.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SlaError {
    #[error("no slices in the service-level specification")]
    Empty,
    #[error("availability and isolation vectors differ in length: {p_h} vs {p_l}")]
    LengthMismatch { p_h: usize, p_l: usize },
    #[error("slice {slice}: {name} target {value} is outside [0, 1]")]
    OutOfRange {
        slice: usize,
        name: &'static str,
        value: f64,
    },
    #[error("slice {slice}: isolation degree {p_l} exceeds availability target {p_h}")]
    IsolationAboveAvailability { slice: usize, p_l: f64, p_h: f64 },
}

/// Availability targets `p_h` and isolation degrees `p_l`, one pair per
/// slice. Isolation never exceeds availability: the isolated fraction of
/// slots counts toward availability, so a larger `p_l` would promise less
/// than it isolates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlaSpec {
    pub p_h: Vec<f64>,
    pub p_l: Vec<f64>,
}

impl SlaSpec {
    pub fn new(p_h: Vec<f64>, p_l: Vec<f64>) -> Result<Self, SlaError> {
        let spec = SlaSpec { p_h, p_l };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks ranges and the pairing invariant; useful after deserializing.
    pub fn validate(&self) -> Result<(), SlaError> {
        if self.p_h.is_empty() {
            return Err(SlaError::Empty);
        }
        if self.p_h.len() != self.p_l.len() {
            return Err(SlaError::LengthMismatch {
                p_h: self.p_h.len(),
                p_l: self.p_l.len(),
            });
        }
        for (i, (&h, &l)) in self.p_h.iter().zip(&self.p_l).enumerate() {
            for (name, value) in [("availability", h), ("isolation", l)] {
                if !(0.0..=1.0).contains(&value) || !value.is_finite() {
                    return Err(SlaError::OutOfRange {
                        slice: i,
                        name,
                        value,
                    });
                }
            }
            if l > h {
                return Err(SlaError::IsolationAboveAvailability {
                    slice: i,
                    p_l: l,
                    p_h: h,
                });
            }
        }
        Ok(())
    }

    pub fn slice_count(&self) -> usize {
        self.p_h.len()
    }
}
