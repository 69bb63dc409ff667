//! Overlap generators for two concrete seeds on the line: the indicator of
//! `[0, a)` under integer shifts, and the dyadic dilation of a normalized
//! vector.

use num_complex::Complex64;
use serde::Serialize;

use crate::core1d::OverlapSequence1D;
use crate::error::{invalid, Result};
use crate::torus::CenteredSeq;

/// Default dilation truncation; `2^{-J/2}` is below `1e-14` from here on.
pub const DEFAULT_DILATION_HALF_WIDTH: usize = 96;

/// Indicator of `[0, a)` translated by integers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoxSeed {
    pub a: f64,
}

impl BoxSeed {
    pub fn new(a: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(invalid("a", format!("box width must be positive, got {a}")));
        }
        Ok(Self { a })
    }

    /// Largest `|j|` with a nonzero overlap.
    pub fn support_radius(&self) -> usize {
        (self.a.ceil() as usize).saturating_sub(1)
    }
}

/// Dyadic dilation seed, truncated at `|j| <= half_width`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DilationSeed {
    #[serde(rename = "J")]
    pub half_width: usize,
}

impl DilationSeed {
    pub fn new(half_width: usize) -> Result<Self> {
        if half_width == 0 {
            return Err(invalid("J", "dilation truncation must be at least 1"));
        }
        Ok(Self { half_width })
    }

    /// Bound on `sup_p |α_J(p) - α(p)|` from the discarded geometric tail.
    pub fn tail_bound(&self) -> f64 {
        2.0 * 2f64.powf(-(self.half_width as f64) / 2.0) / (1.0 - 0.5f64.sqrt())
    }
}

impl Default for DilationSeed {
    fn default() -> Self {
        Self {
            half_width: DEFAULT_DILATION_HALF_WIDTH,
        }
    }
}

/// `a_j = max(0, a - |j|)`, the length of `[0,a) ∩ [j, j+a)`. Not normalized
/// unless `a = 1`.
pub fn box_overlaps(seed: BoxSeed) -> OverlapSequence1D {
    let values = CenteredSeq::from_fn(seed.support_radius(), |j| {
        Complex64::new((seed.a - j.abs() as f64).max(0.0), 0.0)
    });
    OverlapSequence1D::new_raw(values).expect("box overlaps are even with a_0 = a > 0")
}

/// `a_j = 2^{-|j|/2}` for `|j| <= J`, flagged as truncated.
pub fn dilation_overlaps(seed: DilationSeed) -> OverlapSequence1D {
    let values = CenteredSeq::from_fn(seed.half_width, |j| {
        Complex64::new(2f64.powf(-(j.abs() as f64) / 2.0), 0.0)
    });
    OverlapSequence1D::new(values)
        .expect("dilation overlaps are even with a_0 = 1")
        .into_truncated()
}

/// Untruncated dilation density `1 / (3 - 2^{3/2} cos p)`.
pub fn dilation_density_closed(p: f64) -> f64 {
    1.0 / (3.0 - 2f64.powf(1.5) * p.cos())
}
