//! The coherent-state lattice with cell area `a² = 2πL`.
//!
//! The translates `φ_n` of the vacuum have overlaps `I_n` whose double
//! Fourier series `F_L` plays the role of the 1-D density. `F_L` is bounded
//! away from zero for every `L >= 2` and vanishes at `(π, π)` for `L = 1`,
//! which is where the construction breaks down.

mod coefficients;
mod density;
mod perturbative;
mod theta;

pub use coefficients::*;
pub use density::*;
pub use perturbative::*;
pub use theta::*;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::numeric::parity_sign;

/// Default radius for direct lattice sums; `e^{-(π/2) R²} < 1e-24` at `R = 6`.
pub const DEFAULT_SUM_RADIUS: usize = 6;
pub const DEFAULT_COEFF_GRID: usize = 64;
pub const DEFAULT_COEFF_RADIUS: usize = 6;
pub const DEFAULT_BOUND_GRID: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeModel2D {
    #[serde(rename = "L")]
    pub l: u32,
    #[serde(rename = "R")]
    pub sum_radius: usize,
}

impl LatticeModel2D {
    pub fn new(l: u32, sum_radius: usize) -> Result<Self> {
        if l == 0 {
            return Err(invalid("L", "lattice parameter must be at least 1"));
        }
        if sum_radius == 0 {
            return Err(invalid("R", "truncation radius must be at least 1"));
        }
        Ok(Self { l, sum_radius })
    }

    pub fn with_default_radius(l: u32) -> Result<Self> {
        Self::new(l, DEFAULT_SUM_RADIUS)
    }

    /// Lattice constant `a = sqrt(2πL)`.
    pub fn spacing(&self) -> f64 {
        (std::f64::consts::TAU * self.l as f64).sqrt()
    }

    pub fn overlap(&self, n: (i64, i64)) -> f64 {
        coherent_overlap(n, self.l)
    }

    pub fn density(&self, p1: f64, p2: f64) -> f64 {
        f_direct(p1, p2, self.l, self.sum_radius)
    }
}

/// `I_n = <φ_n, φ_0> = (-1)^{L n1 n2} e^{-(π/2) L |n|²}`.
pub fn coherent_overlap(n: (i64, i64), l: u32) -> f64 {
    let (n1, n2) = n;
    let l = l as i64;
    parity_sign(l * n1 * n2) * (-std::f64::consts::FRAC_PI_2 * l as f64 * (n1 * n1 + n2 * n2) as f64).exp()
}
