use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::{coherent_overlap, gram_2d, norm_condition, xl_symbol_residual, DEFAULT_BOUND_GRID};
use crate::error::{invalid, Result};
use crate::torus::CenteredGrid2D;

/// The four nearest neighbours of the origin.
pub const NEAREST_NEIGHBOURS: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

/// First-order approximants of `X_L` and its inverse, both supported on the
/// origin and its four neighbours.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Perturbative2D {
    #[serde(rename = "L")]
    pub l: u32,
    pub c: CenteredGrid2D,
    pub inverse: CenteredGrid2D,
    /// Set for `L = 1`, where the expansion parameter is not small.
    pub flagged: bool,
}

/// `c_0 = 1`, `c_k = -½ I_k` on the neighbours; the inverse flips the sign.
pub fn perturbative_coeffs(l: u32) -> Result<Perturbative2D> {
    if l == 0 {
        return Err(invalid("L", "lattice parameter must be at least 1"));
    }
    let mut c = CenteredGrid2D::delta(1);
    let mut inverse = CenteredGrid2D::delta(1);
    for &(k1, k2) in &NEAREST_NEIGHBOURS {
        let half = 0.5 * coherent_overlap((k1, k2), l);
        c.set(k1, k2, Complex64::new(-half, 0.0));
        inverse.set(k1, k2, Complex64::new(half, 0.0));
    }
    Ok(Perturbative2D {
        l,
        c,
        inverse,
        flagged: l == 1,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PerturbativeDiagnostics {
    #[serde(rename = "L")]
    pub l: u32,
    pub norm_sq: f64,
    /// `1 - 3 e^{-πL}`, the leading-order estimate of `norm_sq`.
    pub norm_sq_estimate: f64,
    pub neighbor_overlap: f64,
    pub inverse_residual: f64,
    /// `4 e^{-πL}`.
    pub inverse_residual_bound: f64,
    /// The bound is too weak to say anything at `L = 1`.
    pub inconclusive: bool,
}

pub fn perturbative_diagnostics(l: u32) -> Result<PerturbativeDiagnostics> {
    perturbative_diagnostics_on(l, DEFAULT_BOUND_GRID)
}

pub fn perturbative_diagnostics_on(l: u32, grid_size: usize) -> Result<PerturbativeDiagnostics> {
    let p = perturbative_coeffs(l)?;
    let gram = gram_2d(&p.c, l, 1);
    let lf = l as f64;
    Ok(PerturbativeDiagnostics {
        l,
        norm_sq: norm_condition(&p.c, l),
        norm_sq_estimate: 1.0 - 3.0 * (-PI * lf).exp(),
        neighbor_overlap: gram.entries.get(1, 0).norm(),
        inverse_residual: xl_symbol_residual(&p.c, &p.inverse, grid_size),
        inverse_residual_bound: 4.0 * (-PI * lf).exp(),
        inconclusive: l == 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_values() {
        let p2 = perturbative_coeffs(2).unwrap();
        assert!((p2.c.get(1, 0).re + 0.5 * (-PI).exp()).abs() < 1e-16);
        assert!((p2.c.get(1, 0).re + 0.0216070).abs() < 1e-7);
        assert_eq!(p2.c.support().len(), 5);
        assert!(!p2.flagged);
        let p4 = perturbative_coeffs(4).unwrap();
        assert!((p4.c.get(0, 1).re + 9.33721e-4).abs() < 1e-9);
        assert!(perturbative_coeffs(1).unwrap().flagged);
    }

    #[test]
    fn inverse_residual_equals_bound() {
        // x·y - 1 = -(ε/2)² K², maximal where K = ±4.
        for l in 1..=4 {
            let d = perturbative_diagnostics_on(l, 64).unwrap();
            assert!((d.inverse_residual - d.inverse_residual_bound).abs() < 1e-14);
        }
        let d1 = perturbative_diagnostics_on(1, 64).unwrap();
        assert!(d1.inconclusive);
        assert!((d1.inverse_residual_bound - 0.17285).abs() < 1e-5);
    }
}
