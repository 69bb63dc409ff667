use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use super::{coherent_overlap, theta3_at, DEFAULT_SUM_RADIUS};
use crate::error::Result;
use crate::numeric::{pairwise_sum, torus_nodes};
use crate::torus::TorusFunction2D;

/// `F_L(P) = Σ_{‖m‖∞ <= R} I_m e^{i P·m}`. The overlaps are even in `m`, so
/// pairing `±m` leaves the cosine sum.
pub fn f_direct(p1: f64, p2: f64, l: u32, radius: usize) -> f64 {
    let r = radius as i64;
    let terms: Vec<f64> = (-r..=r)
        .flat_map(|m1| (-r..=r).map(move |m2| (m1, m2)))
        .map(|(m1, m2)| coherent_overlap((m1, m2), l) * (p1 * m1 as f64 + p2 * m2 as f64).cos())
        .collect();
    pairwise_sum(&terms)
}

/// Theta-function form of `F_L`: the sum split by the parity of `m2`.
pub fn f_theta_complex(p1: f64, p2: f64, l: u32) -> Result<Complex64> {
    let lf = l as f64;
    let q = (-FRAC_PI_2 * lf).exp();
    let q4 = (-2.0 * PI * lf).exp();
    let even = theta3_at(Complex64::new(p1 / 2.0, 0.0), q)? * theta3_at(Complex64::new(p2, 0.0), q4)?;
    let odd_prefactor = Complex64::from_polar((-FRAC_PI_2 * lf).exp(), p2);
    let odd = odd_prefactor
        * theta3_at(Complex64::new((p1 + PI * lf) / 2.0, 0.0), q)?
        * theta3_at(Complex64::new(p2, PI * lf), q4)?;
    Ok(even + odd)
}

pub fn f_theta(p1: f64, p2: f64, l: u32) -> Result<f64> {
    Ok(f_theta_complex(p1, p2, l)?.re)
}

/// One-dimensional Gaussian series `u_n = e^{-(π/2) L n²} e^{i n P}` split by
/// the parity of `n`: returns `(Σ_even, Σ_odd)`.
fn parity_split_series(p: f64, l: u32, radius: usize) -> (Complex64, Complex64) {
    let r = radius as i64;
    let mut even = Vec::new();
    let mut odd = Vec::new();
    for n in -r..=r {
        let term = Complex64::from_polar((-FRAC_PI_2 * l as f64 * (n * n) as f64).exp(), n as f64 * p);
        if n % 2 == 0 {
            even.push(term);
        } else {
            odd.push(term);
        }
    }
    (pairwise_sum(&even), pairwise_sum(&odd))
}

/// Product of two single theta series with the phase `(-1)^{L n m}` applied
/// to each `(n, m)` term. For even `L` the phase is trivial; for odd `L` only
/// the odd-odd block changes sign.
pub fn f_phase_product_complex(p1: f64, p2: f64, l: u32, radius: usize) -> Complex64 {
    let (ue, uo) = parity_split_series(p1, l, radius);
    let (ve, vo) = parity_split_series(p2, l, radius);
    if l.is_multiple_of(2) {
        (ue + uo) * (ve + vo)
    } else {
        (ue * ve - uo * vo) + (ue * vo + uo * ve)
    }
}

pub fn f_phase_product(p1: f64, p2: f64, l: u32, radius: usize) -> f64 {
    f_phase_product_complex(p1, p2, l, radius).re
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityRoute {
    Direct,
    Theta,
    PhaseProduct,
}

/// `F_L` sampled on an `M × M` grid.
pub fn density_grid(l: u32, grid_size: usize, offset: bool) -> TorusFunction2D {
    let r = DEFAULT_SUM_RADIUS as i64;
    let nodes = torus_nodes(grid_size, offset);
    // phase[i][m + R] = e^{i p_i m}
    let phase: Vec<Vec<Complex64>> = nodes
        .iter()
        .map(|&p| (-r..=r).map(|m| Complex64::from_polar(1.0, p * m as f64)).collect())
        .collect();
    let side = (2 * r + 1) as usize;
    let weights: Vec<f64> = (-r..=r)
        .flat_map(|m1| (-r..=r).map(move |m2| coherent_overlap((m1, m2), l)))
        .collect();
    let mut samples = Vec::with_capacity(grid_size * grid_size);
    let mut terms = vec![0.0; side * side];
    for e1 in &phase {
        for e2 in &phase {
            for (a, t) in terms.chunks_mut(side).enumerate() {
                for (b, slot) in t.iter_mut().enumerate() {
                    *slot = weights[a * side + b] * (e1[a] * e2[b]).re;
                }
            }
            samples.push(Complex64::new(pairwise_sum(&terms), 0.0));
        }
    }
    TorusFunction2D {
        grid_size,
        samples,
        offset_flag: offset,
    }
}

/// `F_L` on the grid through any of the three evaluation routes.
pub fn density_grid_route(route: DensityRoute, l: u32, grid_size: usize, offset: bool) -> Result<TorusFunction2D> {
    if route == DensityRoute::Direct {
        return Ok(density_grid(l, grid_size, offset));
    }
    let nodes = torus_nodes(grid_size, offset);
    let mut samples = Vec::with_capacity(grid_size * grid_size);
    for &p1 in &nodes {
        for &p2 in &nodes {
            let v = match route {
                DensityRoute::Theta => f_theta_complex(p1, p2, l)?,
                _ => f_phase_product_complex(p1, p2, l, DEFAULT_SUM_RADIUS),
            };
            samples.push(v);
        }
    }
    Ok(TorusFunction2D {
        grid_size,
        samples,
        offset_flag: offset,
    })
}

/// `θ₃(0, e^{-πL/2})² - 1`, the bound on `|F_L - 1|` from dropping all signs.
pub fn f_deviation_bound(l: u32) -> Result<f64> {
    let t = theta3_at(Complex64::default(), (-FRAC_PI_2 * l as f64).exp())?;
    Ok(t.re * t.re - 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FBoundReport {
    #[serde(rename = "L")]
    pub l: u32,
    pub bound: f64,
    pub grid_size: usize,
    pub grid_sup: f64,
    pub min_value: f64,
    pub argmin: (f64, f64),
    pub certified: bool,
}

pub fn f_bound_report(l: u32, grid_size: usize) -> Result<FBoundReport> {
    let bound = f_deviation_bound(l)?;
    let grid = density_grid(l, grid_size, false);
    let grid_sup = grid.sup_abs_minus_one();
    let (min_value, argmin) = grid.min_real();
    Ok(FBoundReport {
        l,
        bound,
        grid_size,
        grid_sup,
        min_value,
        argmin,
        certified: grid_sup <= bound,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThreeRouteReport {
    #[serde(rename = "L")]
    pub l: u32,
    pub grid_size: usize,
    pub max_theta_diff: f64,
    pub max_phase_product_diff: f64,
    /// Largest imaginary part produced by the theta route.
    pub max_theta_imag: f64,
}

pub fn three_route_report(l: u32, grid_size: usize) -> Result<ThreeRouteReport> {
    let direct = density_grid(l, grid_size, false);
    let theta = density_grid_route(DensityRoute::Theta, l, grid_size, false)?;
    let product = density_grid_route(DensityRoute::PhaseProduct, l, grid_size, false)?;
    let max_diff = |other: &TorusFunction2D| {
        direct
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a.re - b.re).abs())
            .fold(0.0, f64::max)
    };
    Ok(ThreeRouteReport {
        l,
        grid_size,
        max_theta_diff: max_diff(&theta),
        max_phase_product_diff: max_diff(&product),
        max_theta_imag: theta.max_imag(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_zero() {
        assert!(f_direct(PI, PI, 1, 6).abs() < 1e-10);
        assert!(f_theta(PI, PI, 1).unwrap().abs() < 1e-10);
        assert!(f_phase_product(PI, PI, 1, 6).abs() < 1e-10);
    }

    #[test]
    fn routes_agree_at_points() {
        for l in 1..=4 {
            for &(p1, p2) in &[(0.0, 0.0), (0.3, 2.1), (PI, 0.5), (5.9, 4.4)] {
                let d = f_direct(p1, p2, l, 6);
                assert!((d - f_theta(p1, p2, l).unwrap()).abs() < 1e-12);
                assert!((d - f_phase_product(p1, p2, l, 6)).abs() < 1e-12);
                assert!(f_theta_complex(p1, p2, l).unwrap().im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn origin_value_l2() {
        // Even L: the sum factorizes as θ₃(0, e^{-π})².
        let t = theta3_at(Complex64::default(), (-PI).exp()).unwrap().re;
        assert!((f_direct(0.0, 0.0, 2, 6) - t * t).abs() < 1e-14);
    }

    #[test]
    fn grid_matches_pointwise() {
        let g = density_grid(3, 16, true);
        for m1 in 0..16 {
            for m2 in 0..16 {
                let v = f_direct(g.node(m1), g.node(m2), 3, 6);
                assert!((g.at(m1, m2).re - v).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn l3_stays_in_band() {
        let rep = f_bound_report(3, 64).unwrap();
        assert!(rep.certified);
        assert!(rep.min_value >= 1.0 - 0.036256);
    }
}
