//! Summation and grid helpers shared by the 1-D and 2-D engines.
//!
//! All reductions go through [`pairwise_sum`] so that results do not depend
//! on evaluation order beyond the fixed binary splitting.

use std::f64::consts::TAU;

use num_complex::Complex64;

const PAIRWISE_LEAF: usize = 32;

/// Pairwise (cascade) summation; error grows like O(log n) instead of O(n).
pub fn pairwise_sum<T>(values: &[T]) -> T
where
    T: Copy + Default + std::ops::Add<Output = T>,
{
    if values.len() <= PAIRWISE_LEAF {
        return values.iter().fold(T::default(), |acc, &v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Mean over a slice using pairwise summation.
pub fn pairwise_mean(values: &[Complex64]) -> Complex64 {
    pairwise_sum(values) / values.len() as f64
}

/// Grid node `m` on `[0, 2π)` with `size` points, optionally shifted by half a step.
#[inline]
pub fn torus_node(m: usize, size: usize, offset: bool) -> f64 {
    let shift = if offset { 0.5 } else { 0.0 };
    TAU * (m as f64 + shift) / size as f64
}

pub fn torus_nodes(size: usize, offset: bool) -> Vec<f64> {
    (0..size).map(|m| torus_node(m, size, offset)).collect()
}

/// Table of `exp(-i p_m l)` for `l` in `-half..=half`, laid out `[l + half][m]`.
pub(crate) fn analysis_table(nodes: &[f64], half: usize) -> Vec<Vec<Complex64>> {
    let half = half as i64;
    (-half..=half)
        .map(|l| {
            nodes
                .iter()
                .map(|&p| Complex64::from_polar(1.0, -p * l as f64))
                .collect()
        })
        .collect()
}

/// `(-1)^e` for a possibly negative integer exponent.
#[inline]
pub fn parity_sign(e: i64) -> f64 {
    if e.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Least-squares slope of `y` against `x`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 || xs.len() != ys.len() {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
