//! Sampled functions on the 1- and 2-torus and the centred coefficient
//! containers produced by their Fourier analysis.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{analysis_table, pairwise_sum, torus_node, torus_nodes};

/// A finite sequence indexed by `-half_width..=half_width`. Reads outside the
/// stored range return zero.
#[derive(Clone, Debug, PartialEq)]
pub struct CenteredSeq {
    half_width: usize,
    values: Vec<Complex64>,
}

impl CenteredSeq {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.len().is_multiple_of(2) {
            return Err(Error::Mismatch(format!(
                "centred sequence needs odd length, got {}",
                values.len()
            )));
        }
        Ok(Self {
            half_width: values.len() / 2,
            values,
        })
    }

    pub fn zeros(half_width: usize) -> Self {
        Self {
            half_width,
            values: vec![Complex64::default(); 2 * half_width + 1],
        }
    }

    /// Kronecker delta at the origin.
    pub fn delta(half_width: usize) -> Self {
        let mut s = Self::zeros(half_width);
        s.values[half_width] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn from_fn(half_width: usize, f: impl Fn(i64) -> Complex64) -> Self {
        let h = half_width as i64;
        Self {
            half_width,
            values: (-h..=h).map(f).collect(),
        }
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn get(&self, index: i64) -> Complex64 {
        if index.unsigned_abs() as usize > self.half_width {
            return Complex64::default();
        }
        self.values[(index + self.half_width as i64) as usize]
    }

    pub fn set(&mut self, index: i64, value: Complex64) {
        assert!(index.unsigned_abs() as usize <= self.half_width);
        self.values[(index + self.half_width as i64) as usize] = value;
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `(index, value)` pairs in ascending index order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let h = self.half_width as i64;
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (i as i64 - h, v))
    }

    pub fn norm_sq(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|v| v.norm_sqr()).collect();
        pairwise_sum(&sq)
    }

    pub fn l1_norm(&self) -> f64 {
        let abs: Vec<f64> = self.values.iter().map(|v| v.norm()).collect();
        pairwise_sum(&abs)
    }

    /// Largest `|s_{-l} - conj(s_l)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let h = self.half_width as i64;
        (0..=h)
            .map(|l| (self.get(-l) - self.get(l).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Trigonometric polynomial `Σ_l s_l e^{ipl}`.
    pub fn symbol(&self, p: f64) -> Complex64 {
        let terms: Vec<Complex64> = self
            .iter()
            .map(|(l, v)| v * Complex64::from_polar(1.0, p * l as f64))
            .collect();
        pairwise_sum(&terms)
    }
}

#[derive(Serialize, Deserialize)]
struct CenteredSeqJson {
    half_width: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for CenteredSeq {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CenteredSeqJson {
            half_width: self.half_width,
            re: self.values.iter().map(|v| v.re).collect(),
            im: self.values.iter().map(|v| v.im).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CenteredSeq {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = CenteredSeqJson::deserialize(d)?;
        let values = zip_complex(&raw.re, &raw.im, 2 * raw.half_width + 1)
            .map_err(serde::de::Error::custom)?;
        Ok(Self {
            half_width: raw.half_width,
            values,
        })
    }
}

pub(crate) fn zip_complex(re: &[f64], im: &[f64], expected: usize) -> Result<Vec<Complex64>> {
    if re.len() != expected || im.len() != expected {
        return Err(Error::Parse(format!(
            "expected {expected} real and imaginary parts, got {} and {}",
            re.len(),
            im.len()
        )));
    }
    Ok(re
        .iter()
        .zip(im)
        .map(|(&r, &i)| Complex64::new(r, i))
        .collect())
}

/// Samples of a function on `[0, 2π)` at `p_m = 2π m / M`, or at
/// `2π (m + ½) / M` when `offset_flag` is set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TorusFunction1D {
    pub grid_size: usize,
    pub samples: Vec<Complex64>,
    pub offset_flag: bool,
}

impl TorusFunction1D {
    pub fn from_fn(grid_size: usize, offset_flag: bool, f: impl Fn(f64) -> Complex64) -> Self {
        let samples = torus_nodes(grid_size, offset_flag)
            .into_iter()
            .map(f)
            .collect();
        Self {
            grid_size,
            samples,
            offset_flag,
        }
    }

    pub fn from_real_fn(grid_size: usize, offset_flag: bool, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid_size, offset_flag, |p| Complex64::new(f(p), 0.0))
    }

    pub fn node(&self, m: usize) -> f64 {
        torus_node(m, self.grid_size, self.offset_flag)
    }

    pub fn nodes(&self) -> Vec<f64> {
        torus_nodes(self.grid_size, self.offset_flag)
    }

    pub fn max_imag(&self) -> f64 {
        self.samples.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    pub fn real_samples(&self) -> Vec<f64> {
        self.samples.iter().map(|v| v.re).collect()
    }

    /// Apply `f` to the real part of every sample.
    pub fn map_real(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid_size: self.grid_size,
            samples: self
                .samples
                .iter()
                .map(|v| Complex64::new(f(v.re), 0.0))
                .collect(),
            offset_flag: self.offset_flag,
        }
    }

    /// Trapezoid-rule Fourier coefficients `(1/M) Σ_m e^{-i p_m l} f(p_m)`
    /// for `|l| <= half_width`.
    pub fn fourier_coefficients(&self, half_width: usize) -> CenteredSeq {
        let table = analysis_table(&self.nodes(), half_width);
        let m = self.grid_size as f64;
        let values = table
            .iter()
            .map(|row| {
                let terms: Vec<Complex64> =
                    row.iter().zip(&self.samples).map(|(e, f)| e * f).collect();
                pairwise_sum(&terms) / m
            })
            .collect();
        CenteredSeq {
            half_width,
            values,
        }
    }

    /// Sum of `|c_l|^2` over one full period of discrete coefficients; by the
    /// discrete Parseval identity this is the grid mean of `|f|^2`.
    pub fn full_band_norm_sq(&self) -> f64 {
        let sq: Vec<f64> = self.samples.iter().map(|v| v.norm_sqr()).collect();
        pairwise_sum(&sq) / self.grid_size as f64
    }
}

/// Coefficients on the square `‖k‖∞ <= radius`, stored row-major with `k1`
/// as the outer index.
#[derive(Clone, Debug, PartialEq)]
pub struct CenteredGrid2D {
    radius: usize,
    values: Vec<Complex64>,
}

impl CenteredGrid2D {
    pub fn zeros(radius: usize) -> Self {
        let side = 2 * radius + 1;
        Self {
            radius,
            values: vec![Complex64::default(); side * side],
        }
    }

    pub fn delta(radius: usize) -> Self {
        let mut g = Self::zeros(radius);
        g.set(0, 0, Complex64::new(1.0, 0.0));
        g
    }

    pub fn from_values(radius: usize, values: Vec<Complex64>) -> Result<Self> {
        let side = 2 * radius + 1;
        if values.len() != side * side {
            return Err(Error::Mismatch(format!(
                "radius {radius} needs {} values, got {}",
                side * side,
                values.len()
            )));
        }
        Ok(Self { radius, values })
    }

    pub fn from_fn(radius: usize, f: impl Fn(i64, i64) -> Complex64) -> Self {
        let r = radius as i64;
        let values = (-r..=r)
            .flat_map(|k1| (-r..=r).map(move |k2| (k1, k2)))
            .map(|(k1, k2)| f(k1, k2))
            .collect();
        Self { radius, values }
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    fn offset(&self, k1: i64, k2: i64) -> Option<usize> {
        let r = self.radius as i64;
        if k1.abs() > r || k2.abs() > r {
            return None;
        }
        let side = 2 * r + 1;
        Some(((k1 + r) * side + (k2 + r)) as usize)
    }

    pub fn get(&self, k1: i64, k2: i64) -> Complex64 {
        self.offset(k1, k2)
            .map(|i| self.values[i])
            .unwrap_or_default()
    }

    pub fn set(&mut self, k1: i64, k2: i64, value: Complex64) {
        let i = self
            .offset(k1, k2)
            .expect("index outside the coefficient square");
        self.values[i] = value;
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = ((i64, i64), Complex64)> + '_ {
        let r = self.radius as i64;
        let side = 2 * r + 1;
        self.values.iter().enumerate().map(move |(i, &v)| {
            let i = i as i64;
            ((i / side - r, i % side - r), v)
        })
    }

    /// Nonzero entries only.
    pub fn support(&self) -> Vec<((i64, i64), Complex64)> {
        self.iter().filter(|(_, v)| *v != Complex64::default()).collect()
    }

    pub fn norm_sq(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|v| v.norm_sqr()).collect();
        pairwise_sum(&sq)
    }

    pub fn l1_norm(&self) -> f64 {
        let abs: Vec<f64> = self.values.iter().map(|v| v.norm()).collect();
        pairwise_sum(&abs)
    }

    /// Largest `|c_{-k} - conj(c_k)|`.
    pub fn hermitian_defect(&self) -> f64 {
        self.iter()
            .map(|((k1, k2), v)| (self.get(-k1, -k2) - v.conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Trigonometric polynomial `Σ_k c_k e^{i P·k}`.
    pub fn symbol(&self, p1: f64, p2: f64) -> Complex64 {
        let terms: Vec<Complex64> = self
            .support()
            .into_iter()
            .map(|((k1, k2), v)| v * Complex64::from_polar(1.0, p1 * k1 as f64 + p2 * k2 as f64))
            .collect();
        pairwise_sum(&terms)
    }

    /// Copy restricted (or zero-padded) to another radius.
    pub fn with_radius(&self, radius: usize) -> Self {
        Self::from_fn(radius, |k1, k2| self.get(k1, k2))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let r = self.radius.max(other.radius);
        let ri = r as i64;
        (-ri..=ri)
            .flat_map(|k1| (-ri..=ri).map(move |k2| (k1, k2)))
            .map(|(k1, k2)| (self.get(k1, k2) - other.get(k1, k2)).norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Serialize, Deserialize)]
struct CenteredGridJson {
    radius: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for CenteredGrid2D {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CenteredGridJson {
            radius: self.radius,
            re: self.values.iter().map(|v| v.re).collect(),
            im: self.values.iter().map(|v| v.im).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CenteredGrid2D {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = CenteredGridJson::deserialize(d)?;
        let side = 2 * raw.radius + 1;
        let values = zip_complex(&raw.re, &raw.im, side * side).map_err(serde::de::Error::custom)?;
        Ok(Self {
            radius: raw.radius,
            values,
        })
    }
}

/// Samples on the `M × M` grid over `[0, 2π)²`, row-major with `P1` outer.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusFunction2D {
    pub grid_size: usize,
    pub samples: Vec<Complex64>,
    pub offset_flag: bool,
}

impl TorusFunction2D {
    pub fn from_fn(grid_size: usize, offset_flag: bool, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let nodes = torus_nodes(grid_size, offset_flag);
        let mut samples = Vec::with_capacity(grid_size * grid_size);
        for &p1 in &nodes {
            for &p2 in &nodes {
                samples.push(f(p1, p2));
            }
        }
        Self {
            grid_size,
            samples,
            offset_flag,
        }
    }

    pub fn node(&self, m: usize) -> f64 {
        torus_node(m, self.grid_size, self.offset_flag)
    }

    pub fn at(&self, m1: usize, m2: usize) -> Complex64 {
        self.samples[m1 * self.grid_size + m2]
    }

    pub fn max_imag(&self) -> f64 {
        self.samples.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    pub fn map_real(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid_size: self.grid_size,
            samples: self
                .samples
                .iter()
                .map(|v| Complex64::new(f(v.re), 0.0))
                .collect(),
            offset_flag: self.offset_flag,
        }
    }

    /// Minimum of the real part and the grid point where it is attained.
    pub fn min_real(&self) -> (f64, (f64, f64)) {
        let (idx, v) = self
            .samples
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.re.total_cmp(&b.1.re))
            .expect("non-empty grid");
        let m1 = idx / self.grid_size;
        let m2 = idx % self.grid_size;
        (v.re, (self.node(m1), self.node(m2)))
    }

    /// Trapezoid coefficients `(1/M²) Σ_m e^{-i P_m·k} f(P_m)` for `k1, k2` in
    /// `lo..=hi`, evaluated as two separable one-dimensional passes.
    pub fn fourier_coefficients_range(&self, lo: i64, hi: i64) -> Vec<Vec<Complex64>> {
        let m = self.grid_size;
        let nodes = torus_nodes(m, self.offset_flag);
        let table: Vec<Vec<Complex64>> = (lo..=hi)
            .map(|k| {
                nodes
                    .iter()
                    .map(|&p| Complex64::from_polar(1.0, -p * k as f64))
                    .collect()
            })
            .collect();
        let count = table.len();
        // partial[m1][k2] = Σ_{m2} f[m1][m2] e^{-i P2 k2}
        let mut partial = vec![vec![Complex64::default(); count]; m];
        let mut buf = vec![Complex64::default(); m];
        for (m1, row_out) in partial.iter_mut().enumerate() {
            let row = &self.samples[m1 * m..(m1 + 1) * m];
            for (k2, phases) in table.iter().enumerate() {
                for ((b, f), e) in buf.iter_mut().zip(row).zip(phases) {
                    *b = f * e;
                }
                row_out[k2] = pairwise_sum(&buf);
            }
        }
        let norm = (m * m) as f64;
        let mut out = vec![vec![Complex64::default(); count]; count];
        for (k1, phases) in table.iter().enumerate() {
            for k2 in 0..count {
                for (m1, b) in buf.iter_mut().enumerate() {
                    *b = partial[m1][k2] * phases[m1];
                }
                out[k1][k2] = pairwise_sum(&buf) / norm;
            }
        }
        out
    }

    pub fn fourier_coefficients(&self, radius: usize) -> CenteredGrid2D {
        let r = radius as i64;
        let rows = self.fourier_coefficients_range(-r, r);
        CenteredGrid2D {
            radius,
            values: rows.into_iter().flatten().collect(),
        }
    }

    pub fn sup_abs_minus_one(&self) -> f64 {
        self.samples
            .iter()
            .map(|v| (v - 1.0).norm())
            .fold(0.0, f64::max)
    }

    pub fn full_band_norm_sq(&self) -> f64 {
        let sq: Vec<f64> = self.samples.iter().map(|v| v.norm_sqr()).collect();
        pairwise_sum(&sq) / (self.grid_size * self.grid_size) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn centered_seq_reads_zero_outside() {
        let s = CenteredSeq::delta(2);
        assert_eq!(s.get(0), Complex64::new(1.0, 0.0));
        assert_eq!(s.get(7), Complex64::default());
        assert_eq!(s.get(-3), Complex64::default());
    }

    #[test]
    fn centered_seq_json_round_trip() {
        let s = CenteredSeq::from_fn(2, |l| Complex64::new(l as f64, -(l as f64) * 0.5));
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.starts_with("{\"half_width\":2"));
        let back: CenteredSeq = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn cosine_coefficients() {
        let f = TorusFunction1D::from_real_fn(16, false, |p| 2.0 + p.cos());
        let c = f.fourier_coefficients(3);
        assert!((c.get(0).re - 2.0).abs() < 1e-15);
        assert!((c.get(1).re - 0.5).abs() < 1e-15);
        assert!((c.get(-1).re - 0.5).abs() < 1e-15);
        assert!(c.get(2).norm() < 1e-15);
    }

    #[test]
    fn separable_2d_matches_direct() {
        let f = TorusFunction2D::from_fn(12, true, |a, b| {
            Complex64::new((a + 2.0 * b).cos() + 0.3 * (a - b).sin(), 0.1 * a.sin())
        });
        let c = f.fourier_coefficients(2);
        for ((k1, k2), v) in c.iter() {
            let mut direct = Complex64::default();
            for m1 in 0..12 {
                for m2 in 0..12 {
                    let (p1, p2) = (f.node(m1), f.node(m2));
                    direct += f.at(m1, m2)
                        * Complex64::from_polar(1.0, -(p1 * k1 as f64 + p2 * k2 as f64));
                }
            }
            direct /= 144.0;
            assert!((v - direct).norm() < 1e-14, "{k1},{k2}");
        }
    }

    #[test]
    fn grid_symbol_evaluates_trig_polynomial() {
        let mut g = CenteredGrid2D::zeros(1);
        g.set(1, 0, Complex64::new(0.5, 0.0));
        g.set(-1, 0, Complex64::new(0.5, 0.0));
        let v = g.symbol(PI / 3.0, 1.0);
        assert!((v.re - 0.5).abs() < 1e-15 && v.im.abs() < 1e-15);
        assert_eq!(g.iter().count(), 9);
        assert_eq!(g.support().len(), 2);
    }
}
