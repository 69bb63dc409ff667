//! One-dimensional orthonormalization of the translates `A^j f₀`.
//!
//! Everything is driven by the overlap sequence `a_j = <A^j f₀, f₀>`. Its
//! Fourier series `α(p)` decides feasibility: when `α > 0` on the circle, the
//! coefficients of `α^{-1/2}` build an orthonormal generator and the
//! coefficients of `α^{1/2}` expand the seed back in the new family.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numeric::{ls_slope, pairwise_sum, torus_node};
use crate::torus::{zip_complex, CenteredSeq, TorusFunction1D};

pub const DEFAULT_GRID: usize = 4096;
pub const DEFAULT_HALF_WIDTH: usize = 64;
pub const DEFAULT_GRAM_RADIUS: usize = 8;
/// Zero threshold for densities, relative to their maximum.
pub const ZERO_TOLERANCE_REL: f64 = 1e-9;
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Largest imaginary part (relative to the density scale) still treated as round-off.
pub const IMAG_TOL: f64 = 1e-10;

/// Hermitian overlap sequence `a_j`, `|j| <= J`.
///
/// Sequences built with [`OverlapSequence1D::new`] satisfy `a_0 = 1`; the raw
/// constructor only asks for Hermitian symmetry and a positive `a_0`, which is
/// what unnormalized seeds (box widths `a != 1`) produce.
#[derive(Clone, Debug, PartialEq)]
pub struct OverlapSequence1D {
    values: CenteredSeq,
    truncated: bool,
}

impl OverlapSequence1D {
    pub fn new(values: CenteredSeq) -> Result<Self> {
        let seq = Self::new_raw(values)?;
        let a0 = seq.a0();
        if (a0 - 1.0).abs() > HERMITIAN_TOL {
            return Err(Error::NotNormalized { a0 });
        }
        Ok(seq)
    }

    pub fn new_raw(values: CenteredSeq) -> Result<Self> {
        let h = values.half_width() as i64;
        for j in 0..=h {
            let defect = (values.get(-j) - values.get(j).conj()).norm();
            if defect > HERMITIAN_TOL {
                return Err(Error::NotHermitian {
                    index: j as usize,
                    defect,
                });
            }
        }
        let a0 = values.get(0).re;
        if a0.is_nan() || a0 <= 0.0 {
            return Err(invalid("a_0", format!("must be positive, got {a0}")));
        }
        Ok(Self {
            values,
            truncated: false,
        })
    }

    /// Mark the sequence as a truncation of an infinitely supported one.
    pub fn into_truncated(mut self) -> Self {
        self.truncated = true;
        self
    }

    pub fn half_width(&self) -> usize {
        self.values.half_width()
    }

    pub fn get(&self, j: i64) -> Complex64 {
        self.values.get(j)
    }

    pub fn a0(&self) -> f64 {
        self.values.get(0).re
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn values(&self) -> &CenteredSeq {
        &self.values
    }

    /// Divide through by `a_0`, i.e. normalize the seed vector.
    pub fn normalized(&self) -> Self {
        let a0 = self.a0();
        Self {
            values: CenteredSeq::from_fn(self.half_width(), |j| self.get(j) / a0),
            truncated: self.truncated,
        }
    }

    /// Parse `{"J": int, "re": [..], "im": [..]}` with entries ordered `j = -J..J`.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: OverlapJson = serde_json::from_str(text)?;
        let values = zip_complex(&raw.re, &raw.im, 2 * raw.half_width + 1)?;
        Self::new_raw(CenteredSeq::new(values)?)
    }

    pub fn to_json_string(&self) -> String {
        let json = OverlapJson {
            half_width: self.half_width(),
            re: self.values.values().iter().map(|v| v.re).collect(),
            im: self.values.values().iter().map(|v| v.im).collect(),
        };
        serde_json::to_string(&json).expect("plain data serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct OverlapJson {
    #[serde(rename = "J")]
    half_width: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

/// `α(p_m) = Σ_{|j|<=J} a_j e^{i p_m j}` on an `M`-point grid.
pub fn spectral_density(a: &OverlapSequence1D, grid_size: usize, offset: bool) -> Result<TorusFunction1D> {
    let required = 4 * (2 * a.half_width() + 1);
    if grid_size < required {
        return Err(Error::GridTooSmall {
            grid: grid_size,
            required,
            half_width: a.half_width(),
        });
    }
    Ok(TorusFunction1D::from_fn(grid_size, offset, |p| {
        a.values().symbol(p)
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PositivityStatus {
    StrictlyPositive,
    HasZero,
    Indefinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PositivityReport {
    pub min_value: f64,
    pub argmin: f64,
    pub max_value: f64,
    pub status: PositivityStatus,
    pub zero_tolerance: f64,
}

pub(crate) fn ensure_real(alpha: &TorusFunction1D) -> Result<()> {
    let scale = alpha
        .samples
        .iter()
        .map(|v| v.re.abs())
        .fold(1.0, f64::max);
    let max_imag = alpha.max_imag();
    if max_imag > IMAG_TOL * scale {
        return Err(Error::ComplexDensity { max_imag });
    }
    Ok(())
}

/// Grid minimum refined by one parabolic step through the argmin and its two
/// neighbours.
pub fn check_positivity(alpha: &TorusFunction1D) -> Result<PositivityReport> {
    ensure_real(alpha)?;
    let values = alpha.real_samples();
    let m = values.len();
    let (imin, &y1) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| invalid("alpha", "empty grid"))?;
    let max_value = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let h = std::f64::consts::TAU / m as f64;

    let mut min_value = y1;
    let mut argmin = alpha.node(imin);
    if m >= 3 {
        let y0 = values[(imin + m - 1) % m];
        let y2 = values[(imin + 1) % m];
        let curvature = y0 - 2.0 * y1 + y2;
        if curvature > 0.0 {
            let shift = (0.5 * h * (y0 - y2) / curvature).clamp(-h, h);
            min_value = y1 - (y0 - y2) * (y0 - y2) / (8.0 * curvature);
            argmin = (argmin + shift).rem_euclid(std::f64::consts::TAU);
        }
    }

    let zero_tolerance = ZERO_TOLERANCE_REL * max_value.abs().max(f64::MIN_POSITIVE);
    let status = if min_value > zero_tolerance {
        PositivityStatus::StrictlyPositive
    } else if min_value < -zero_tolerance {
        PositivityStatus::Indefinite
    } else {
        PositivityStatus::HasZero
    };
    Ok(PositivityReport {
        min_value,
        argmin,
        max_value,
        status,
        zero_tolerance,
    })
}

fn check_half_width(alpha: &TorusFunction1D, half_width: usize) -> Result<()> {
    if half_width > alpha.grid_size / 4 {
        return Err(invalid(
            "half_width",
            format!("K = {half_width} exceeds M/4 = {}", alpha.grid_size / 4),
        ));
    }
    Ok(())
}

/// Coefficients `c_l` of `α^{-1/2}` (positive branch) by the trapezoid rule.
pub fn direct_coefficients(alpha: &TorusFunction1D, half_width: usize) -> Result<CenteredSeq> {
    check_half_width(alpha, half_width)?;
    let report = check_positivity(alpha)?;
    match report.status {
        PositivityStatus::StrictlyPositive => {}
        PositivityStatus::HasZero => {
            return Err(Error::NotStrictlyPositive {
                min_value: report.min_value,
                argmin: report.argmin,
            })
        }
        PositivityStatus::Indefinite => {
            return Err(Error::Indefinite {
                min_value: report.min_value,
                argmin: report.argmin,
            })
        }
    }
    Ok(alpha
        .map_real(|v| 1.0 / v.sqrt())
        .fourier_coefficients(half_width))
}

/// Coefficients `d_l` of `α^{1/2}`; zeros of `α` are allowed.
pub fn dual_coefficients(alpha: &TorusFunction1D, half_width: usize) -> Result<CenteredSeq> {
    check_half_width(alpha, half_width)?;
    let report = check_positivity(alpha)?;
    if report.status == PositivityStatus::Indefinite {
        return Err(Error::Indefinite {
            min_value: report.min_value,
            argmin: report.argmin,
        });
    }
    Ok(alpha
        .map_real(|v| v.max(0.0).sqrt())
        .fourier_coefficients(half_width))
}

/// Direct and dual coefficients extracted from the same density.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoefficientSet1D {
    pub half_width: usize,
    pub c: CenteredSeq,
    pub d: CenteredSeq,
    /// `|c_K|² + |c_{-K}|²`, the last computed shell, as a proxy for the
    /// discarded tail.
    pub truncation_norm_estimate: f64,
}

impl CoefficientSet1D {
    pub fn extract(alpha: &TorusFunction1D, half_width: usize) -> Result<Self> {
        let c = direct_coefficients(alpha, half_width)?;
        let d = dual_coefficients(alpha, half_width)?;
        Ok(Self::from_parts(c, d))
    }

    pub fn from_parts(c: CenteredSeq, d: CenteredSeq) -> Self {
        let k = c.half_width() as i64;
        let truncation_norm_estimate = c.get(k).norm_sqr() + c.get(-k).norm_sqr();
        Self {
            half_width: c.half_width(),
            c,
            d,
            truncation_norm_estimate,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GramRow {
    pub n_max: usize,
    /// `<φ_n, φ_0>` for `n = -n_max..=n_max`.
    pub entries: CenteredSeq,
    /// Set when the overlap sequence is a truncation and the computation
    /// needed indices beyond its stored range.
    pub truncation_warning: bool,
}

impl GramRow {
    pub fn center(&self) -> Complex64 {
        self.entries.get(0)
    }

    /// Largest `|<φ_n, φ_0>|` over `1 <= |n| <= n_max`.
    pub fn max_off_center(&self) -> f64 {
        self.entries
            .iter()
            .filter(|(n, _)| *n != 0)
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max)
    }
}

/// `<φ_n, φ_0> = Σ_{k,l} conj(c_k) c_l a_{k+n-l}`, evaluated through the
/// autocorrelation `R_j = Σ_k conj(c_k) c_{k+j}`.
pub fn gram_row(c: &CenteredSeq, a: &OverlapSequence1D, n_max: usize) -> GramRow {
    let kk = c.half_width() as i64;
    let autocorr = CenteredSeq::from_fn(2 * c.half_width(), |j| {
        let terms: Vec<Complex64> = (-kk..=kk).map(|k| c.get(k).conj() * c.get(k + j)).collect();
        pairwise_sum(&terms)
    });
    let nm = n_max as i64;
    let entries = CenteredSeq::from_fn(n_max, |n| {
        let terms: Vec<Complex64> = autocorr.iter().map(|(j, r)| r * a.get(n - j)).collect();
        pairwise_sum(&terms)
    });
    let reach = 2 * kk + nm;
    GramRow {
        n_max,
        entries,
        truncation_warning: a.is_truncated() && reach > a.half_width() as i64,
    }
}

/// `Σ_n conj(c_n) d_n`.
pub fn sum_rule_1d(c: &CenteredSeq, d: &CenteredSeq) -> Result<Complex64> {
    if c.half_width() != d.half_width() {
        return Err(Error::Mismatch(format!(
            "half-widths {} and {}",
            c.half_width(),
            d.half_width()
        )));
    }
    let terms: Vec<Complex64> = c
        .values()
        .iter()
        .zip(d.values())
        .map(|(x, y)| x.conj() * y)
        .collect();
    Ok(pairwise_sum(&terms))
}

/// `sup_m |C(p_m) D(p_m) - 1|`: the norm of `X X^{-1} - 1` on the cyclic
/// subspace, read off from the symbols.
pub fn symbol_inverse_residual(c: &CenteredSeq, d: &CenteredSeq, grid_size: usize) -> f64 {
    (0..grid_size)
        .map(|m| {
            let p = torus_node(m, grid_size, false);
            (c.symbol(p) * d.symbol(p) - 1.0).norm()
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayProfile {
    /// `(l, |c_l|)` for `l = 0..=K`.
    pub magnitudes: Vec<(i64, f64)>,
    /// Least-squares slope of `ln|c_l|` against `l`; `None` if fewer than two
    /// magnitudes sit above the noise floor.
    pub log_slope: Option<f64>,
    pub fit_range: Option<(i64, i64)>,
}

/// Magnitudes below this fraction of the largest one are treated as
/// quadrature round-off and excluded from the slope fit.
pub const DECAY_NOISE_FLOOR: f64 = 1e-13;

/// Magnitude profile and exponential decay rate over the outer half of the
/// resolved range.
pub fn decay_profile(coeffs: &CenteredSeq) -> Result<DecayProfile> {
    let k = coeffs.half_width();
    if k < 8 {
        return Err(invalid("half_width", format!("decay fit needs K >= 8, got {k}")));
    }
    let magnitudes: Vec<(i64, f64)> = (0..=k as i64)
        .map(|l| (l, coeffs.get(l).norm().max(coeffs.get(-l).norm())))
        .collect();
    let peak = magnitudes.iter().map(|m| m.1).fold(0.0, f64::max);
    let resolved: Vec<(i64, f64)> = magnitudes
        .iter()
        .copied()
        .filter(|&(l, v)| l >= 1 && v > DECAY_NOISE_FLOOR * peak)
        .collect();
    let outer = &resolved[resolved.len() / 2..];
    let xs: Vec<f64> = outer.iter().map(|m| m.0 as f64).collect();
    let ys: Vec<f64> = outer.iter().map(|m| m.1.ln()).collect();
    let log_slope = ls_slope(&xs, &ys);
    let fit_range = log_slope.map(|_| (outer[0].0, outer[outer.len() - 1].0));
    Ok(DecayProfile {
        magnitudes,
        log_slope,
        fit_range,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DivergenceRow {
    pub grid_size: usize,
    /// Sum of `|c_l|²` over all `M` discrete coefficients of `α^{-1/2}`.
    pub sum_sq: f64,
    pub min_density: f64,
}

/// Full-band `Σ|c_l|²` on offset grids of increasing size. For a density with
/// a zero these grow without bound; otherwise they settle at
/// `(1/2π) ∫ dp / α(p)`.
pub fn divergence_probe(a: &OverlapSequence1D, grid_sizes: &[usize]) -> Result<Vec<DivergenceRow>> {
    grid_sizes
        .iter()
        .map(|&m| {
            let alpha = spectral_density(a, m, true)?;
            ensure_real(&alpha)?;
            let reals = alpha.real_samples();
            let min_density = reals.iter().copied().fold(f64::INFINITY, f64::min);
            if min_density <= 0.0 {
                return Err(Error::Indefinite {
                    min_value: min_density,
                    argmin: f64::NAN,
                });
            }
            let sum_sq = alpha.map_real(|v| 1.0 / v.sqrt()).full_band_norm_sq();
            Ok(DivergenceRow {
                grid_size: m,
                sum_sq,
                min_density,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipelineOptions {
    pub grid_size: usize,
    pub half_width: usize,
    pub n_max: usize,
    /// Divide the overlaps by `a_0` before processing.
    pub normalize: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            grid_size: DEFAULT_GRID,
            half_width: DEFAULT_HALF_WIDTH,
            n_max: DEFAULT_GRAM_RADIUS,
            normalize: false,
        }
    }
}

/// Everything the 1-D construction produces for one overlap sequence.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Pipeline1DReport {
    pub a0: f64,
    pub normalized: bool,
    pub positivity: PositivityReport,
    pub coefficients: CoefficientSet1D,
    pub sum_sq_c: f64,
    pub sum_sq_d: f64,
    pub gram: GramRow,
    pub sum_rule: Complex64,
    pub symbol_residual: f64,
    pub decay_c: DecayProfile,
    pub decay_d: DecayProfile,
}

pub fn run_pipeline(a: &OverlapSequence1D, opts: PipelineOptions) -> Result<Pipeline1DReport> {
    let a = if opts.normalize { a.normalized() } else { a.clone() };
    let alpha = spectral_density(&a, opts.grid_size, false)?;
    let positivity = check_positivity(&alpha)?;
    let coefficients = CoefficientSet1D::extract(&alpha, opts.half_width)?;
    let gram = gram_row(&coefficients.c, &a, opts.n_max);
    let sum_rule = sum_rule_1d(&coefficients.c, &coefficients.d)?;
    let symbol_residual = symbol_inverse_residual(&coefficients.c, &coefficients.d, opts.grid_size);
    Ok(Pipeline1DReport {
        a0: a.a0(),
        normalized: opts.normalize,
        positivity,
        sum_sq_c: coefficients.c.norm_sq(),
        sum_sq_d: coefficients.d.norm_sq(),
        decay_c: decay_profile(&coefficients.c)?,
        decay_d: decay_profile(&coefficients.d)?,
        coefficients,
        gram,
        sum_rule,
        symbol_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn seq(vals: &[f64]) -> CenteredSeq {
        CenteredSeq::new(vals.iter().map(|&v| Complex64::new(v, 0.0)).collect()).unwrap()
    }

    fn box_three_halves() -> OverlapSequence1D {
        OverlapSequence1D::new_raw(seq(&[0.5, 1.5, 0.5])).unwrap()
    }

    #[test]
    fn rejects_non_hermitian() {
        let bad = CenteredSeq::new(vec![
            Complex64::new(0.1, 0.2),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.1, 0.2),
        ])
        .unwrap();
        assert!(matches!(
            OverlapSequence1D::new(bad),
            Err(Error::NotHermitian { index: 1, .. })
        ));
    }

    #[test]
    fn strict_constructor_requires_unit_a0() {
        assert!(matches!(
            OverlapSequence1D::new(seq(&[0.5, 1.5, 0.5])),
            Err(Error::NotNormalized { .. })
        ));
        assert!(OverlapSequence1D::new(seq(&[1.0])).is_ok());
    }

    #[test]
    fn json_import_orders_from_minus_j() {
        let a = OverlapSequence1D::from_json_str(r#"{"J":1,"re":[0.25,1.0,0.25],"im":[-0.1,0.0,0.1]}"#)
            .unwrap();
        assert_eq!(a.get(-1), Complex64::new(0.25, -0.1));
        assert_eq!(a.get(1), Complex64::new(0.25, 0.1));
        let back = OverlapSequence1D::from_json_str(&a.to_json_string()).unwrap();
        assert_eq!(back, a);
        assert!(OverlapSequence1D::from_json_str(r#"{"J":1,"re":[1.0],"im":[0.0]}"#).is_err());
    }

    #[test]
    fn density_grid_precondition() {
        let a = box_three_halves();
        assert!(matches!(
            spectral_density(&a, 11, false),
            Err(Error::GridTooSmall { required: 12, .. })
        ));
        assert!(spectral_density(&a, 12, false).is_ok());
    }

    #[test]
    fn identity_density_is_constant_one() {
        let a = OverlapSequence1D::new(seq(&[1.0])).unwrap();
        let alpha = spectral_density(&a, 64, false).unwrap();
        assert!(alpha.samples.iter().all(|v| (v - 1.0).norm() < 1e-15));
        let rep = check_positivity(&alpha).unwrap();
        assert_eq!(rep.status, PositivityStatus::StrictlyPositive);
        assert_eq!(rep.min_value, 1.0);
        assert_eq!(rep.max_value, 1.0);
    }

    #[test]
    fn box_density_is_three_halves_plus_cosine() {
        let alpha = spectral_density(&box_three_halves(), 64, false).unwrap();
        for (m, v) in alpha.samples.iter().enumerate() {
            let p = alpha.node(m);
            assert!((v.re - (1.5 + p.cos())).abs() < 1e-15);
            assert!(v.im.abs() < 1e-10);
        }
    }

    #[test]
    fn positivity_of_shifted_cosine() {
        // Closed form 3/2 + cos p has its minimum 1/2 at p = π.
        let alpha = TorusFunction1D::from_real_fn(60, false, |p| 1.5 + p.cos());
        let rep = check_positivity(&alpha).unwrap();
        assert_eq!(rep.status, PositivityStatus::StrictlyPositive);
        assert!((rep.min_value - 0.5).abs() < 1e-12);
        assert!((rep.argmin - PI).abs() < 1e-12);
        assert!((rep.max_value - 2.5).abs() < 1e-12);
    }

    #[test]
    fn parabolic_refinement_off_grid() {
        // Minimum between nodes: the refined value beats the raw grid minimum.
        let alpha = TorusFunction1D::from_real_fn(64, true, |p| 2.0 + (p - 1.0).cos().mul_add(-1.0, 0.0));
        let rep = check_positivity(&alpha).unwrap();
        let grid_min = alpha.real_samples().into_iter().fold(f64::INFINITY, f64::min);
        assert!(rep.min_value <= grid_min);
        assert!((rep.min_value - 1.0).abs() < 1e-5);
        assert!((rep.argmin - 1.0).abs() < 1e-3);
    }

    #[test]
    fn box_width_two_has_zero_at_pi() {
        let a = OverlapSequence1D::new_raw(seq(&[1.0, 2.0, 1.0])).unwrap();
        let alpha = spectral_density(&a, 64, false).unwrap();
        let rep = check_positivity(&alpha).unwrap();
        assert_eq!(rep.status, PositivityStatus::HasZero);
        assert!((rep.argmin - PI).abs() < 1e-9);
        match direct_coefficients(&alpha, 8) {
            Err(Error::NotStrictlyPositive { argmin, .. }) => assert!((argmin - PI).abs() < 1e-9),
            other => panic!("expected refusal, got {other:?}"),
        }
        // The square root is continuous, so the dual side still works.
        assert!(dual_coefficients(&alpha, 8).is_ok());
    }

    #[test]
    fn indefinite_density_is_flagged() {
        let alpha = TorusFunction1D::from_real_fn(64, false, |p| 0.5 + p.cos());
        let rep = check_positivity(&alpha).unwrap();
        assert_eq!(rep.status, PositivityStatus::Indefinite);
        assert!(matches!(dual_coefficients(&alpha, 4), Err(Error::Indefinite { .. })));
    }

    #[test]
    fn complex_density_is_rejected() {
        let alpha = TorusFunction1D::from_fn(16, false, |p| Complex64::new(1.0, 1e-3 * p.sin()));
        assert!(matches!(check_positivity(&alpha), Err(Error::ComplexDensity { .. })));
    }

    #[test]
    fn half_width_bound() {
        let alpha = TorusFunction1D::from_real_fn(64, false, |_| 1.0);
        assert!(direct_coefficients(&alpha, 17).is_err());
        assert!(direct_coefficients(&alpha, 16).is_ok());
    }

    #[test]
    fn constant_densities_give_scaled_deltas() {
        for a in [1.0, 0.25, 0.7] {
            let alpha = TorusFunction1D::from_real_fn(64, false, |_| a);
            let set = CoefficientSet1D::extract(&alpha, 8).unwrap();
            for l in -8..=8 {
                let (ec, ed) = if l == 0 { (1.0 / a.sqrt(), a.sqrt()) } else { (0.0, 0.0) };
                assert!((set.c.get(l).re - ec).abs() < 1e-14);
                assert!((set.d.get(l).re - ed).abs() < 1e-14);
            }
            assert!(set.truncation_norm_estimate < 1e-30);
        }
    }

    #[test]
    fn delta_gram_sum_rule_and_residual() {
        let c = CenteredSeq::delta(3);
        let a = OverlapSequence1D::new(seq(&[1.0])).unwrap();
        let row = gram_row(&c, &a, 4);
        for (n, v) in row.entries.iter() {
            assert_eq!(v, Complex64::new(if n == 0 { 1.0 } else { 0.0 }, 0.0));
        }
        assert_eq!(sum_rule_1d(&c, &c).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(symbol_inverse_residual(&c, &c, 32), 0.0);
        assert!(sum_rule_1d(&c, &CenteredSeq::delta(2)).is_err());
    }

    #[test]
    fn gram_matches_double_sum() {
        let c = CenteredSeq::from_fn(3, |l| Complex64::new(0.3 / (1.0 + l as f64 * l as f64), 0.05 * l as f64));
        let a = box_three_halves();
        let row = gram_row(&c, &a, 5);
        for n in -5i64..=5 {
            let mut s = Complex64::default();
            for k in -3..=3 {
                for l in -3..=3 {
                    s += c.get(k).conj() * c.get(l) * a.get(k + n - l);
                }
            }
            assert!((row.entries.get(n) - s).norm() < 1e-15);
        }
    }

    #[test]
    fn truncation_warning_only_for_truncated_sequences() {
        let c = CenteredSeq::delta(4);
        let a = box_three_halves();
        assert!(!gram_row(&c, &a, 2).truncation_warning);
        assert!(gram_row(&c, &a.clone().into_truncated(), 2).truncation_warning);
    }

    #[test]
    fn decay_profile_of_delta() {
        let prof = decay_profile(&CenteredSeq::delta(10)).unwrap();
        assert!(prof.magnitudes.iter().skip(1).all(|m| m.1 == 0.0));
        assert_eq!(prof.log_slope, None);
        assert!(decay_profile(&CenteredSeq::delta(7)).is_err());
    }

    #[test]
    fn decay_profile_of_geometric_sequence() {
        let s = CenteredSeq::from_fn(16, |l| Complex64::new(0.5f64.powi(l.abs() as i32), 0.0));
        let prof = decay_profile(&s).unwrap();
        assert!((prof.log_slope.unwrap() - 0.5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn divergence_probe_rejects_negative_density() {
        let a = OverlapSequence1D::new_raw(seq(&[1.0, 1.5, 1.0])).unwrap();
        assert!(divergence_probe(&a, &[64]).is_err());
    }
}
