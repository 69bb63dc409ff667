use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{coherent_overlap, density_grid, DEFAULT_COEFF_GRID, DEFAULT_COEFF_RADIUS};
use crate::error::{invalid, Error, Result};
use crate::numeric::{pairwise_sum, torus_nodes};
use crate::torus::{zip_complex, CenteredGrid2D};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtractionOptions {
    pub grid_size: usize,
    pub radius: usize,
    /// Needed to process `L = 1`, whose density vanishes at `(π, π)`.
    pub allow_critical: bool,
}

impl Default for ExtractionOptions {
    fn default() -> Self {
        Self {
            grid_size: DEFAULT_COEFF_GRID,
            radius: DEFAULT_COEFF_RADIUS,
            allow_critical: false,
        }
    }
}

fn check_extraction(l: u32, grid_size: usize, radius: usize) -> Result<()> {
    if l == 0 {
        return Err(invalid("L", "lattice parameter must be at least 1"));
    }
    if 4 * radius > grid_size {
        return Err(invalid(
            "K",
            format!("radius {radius} exceeds M/4 for grid {grid_size}"),
        ));
    }
    Ok(())
}

/// `c_k = (1/M²) Σ_m e^{-i P_m·k} F_L(P_m)^{-1/2}`.
///
/// `L = 1` is refused unless `allow_critical` is set; it is then sampled on
/// the offset grid, which misses the zero, and the output does not converge
/// as `M` grows.
pub fn direct_coefficients_2d(l: u32, opts: ExtractionOptions) -> Result<CenteredGrid2D> {
    check_extraction(l, opts.grid_size, opts.radius)?;
    if l == 1 && !opts.allow_critical {
        return Err(Error::CriticalLattice);
    }
    let density = density_grid(l, opts.grid_size, l == 1);
    let (min_value, argmin) = density.min_real();
    if min_value <= 0.0 {
        return Err(Error::NotStrictlyPositive {
            min_value,
            argmin: argmin.0,
        });
    }
    Ok(density
        .map_real(|v| 1.0 / v.sqrt())
        .fourier_coefficients(opts.radius))
}

/// `dual_k = (1/M²) Σ_m e^{-i P_m·k} F_L(P_m)^{1/2}`. Defined for every `L`.
pub fn dual_coefficients_2d(l: u32, grid_size: usize, radius: usize) -> Result<CenteredGrid2D> {
    check_extraction(l, grid_size, radius)?;
    Ok(density_grid(l, grid_size, false)
        .map_real(|v| v.max(0.0).sqrt())
        .fourier_coefficients(radius))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoefficientSet2D {
    #[serde(rename = "L")]
    pub l: u32,
    #[serde(rename = "K")]
    pub radius: usize,
    pub grid_size: usize,
    pub c: CenteredGrid2D,
    pub dual: CenteredGrid2D,
    pub non_convergent: bool,
}

impl CoefficientSet2D {
    pub fn extract(l: u32, opts: ExtractionOptions) -> Result<Self> {
        let c = direct_coefficients_2d(l, opts)?;
        let dual = dual_coefficients_2d(l, opts.grid_size, opts.radius)?;
        Ok(Self {
            l,
            radius: opts.radius,
            grid_size: opts.grid_size,
            c,
            dual,
            non_convergent: l == 1,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct CoefficientJson {
    #[serde(rename = "L")]
    l: u32,
    #[serde(rename = "K")]
    radius: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

/// `{"L", "K", "re", "im"}`, row-major over the `(2K+1)²` square with `k1`
/// outer.
pub fn coefficients_to_json(l: u32, coeffs: &CenteredGrid2D) -> String {
    let doc = CoefficientJson {
        l,
        radius: coeffs.radius(),
        re: coeffs.values().iter().map(|v| v.re).collect(),
        im: coeffs.values().iter().map(|v| v.im).collect(),
    };
    serde_json::to_string(&doc).expect("plain data serializes")
}

pub fn coefficients_from_json(text: &str) -> Result<(u32, CenteredGrid2D)> {
    let doc: CoefficientJson = serde_json::from_str(text)?;
    let side = 2 * doc.radius + 1;
    let values = zip_complex(&doc.re, &doc.im, side * side)?;
    Ok((doc.l, CenteredGrid2D::from_values(doc.radius, values)?))
}

/// `<Ψ_n, Ψ_0>` for `‖n‖∞ <= n_max`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GramMatrix2D {
    pub n_max: usize,
    pub entries: CenteredGrid2D,
}

impl GramMatrix2D {
    pub fn center(&self) -> Complex64 {
        self.entries.get(0, 0)
    }

    pub fn max_off_center(&self) -> f64 {
        self.entries
            .iter()
            .filter(|(n, _)| *n != (0, 0))
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max)
    }
}

/// `Σ_{l,s} conj(c_l) c_s I_{l+n-s}`, through the autocorrelation
/// `R_j = Σ_l conj(c_l) c_{l+j}`.
pub fn gram_2d(c: &CenteredGrid2D, l: u32, n_max: usize) -> GramMatrix2D {
    let support = c.support();
    let reach = 2 * c.radius();
    let mut autocorr = CenteredGrid2D::zeros(reach);
    for &((a1, a2), ca) in &support {
        for &((b1, b2), cb) in &support {
            let j = (b1 - a1, b2 - a2);
            let v = autocorr.get(j.0, j.1) + ca.conj() * cb;
            autocorr.set(j.0, j.1, v);
        }
    }
    let corr = autocorr.support();
    let entries = CenteredGrid2D::from_fn(n_max, |n1, n2| {
        let terms: Vec<Complex64> = corr
            .iter()
            .map(|&((j1, j2), r)| r * coherent_overlap((n1 - j1, n2 - j2), l))
            .collect();
        pairwise_sum(&terms)
    });
    GramMatrix2D { n_max, entries }
}

/// `‖Ψ_0‖² = Σ_{k,s} I_{k-s} conj(c_k) c_s` as a plain double sum.
pub fn norm_condition(c: &CenteredGrid2D, l: u32) -> f64 {
    let support = c.support();
    let terms: Vec<Complex64> = support
        .iter()
        .flat_map(|&((k1, k2), ck)| {
            support
                .iter()
                .map(move |&((s1, s2), cs)| ck.conj() * cs * coherent_overlap((k1 - s1, k2 - s2), l))
        })
        .collect();
    pairwise_sum(&terms).re
}

/// `Σ_k conj(dual_k) c_k`.
pub fn sum_rule_2d(c: &CenteredGrid2D, dual: &CenteredGrid2D) -> Result<Complex64> {
    if c.radius() != dual.radius() {
        return Err(Error::Mismatch(format!(
            "radii {} and {}",
            c.radius(),
            dual.radius()
        )));
    }
    let terms: Vec<Complex64> = c
        .values()
        .iter()
        .zip(dual.values())
        .map(|(x, d)| d.conj() * x)
        .collect();
    Ok(pairwise_sum(&terms))
}

/// `Σ_k c_k e^{i P·k}` on the `M × M` grid, row-major with `P1` outer.
pub fn symbol_grid(coeffs: &CenteredGrid2D, grid_size: usize, offset: bool) -> Vec<Complex64> {
    let r = coeffs.radius() as i64;
    let nodes = torus_nodes(grid_size, offset);
    let phase: Vec<Vec<Complex64>> = nodes
        .iter()
        .map(|&p| (-r..=r).map(|k| Complex64::from_polar(1.0, p * k as f64)).collect())
        .collect();
    let side = (2 * r + 1) as usize;
    let mut out = Vec::with_capacity(grid_size * grid_size);
    let mut inner = vec![Complex64::default(); side];
    let mut buf = vec![Complex64::default(); side];
    for e1 in &phase {
        for e2 in &phase {
            for (a, slot) in inner.iter_mut().enumerate() {
                for (b, t) in buf.iter_mut().enumerate() {
                    *t = coeffs.values()[a * side + b] * e2[b];
                }
                *slot = pairwise_sum(&buf) * e1[a];
            }
            out.push(pairwise_sum(&inner));
        }
    }
    out
}

/// `sup_P |C(P) G(P) - 1|` over the grid.
pub fn xl_symbol_residual(c: &CenteredGrid2D, dual: &CenteredGrid2D, grid_size: usize) -> f64 {
    let cs = symbol_grid(c, grid_size, false);
    let gs = symbol_grid(dual, grid_size, false);
    cs.iter()
        .zip(&gs)
        .map(|(x, y)| (x * y - 1.0).norm())
        .fold(0.0, f64::max)
}

/// All checks of the exact construction for one `L`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Exact2DReport {
    #[serde(rename = "L")]
    pub l: u32,
    #[serde(rename = "K")]
    pub radius: usize,
    pub grid_size: usize,
    pub non_convergent: bool,
    pub gram: GramMatrix2D,
    pub max_off_center: f64,
    pub norm_sq: f64,
    pub sum_rule: Complex64,
    pub dual_parseval: f64,
    pub hermitian_defect: f64,
    pub symbol_residual: f64,
    pub l1_norm: f64,
}

pub fn run_exact_2d(l: u32, opts: ExtractionOptions, n_max: usize) -> Result<(CoefficientSet2D, Exact2DReport)> {
    let set = CoefficientSet2D::extract(l, opts)?;
    let gram = gram_2d(&set.c, l, n_max);
    let report = Exact2DReport {
        l,
        radius: set.radius,
        grid_size: set.grid_size,
        non_convergent: set.non_convergent,
        max_off_center: gram.max_off_center(),
        gram,
        norm_sq: norm_condition(&set.c, l),
        sum_rule: sum_rule_2d(&set.c, &set.dual)?,
        dual_parseval: set.dual.norm_sq(),
        hermitian_defect: set.c.hermitian_defect(),
        symbol_residual: xl_symbol_residual(&set.c, &set.dual, set.grid_size),
        l1_norm: set.c.l1_norm(),
    };
    Ok((set, report))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BreakdownRow {
    pub grid_size: usize,
    #[serde(rename = "K")]
    pub radius: usize,
    /// `Σ|c_k|` over `‖k‖∞ <= M/4`.
    pub l1_norm: f64,
    /// `Σ|c_k|²` over all `M²` discrete coefficients.
    pub sum_sq: f64,
    pub min_density: f64,
}

/// Coefficient norms on offset grids of increasing size. For `L = 1` these
/// keep growing; for `L >= 2` they settle immediately.
pub fn l1_breakdown_report(l: u32, grid_sizes: &[usize]) -> Result<Vec<BreakdownRow>> {
    if l == 0 {
        return Err(invalid("L", "lattice parameter must be at least 1"));
    }
    grid_sizes
        .iter()
        .map(|&m| {
            if m < 4 {
                return Err(invalid("M", format!("grid size {m} is too small")));
            }
            let density = density_grid(l, m, true);
            let (min_density, argmin) = density.min_real();
            if min_density <= 0.0 {
                return Err(Error::NotStrictlyPositive {
                    min_value: min_density,
                    argmin: argmin.0,
                });
            }
            let inv = density.map_real(|v| 1.0 / v.sqrt());
            let radius = m / 4;
            Ok(BreakdownRow {
                grid_size: m,
                radius,
                l1_norm: inv.fourier_coefficients(radius).l1_norm(),
                sum_sq: inv.full_band_norm_sq(),
                min_density,
            })
        })
        .collect()
}
