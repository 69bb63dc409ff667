//! Truncated number-basis realization of the lattice operators.
//!
//! Everything lives on span{|0>, ..., |N-1>}. Displacements are the exact
//! exponentials of the truncated generators `z b† - conj(z) b`, obtained by
//! rotating the real tridiagonal quadrature `(b + b†)/√2` into place, so they
//! are unitary on the truncated space and accurate on its low-index part.

use std::collections::HashMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::lattice2d::{gram_2d, CoefficientSet2D, ExtractionOptions};
use crate::numeric::parity_sign;
use crate::torus::CenteredGrid2D;

pub const DEFAULT_DIM: usize = 140;
/// Extra dimensions used by the truncation stability gate.
pub const STABILITY_STEP: usize = 40;

/// `N >= |z|² + 12 sqrt(|z|² + 1)` keeps the Poisson tail of a coherent
/// state negligible.
pub fn tail_rule(norm_sq: f64) -> f64 {
    norm_sq + 12.0 * (norm_sq + 1.0).sqrt()
}

/// Lattice point `z_n = (a/√2)(n2 + i n1)` with `a² = 2πL`.
pub fn lattice_point(n: (i64, i64), l: u32) -> Complex64 {
    let s = (PI * l as f64).sqrt();
    Complex64::new(s * n.1 as f64, s * n.0 as f64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    pub amplitudes: DVector<Complex64>,
}

impl FockVector {
    pub fn vacuum(dim: usize) -> Self {
        let mut amplitudes = DVector::zeros(dim);
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `<self, other>`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            amplitudes: &self.amplitudes * s,
        }
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (&self.amplitudes - &other.amplitudes).norm()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator {
    pub matrix: DMatrix<Complex64>,
}

impl FockOperator {
    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, v: &FockVector) -> FockVector {
        FockVector {
            amplitudes: &self.matrix * &v.amplitudes,
        }
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix * &other.matrix,
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix,
        }
    }

    /// Leading `size × size` block.
    pub fn block(&self, size: usize) -> DMatrix<Complex64> {
        self.matrix.view((0, 0), (size, size)).into_owned()
    }

    /// Largest singular value of `self - 1` on the low half-block.
    pub fn low_block_deviation_from_identity(&self) -> f64 {
        let half = self.dim() / 2;
        let m = self.block(half) - DMatrix::<Complex64>::identity(half, half);
        spectral_norm(&m)
    }

    /// Largest singular value of `self - other` on the low half-block.
    pub fn low_block_distance(&self, other: &Self) -> f64 {
        let half = self.dim() / 2;
        spectral_norm(&(self.block(half) - other.block(half)))
    }

    /// `‖A - A†‖` (spectral norm over the full truncation).
    pub fn self_adjoint_defect(&self) -> f64 {
        spectral_norm(&(&self.matrix - self.matrix.adjoint()))
    }

    /// `‖U†U - 1‖` on the low half-block.
    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint().compose(self).low_block_deviation_from_identity()
    }
}

pub fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// `b` with `b|k> = √k |k-1>`.
pub fn annihilator(dim: usize) -> Result<FockOperator> {
    if dim < 2 {
        return Err(invalid("N", format!("truncation must be at least 2, got {dim}")));
    }
    let mut matrix = DMatrix::zeros(dim, dim);
    for k in 1..dim {
        matrix[(k - 1, k)] = Complex64::new((k as f64).sqrt(), 0.0);
    }
    Ok(FockOperator { matrix })
}

/// `e^{-|z|²/2} Σ_k z^k/√(k!) |k>`, refused if `N` is below the tail rule.
pub fn coherent_vector(z: Complex64, dim: usize) -> Result<FockVector> {
    let norm_sq = z.norm_sqr();
    let required = tail_rule(norm_sq);
    if (dim as f64) < required {
        return Err(Error::TruncationTooSmall {
            dim,
            required,
            norm_sq,
        });
    }
    let mut amplitudes = DVector::zeros(dim);
    let mut a = Complex64::new((-norm_sq / 2.0).exp(), 0.0);
    amplitudes[0] = a;
    for k in 1..dim {
        a = a * z / (k as f64).sqrt();
        amplitudes[k] = a;
    }
    Ok(FockVector { amplitudes })
}

/// Builds truncated displacements `exp(z b† - conj(z) b)`.
///
/// With `Q = (b + b†)/√2 = V Λ Vᵀ` and `R_φ = diag(e^{iφm})`,
/// `D(r e^{iθ}) = R_φ V e^{i r √2 Λ} Vᵀ R_φ†` where `φ = θ - π/2`.
#[derive(Clone, Debug)]
pub struct Displacer {
    dim: usize,
    vectors: DMatrix<f64>,
    values: DVector<f64>,
}

impl Displacer {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(invalid("N", format!("truncation must be at least 2, got {dim}")));
        }
        let mut q = DMatrix::<f64>::zeros(dim, dim);
        for k in 1..dim {
            let v = (k as f64).sqrt() * FRAC_1_SQRT_2;
            q[(k - 1, k)] = v;
            q[(k, k - 1)] = v;
        }
        let eig = SymmetricEigen::new(q);
        Ok(Self {
            dim,
            vectors: eig.eigenvectors,
            values: eig.eigenvalues,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn displacement(&self, z: Complex64) -> FockOperator {
        let r = z.norm();
        if r == 0.0 {
            return FockOperator::identity(self.dim);
        }
        let phi = z.arg() - PI / 2.0;
        let angles = self.values.map(|lam| r * SQRT_2 * lam);
        let v = &self.vectors;
        let vt = v.transpose();
        let mut vc = v.clone();
        let mut vs = v.clone();
        for (j, ang) in angles.iter().enumerate() {
            let (s, c) = ang.sin_cos();
            vc.column_mut(j).scale_mut(c);
            vs.column_mut(j).scale_mut(s);
        }
        let re = &vc * &vt;
        let im = &vs * &vt;
        let rot: Vec<Complex64> = (0..self.dim)
            .map(|m| Complex64::from_polar(1.0, phi * m as f64))
            .collect();
        let matrix = DMatrix::from_fn(self.dim, self.dim, |j, k| {
            rot[j] * Complex64::new(re[(j, k)], im[(j, k)]) * rot[k].conj()
        });
        FockOperator { matrix }
    }
}

/// `exp(z b† - conj(z) b)` on the `N`-dimensional truncation.
pub fn displacement(z: Complex64, dim: usize) -> Result<FockOperator> {
    Ok(Displacer::new(dim)?.displacement(z))
}

/// Lattice translations `T1^{k1} T2^{k2} = (-1)^{L k1 k2} D(z_k)` on a fixed
/// truncation, each `D(z_k)` built once.
#[derive(Clone, Debug)]
pub struct FockLattice {
    pub l: u32,
    displacer: Displacer,
    cache: HashMap<(i64, i64), FockOperator>,
}

impl FockLattice {
    pub fn new(l: u32, dim: usize) -> Result<Self> {
        if l == 0 {
            return Err(invalid("L", "lattice parameter must be at least 1"));
        }
        Ok(Self {
            l,
            displacer: Displacer::new(dim)?,
            cache: HashMap::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.displacer.dim()
    }

    fn lattice_displacement(&mut self, k: (i64, i64)) -> FockOperator {
        if let Some(d) = self.cache.get(&k) {
            return d.clone();
        }
        let neg = (-k.0, -k.1);
        let d = match self.cache.get(&neg) {
            Some(dn) => dn.adjoint(),
            None => self.displacer.displacement(lattice_point(k, self.l)),
        };
        self.cache.insert(k, d.clone());
        d
    }

    pub fn translation(&mut self, k: (i64, i64)) -> FockOperator {
        let sign = parity_sign(self.l as i64 * k.0 * k.1);
        let mut d = self.lattice_displacement(k);
        if sign < 0.0 {
            d.matrix.neg_mut();
        }
        d
    }

    /// `Σ_k coeffs_k T1^{k1} T2^{k2}`.
    pub fn operator_from(&mut self, coeffs: &CenteredGrid2D) -> FockOperator {
        let dim = self.dim();
        let mut matrix = DMatrix::<Complex64>::zeros(dim, dim);
        for (k, ck) in coeffs.support() {
            let t = self.translation(k);
            matrix.zip_apply(&t.matrix, |acc, v| *acc += ck * v);
        }
        FockOperator { matrix }
    }

    /// `φ_n = T1^{n1} T2^{n2} φ_0 = (-1)^{L n1 n2} |z_n>`.
    pub fn lattice_vector(&self, n: (i64, i64)) -> Result<FockVector> {
        let sign = parity_sign(self.l as i64 * n.0 * n.1);
        Ok(coherent_vector(lattice_point(n, self.l), self.dim())?.scaled(Complex64::new(sign, 0.0)))
    }

    /// Smallest `N` meeting the tail rule for every coefficient of magnitude
    /// above `threshold`.
    pub fn required_dim(&self, coeffs: &CenteredGrid2D, threshold: f64) -> f64 {
        coeffs
            .support()
            .into_iter()
            .filter(|(_, v)| v.norm() > threshold)
            .map(|(k, _)| tail_rule(lattice_point(k, self.l).norm_sqr()))
            .fold(0.0, f64::max)
    }
}

/// `X = Σ_k c_k T1^{k1} T2^{k2}`.
pub fn build_x(c: &CenteredGrid2D, l: u32, dim: usize) -> Result<FockOperator> {
    Ok(FockLattice::new(l, dim)?.operator_from(c))
}

/// `B = X b X⁻¹`.
pub fn build_b(x: &FockOperator, x_inv: &FockOperator) -> Result<FockOperator> {
    if x.dim() != x_inv.dim() {
        return Err(Error::Mismatch(format!("dimensions {} and {}", x.dim(), x_inv.dim())));
    }
    let b = annihilator(x.dim())?;
    Ok(x.compose(&b).compose(x_inv))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UncertaintyRecord {
    pub n: (i64, i64),
    #[serde(rename = "dQ")]
    pub dq: f64,
    #[serde(rename = "dP")]
    pub dp: f64,
    pub product: f64,
    /// `½ <Ψ_n, [B, B†] Ψ_n>`.
    pub half_commutator_expectation: f64,
    /// `½ (‖B† Ψ_n‖² - |z_n|²)`, the common variance predicted by the eigenrelation.
    pub predicted_variance: f64,
}

/// `X`, `X⁻¹` and `B` for one coefficient set on one truncation.
#[derive(Clone, Debug)]
pub struct FockSystem {
    pub l: u32,
    pub lattice: FockLattice,
    pub x: FockOperator,
    pub x_inv: FockOperator,
    pub b: FockOperator,
    pub coefficient_truncation_dim: f64,
}

/// Coefficients below this magnitude are ignored by the truncation diagnostic.
const SIGNIFICANT_COEFFICIENT: f64 = 1e-12;

impl FockSystem {
    pub fn new(l: u32, c: &CenteredGrid2D, dual: &CenteredGrid2D, dim: usize) -> Result<Self> {
        let mut lattice = FockLattice::new(l, dim)?;
        let x = lattice.operator_from(c);
        let x_inv = lattice.operator_from(dual);
        let b = build_b(&x, &x_inv)?;
        let coefficient_truncation_dim = lattice
            .required_dim(c, SIGNIFICANT_COEFFICIENT)
            .max(lattice.required_dim(dual, SIGNIFICANT_COEFFICIENT));
        Ok(Self {
            l,
            lattice,
            x,
            x_inv,
            b,
            coefficient_truncation_dim,
        })
    }

    /// Exact coefficients for `L` on the default extraction grid.
    pub fn exact(l: u32, dim: usize) -> Result<Self> {
        let set = CoefficientSet2D::extract(l, ExtractionOptions::default())?;
        Self::new(l, &set.c, &set.dual, dim)
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    /// `Ψ_n = X φ_n`.
    pub fn psi(&self, n: (i64, i64)) -> Result<FockVector> {
        Ok(self.x.apply(&self.lattice.lattice_vector(n)?))
    }

    /// `‖B Ψ_n - z_n Ψ_n‖`.
    pub fn eigen_residual(&self, n: (i64, i64)) -> Result<f64> {
        let psi = self.psi(n)?;
        let z = lattice_point(n, self.l);
        Ok(self.b.apply(&psi).distance(&psi.scaled(z)))
    }

    pub fn uncertainty(&self, n: (i64, i64)) -> Result<UncertaintyRecord> {
        let psi = self.psi(n)?;
        let psi = psi.scaled(Complex64::new(1.0 / psi.norm(), 0.0));
        let bd = self.b.adjoint();
        let q = FockOperator {
            matrix: (&self.b.matrix + &bd.matrix) * Complex64::new(FRAC_1_SQRT_2, 0.0),
        };
        let p = FockOperator {
            matrix: (&bd.matrix - &self.b.matrix) * Complex64::new(0.0, FRAC_1_SQRT_2),
        };
        let variance = |op: &FockOperator| {
            let v = op.apply(&psi);
            let mean = psi.inner(&v).re;
            (v.amplitudes.norm_squared() - mean * mean).max(0.0)
        };
        let dq = variance(&q).sqrt();
        let dp = variance(&p).sqrt();
        let bpsi = self.b.apply(&psi).amplitudes.norm_squared();
        let bdpsi = bd.apply(&psi).amplitudes.norm_squared();
        let z = lattice_point(n, self.l);
        Ok(UncertaintyRecord {
            n,
            dq,
            dp,
            product: dq * dp,
            half_commutator_expectation: 0.5 * (bdpsi - bpsi),
            predicted_variance: 0.5 * (bdpsi - z.norm_sqr()),
        })
    }

    /// Largest singular value of `[B, B†] - 1` on the low half-block.
    pub fn commutator_deviation(&self) -> f64 {
        self.b.commutator(&self.b.adjoint()).low_block_deviation_from_identity()
    }

    /// `<Ψ_n, Ψ_m>`.
    pub fn gram(&self, n: (i64, i64), m: (i64, i64)) -> Result<Complex64> {
        Ok(self.psi(n)?.inner(&self.psi(m)?))
    }

    /// Distance between the dual-built `X⁻¹` and the numerical inverse of `X`
    /// on the low half-block.
    pub fn inverse_crosscheck(&self) -> Result<f64> {
        let inv = self
            .x
            .matrix
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Mismatch("X is numerically singular".into()))?;
        Ok(self.x_inv.low_block_distance(&FockOperator { matrix: inv }))
    }
}

/// Uncertainty record for `Ψ_n` built from the exact coefficients.
pub fn uncertainty_report(n: (i64, i64), l: u32, dim: usize) -> Result<UncertaintyRecord> {
    FockSystem::exact(l, dim)?.uncertainty(n)
}

pub fn commutator_deviation(l: u32, dim: usize) -> Result<f64> {
    Ok(FockSystem::exact(l, dim)?.commutator_deviation())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenRecord {
    pub n: (i64, i64),
    pub eigenvalue: Complex64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GramEntry {
    pub n: (i64, i64),
    pub m: (i64, i64),
    pub fock: Complex64,
    pub analytic: Complex64,
}

/// All Fock-space checks for `‖n‖∞ <= n_max` on one truncation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FockVerifyReport {
    #[serde(rename = "L")]
    pub l: u32,
    #[serde(rename = "N")]
    pub dim: usize,
    pub n_max: usize,
    pub eigen: Vec<EigenRecord>,
    pub max_eigen_residual: f64,
    pub uncertainty: Vec<UncertaintyRecord>,
    pub max_uncertainty_gap: f64,
    pub max_variance_gap: f64,
    pub gram: Vec<GramEntry>,
    pub max_gram_diff: f64,
    pub self_adjoint_defect: f64,
    pub inverse_crosscheck: f64,
    pub commutator_deviation: f64,
    pub coefficient_l1_norm: f64,
    /// Tail-rule dimension for the coefficients above `1e-12`; informational.
    pub coefficient_truncation_dim: f64,
}

fn index_square(n_max: usize) -> Vec<(i64, i64)> {
    let r = n_max as i64;
    (-r..=r).flat_map(|a| (-r..=r).map(move |b| (a, b))).collect()
}

pub fn verify(set: &CoefficientSet2D, dim: usize, n_max: usize) -> Result<FockVerifyReport> {
    let sys = FockSystem::new(set.l, &set.c, &set.dual, dim)?;
    let indices = index_square(n_max);
    let analytic = gram_2d(&set.c, set.l, 2 * n_max);

    let mut eigen = Vec::new();
    let mut uncertainty = Vec::new();
    let mut psis = Vec::new();
    for &n in &indices {
        eigen.push(EigenRecord {
            n,
            eigenvalue: lattice_point(n, set.l),
            residual: sys.eigen_residual(n)?,
        });
        uncertainty.push(sys.uncertainty(n)?);
        psis.push(sys.psi(n)?);
    }
    let mut gram = Vec::new();
    for (i, &n) in indices.iter().enumerate() {
        for (j, &m) in indices.iter().enumerate() {
            gram.push(GramEntry {
                n,
                m,
                fock: psis[i].inner(&psis[j]),
                analytic: analytic.entries.get(m.0 - n.0, m.1 - n.1),
            });
        }
    }
    let max = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0, f64::max);
    Ok(FockVerifyReport {
        l: set.l,
        dim,
        n_max,
        max_eigen_residual: max(&mut eigen.iter().map(|e| e.residual)),
        max_uncertainty_gap: max(&mut uncertainty
            .iter()
            .map(|u| (u.product - u.half_commutator_expectation.abs()).abs())),
        max_variance_gap: max(&mut uncertainty.iter().map(|u| {
            let (q2, p2) = (u.dq * u.dq, u.dp * u.dp);
            (q2 - u.predicted_variance).abs().max((p2 - u.predicted_variance).abs())
        })),
        max_gram_diff: max(&mut gram.iter().map(|g| (g.fock - g.analytic).norm())),
        eigen,
        uncertainty,
        gram,
        self_adjoint_defect: sys.x.self_adjoint_defect(),
        inverse_crosscheck: sys.inverse_crosscheck()?,
        commutator_deviation: sys.commutator_deviation(),
        coefficient_l1_norm: set.c.l1_norm(),
        coefficient_truncation_dim: sys.coefficient_truncation_dim,
    })
}

/// Largest change of the physical quantities (Gram entries, norms,
/// uncertainties, commutator expectations) between two truncations.
pub fn stability_gap(a: &FockVerifyReport, b: &FockVerifyReport) -> Result<f64> {
    if a.gram.len() != b.gram.len() || a.uncertainty.len() != b.uncertainty.len() {
        return Err(Error::Mismatch("reports cover different index sets".into()));
    }
    let gram = a
        .gram
        .iter()
        .zip(&b.gram)
        .map(|(x, y)| (x.fock - y.fock).norm());
    let unc = a.uncertainty.iter().zip(&b.uncertainty).flat_map(|(x, y)| {
        [
            (x.dq - y.dq).abs(),
            (x.dp - y.dp).abs(),
            (x.product - y.product).abs(),
            (x.half_commutator_expectation - y.half_commutator_expectation).abs(),
        ]
    });
    Ok(gram.chain(unc).fold(0.0, f64::max))
}
