//! The kq (Zak) representation on the cell `[0, 2π/A) × [0, a)`.
//!
//! `<Φ_{k,q}, f> = sqrt(A/2π) Σ_l e^{-iklA} f(q + la)` for vectors given in
//! the position representation. Lattice translations act diagonally:
//! `T1` (momentum kick by `a`) multiplies by `e^{iqa}` and `T2` (shift by `a`)
//! by `e^{-ikA}`.

use std::f64::consts::{PI, TAU};
use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::lattice2d::{coherent_overlap, CoefficientSet2D, ExtractionOptions};
use crate::numeric::pairwise_sum;
use crate::torus::CenteredGrid2D;

pub const DEFAULT_ZAK_GRID: usize = 256;
/// `x²/2` above this keeps the Gaussian below `1e-16`.
const GAUSSIAN_CUTOFF: f64 = 36.9;

/// Vacuum in position representation, `π^{-1/4} e^{-x²/2}`.
pub fn vacuum_wavefunction(x: f64) -> f64 {
    PI.powf(-0.25) * (-0.5 * x * x).exp()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KqBox {
    #[serde(rename = "A")]
    pub big_a: f64,
    pub a: f64,
    #[serde(rename = "L")]
    pub l: u32,
    pub grid_k: usize,
    pub grid_q: usize,
}

impl KqBox {
    pub fn new(big_a: f64, a: f64, l: u32, grid_k: usize, grid_q: usize) -> Result<Self> {
        if !(big_a.is_finite() && big_a > 0.0) {
            return Err(invalid("A", format!("must be positive, got {big_a}")));
        }
        if !(a.is_finite() && a > 0.0) {
            return Err(invalid("a", format!("must be positive, got {a}")));
        }
        if l == 0 {
            return Err(invalid("L", "lattice parameter must be at least 1"));
        }
        if grid_k == 0 || grid_q == 0 {
            return Err(invalid("grid", "grid sizes must be positive"));
        }
        Ok(Self {
            big_a,
            a,
            l,
            grid_k,
            grid_q,
        })
    }

    /// `a = sqrt(2πL)` and `A = a` on a square grid.
    pub fn for_lattice(l: u32, grid: usize) -> Result<Self> {
        let a = (TAU * l as f64).sqrt();
        Self::new(a, a, l, grid, grid)
    }

    pub fn k_period(&self) -> f64 {
        TAU / self.big_a
    }

    pub fn cell_measure(&self) -> f64 {
        self.k_period() * self.a
    }

    pub fn k_node(&self, i: usize) -> f64 {
        self.k_period() * i as f64 / self.grid_k as f64
    }

    pub fn q_node(&self, j: usize) -> f64 {
        self.a * j as f64 / self.grid_q as f64
    }

    /// Smallest `tail` with `e^{-(q + tail·a)²/2} < 1e-16` over the cell.
    pub fn required_tail(&self) -> usize {
        ((2.0 * GAUSSIAN_CUTOFF).sqrt() / self.a).ceil() as usize + 1
    }

    fn node_weight(&self) -> f64 {
        self.cell_measure() / (self.grid_k * self.grid_q) as f64
    }
}

/// Samples on the box grid, `k` outer.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZakSample {
    #[serde(rename = "box")]
    pub kq_box: KqBox,
    pub provenance: String,
    pub values: Vec<Complex64>,
}

impl ZakSample {
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.kq_box.grid_q + j]
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["k", "q", "re", "im"])?;
        for i in 0..self.kq_box.grid_k {
            for j in 0..self.kq_box.grid_q {
                let v = self.at(i, j);
                w.write_record([
                    self.kq_box.k_node(i).to_string(),
                    self.kq_box.q_node(j).to_string(),
                    v.re.to_string(),
                    v.im.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json_grid(&self) -> serde_json::Value {
        let b = &self.kq_box;
        let rows = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..b.grid_k)
                .map(|i| (0..b.grid_q).map(|j| f(&self.at(i, j))).collect())
                .collect()
        };
        serde_json::json!({
            "provenance": self.provenance,
            "A": b.big_a,
            "a": b.a,
            "L": b.l,
            "k": (0..b.grid_k).map(|i| b.k_node(i)).collect::<Vec<_>>(),
            "q": (0..b.grid_q).map(|j| b.q_node(j)).collect::<Vec<_>>(),
            "re": rows(|v| v.re),
            "im": rows(|v| v.im),
        })
    }
}

/// `sqrt(A/2π) Σ_{|l| <= tail} e^{-iklA} φ₀(q + la)`.
pub fn zak_gaussian(kq_box: &KqBox, tail: usize) -> Result<ZakSample> {
    let need = kq_box.required_tail();
    if tail < need {
        return Err(invalid("tail", format!("{tail} terms leave a Gaussian tail above 1e-16; need {need}")));
    }
    let t = tail as i64;
    let scale = (kq_box.big_a / TAU).sqrt();
    let gauss: Vec<Vec<f64>> = (0..kq_box.grid_q)
        .map(|j| {
            let q = kq_box.q_node(j);
            (-t..=t).map(|l| vacuum_wavefunction(q + l as f64 * kq_box.a)).collect()
        })
        .collect();
    let mut values = Vec::with_capacity(kq_box.grid_k * kq_box.grid_q);
    let mut buf = vec![Complex64::default(); 2 * tail + 1];
    for i in 0..kq_box.grid_k {
        let k = kq_box.k_node(i);
        let phases: Vec<Complex64> = (-t..=t)
            .map(|l| Complex64::from_polar(scale, -k * l as f64 * kq_box.big_a))
            .collect();
        for g in &gauss {
            for ((b, p), gv) in buf.iter_mut().zip(&phases).zip(g) {
                *b = p * gv;
            }
            values.push(pairwise_sum(&buf));
        }
    }
    Ok(ZakSample {
        kq_box: *kq_box,
        provenance: "vacuum".into(),
        values,
    })
}

pub fn zak_gaussian_default(kq_box: &KqBox) -> Result<ZakSample> {
    zak_gaussian(kq_box, kq_box.required_tail())
}

/// Multiply a transform by the phase of `T1^{n1} T2^{n2}`.
pub fn translate(sample: &ZakSample, n: (i64, i64)) -> ZakSample {
    let b = &sample.kq_box;
    let mut values = Vec::with_capacity(sample.values.len());
    for i in 0..b.grid_k {
        for j in 0..b.grid_q {
            let ph = b.q_node(j) * b.a * n.0 as f64 - b.k_node(i) * b.big_a * n.1 as f64;
            values.push(sample.at(i, j) * Complex64::from_polar(1.0, ph));
        }
    }
    ZakSample {
        kq_box: *b,
        provenance: format!("T^({},{}) {}", n.0, n.1, sample.provenance),
        values,
    }
}

/// Transform of `Ψ_0 = Σ_k c_k T1^{k1} T2^{k2} φ₀`.
pub fn zak_psi(c: &CenteredGrid2D, kq_box: &KqBox, tail: usize) -> Result<ZakSample> {
    let vac = zak_gaussian(kq_box, tail)?;
    let r = c.radius() as i64;
    let side = (2 * r + 1) as usize;
    let mut values = Vec::with_capacity(vac.values.len());
    let mut inner = vec![Complex64::default(); side];
    let mut buf = vec![Complex64::default(); side];
    let q_phase: Vec<Vec<Complex64>> = (0..kq_box.grid_q)
        .map(|j| {
            (-r..=r)
                .map(|k1| Complex64::from_polar(1.0, kq_box.q_node(j) * kq_box.a * k1 as f64))
                .collect()
        })
        .collect();
    for i in 0..kq_box.grid_k {
        let kk = kq_box.k_node(i);
        // inner[k1] = Σ_{k2} c_{k1,k2} e^{-ikA k2}
        for (a, slot) in inner.iter_mut().enumerate() {
            for (b, t) in buf.iter_mut().enumerate() {
                let k2 = b as i64 - r;
                *t = c.values()[a * side + b] * Complex64::from_polar(1.0, -kk * kq_box.big_a * k2 as f64);
            }
            *slot = pairwise_sum(&buf);
        }
        for (j, qp) in q_phase.iter().enumerate() {
            for ((t, x), p) in buf.iter_mut().zip(&inner).zip(qp) {
                *t = x * p;
            }
            values.push(pairwise_sum(&buf) * vac.at(i, j));
        }
    }
    Ok(ZakSample {
        kq_box: *kq_box,
        provenance: format!("psi0 L={} K={}", kq_box.l, c.radius()),
        values,
    })
}

/// Trapezoid estimate of `∫∫ |sample|² dk dq`.
pub fn zak_resolution_check(sample: &ZakSample) -> f64 {
    let sq: Vec<f64> = sample.values.iter().map(|v| v.norm_sqr()).collect();
    pairwise_sum(&sq) * sample.kq_box.node_weight()
}

/// Trapezoid estimate of `∫∫ e^{iqa n1 - ikA n2} |sample|² dk dq`, which is
/// `<Ψ, T1^{n1} T2^{n2} Ψ>` for the transformed vector `Ψ`.
pub fn zak_orthogonality_integral(sample: &ZakSample, n: (i64, i64)) -> Complex64 {
    let b = &sample.kq_box;
    let mut terms = Vec::with_capacity(sample.values.len());
    for i in 0..b.grid_k {
        for j in 0..b.grid_q {
            let ph = b.q_node(j) * b.a * n.0 as f64 - b.k_node(i) * b.big_a * n.1 as f64;
            terms.push(Complex64::from_polar(sample.at(i, j).norm_sqr(), ph));
        }
    }
    pairwise_sum(&terms) * b.node_weight()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessReport {
    #[serde(rename = "L")]
    pub l: u32,
    pub n_max: usize,
    /// Largest `|<s, e_n>|` over `‖n‖∞ <= n_max` from the closed form.
    pub max_modulus: f64,
    pub argmax: (i64, i64),
    pub cell_measure: f64,
    /// Largest difference between closed form and trapezoid values.
    pub trapezoid_max_diff: f64,
}

/// `∫_0^a e^{-iβq} dq`.
fn oscillatory_integral(beta: f64, a: f64) -> Complex64 {
    if beta == 0.0 {
        return Complex64::new(a, 0.0);
    }
    (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -beta * a)) / Complex64::new(0.0, beta)
}

/// Pairings of `s(k, q) = e^{iqa/L}` with `e_n = e^{-iqa n1 + ikA n2}`.
/// For `L > 1` every pairing vanishes; for `L = 1` the witness is `e_(-1,0)`.
pub fn incompleteness_witness(kq_box: &KqBox, n_max: usize) -> WitnessReport {
    let l = kq_box.l;
    let r = n_max as i64;
    let inv_l = 1.0 / l as f64;
    let mut max_modulus = 0.0;
    let mut argmax = (0, 0);
    let mut trapezoid_max_diff: f64 = 0.0;
    for n1 in -r..=r {
        for n2 in -r..=r {
            let k_part = if n2 == 0 { kq_box.k_period() } else { 0.0 };
            let beta = kq_box.a * (n1 as f64 + inv_l);
            let beta = if l as i64 * n1 == -1 { 0.0 } else { beta };
            let closed = oscillatory_integral(beta, kq_box.a) * k_part;
            if closed.norm() > max_modulus {
                max_modulus = closed.norm();
                argmax = (n1, n2);
            }
            let mut terms = Vec::with_capacity(kq_box.grid_k * kq_box.grid_q);
            for i in 0..kq_box.grid_k {
                for j in 0..kq_box.grid_q {
                    let ph = -kq_box.q_node(j) * beta + kq_box.k_node(i) * kq_box.big_a * n2 as f64;
                    terms.push(Complex64::from_polar(1.0, ph));
                }
            }
            let trap = pairwise_sum(&terms) * kq_box.node_weight();
            trapezoid_max_diff = trapezoid_max_diff.max((trap - closed).norm());
        }
    }
    WitnessReport {
        l,
        n_max,
        max_modulus,
        argmax,
        cell_measure: kq_box.cell_measure(),
        trapezoid_max_diff,
    }
}

/// Piecewise-constant `|<Φ_{k,q}, Ψ>|²` equal to `AL/(2πaj)` on
/// `[0, 2π/A) × [0, aj/L)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileCandidate {
    pub j: u32,
    pub height: f64,
    pub q_extent: f64,
    /// Exact integral over the box.
    pub integral: f64,
}

impl ProfileCandidate {
    pub fn value(&self, q: f64) -> f64 {
        if q < self.q_extent {
            self.height
        } else {
            0.0
        }
    }

    /// Grid samples of the profile as a transform-like object.
    pub fn to_sample(&self, kq_box: &KqBox) -> ZakSample {
        let mut values = Vec::with_capacity(kq_box.grid_k * kq_box.grid_q);
        for _ in 0..kq_box.grid_k {
            for jq in 0..kq_box.grid_q {
                values.push(Complex64::new(self.value(kq_box.q_node(jq)), 0.0));
            }
        }
        ZakSample {
            kq_box: *kq_box,
            provenance: format!("profile j={}", self.j),
            values,
        }
    }
}

pub fn box_profile_candidates(kq_box: &KqBox, j: u32) -> Result<ProfileCandidate> {
    let l = kq_box.l;
    if j == 0 || j > l {
        return Err(invalid("j", format!("must lie in 1..={l}, got {j}")));
    }
    let height = kq_box.big_a * l as f64 / (TAU * kq_box.a * j as f64);
    let q_extent = kq_box.a * j as f64 / l as f64;
    Ok(ProfileCandidate {
        j,
        height,
        q_extent,
        integral: height * kq_box.k_period() * q_extent,
    })
}

/// Grid estimate of `(∫∫ (|sample|² - profile)² dk dq)^{1/2}`.
pub fn profile_distance(sample: &ZakSample, candidate: &ProfileCandidate) -> f64 {
    let b = &sample.kq_box;
    let mut terms = Vec::with_capacity(sample.values.len());
    for i in 0..b.grid_k {
        for jq in 0..b.grid_q {
            let d = sample.at(i, jq).norm_sqr() - candidate.value(b.q_node(jq));
            terms.push(d * d);
        }
    }
    (pairwise_sum(&terms) * b.node_weight()).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrthogonalityEntry {
    pub n: (i64, i64),
    pub value: Complex64,
    pub target: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZakVerifyReport {
    #[serde(rename = "L")]
    pub l: u32,
    pub grid: usize,
    pub vacuum_resolution: f64,
    pub psi_resolution: f64,
    pub orthogonality: Vec<OrthogonalityEntry>,
    pub max_orthogonality_error: f64,
    /// `∫∫ e^{iqa} |vacuum|²`, which equals the lattice overlap `I_(1,0)`.
    pub vacuum_neighbor_integral: Complex64,
    pub vacuum_neighbor_overlap: f64,
    pub witnesses: Vec<WitnessReport>,
    pub profiles: Vec<ProfileCandidate>,
    pub profile_distances: Vec<f64>,
}

/// Resolution, orthogonality, witness and profile checks for one `L`.
pub fn zak_verify(l: u32, grid: usize, n_max: usize, witness_ls: &[u32]) -> Result<ZakVerifyReport> {
    let kq_box = KqBox::for_lattice(l, grid)?;
    let tail = kq_box.required_tail();
    let vac = zak_gaussian(&kq_box, tail)?;
    let set = CoefficientSet2D::extract(
        l,
        ExtractionOptions {
            allow_critical: l == 1,
            ..Default::default()
        },
    )?;
    let psi = zak_psi(&set.c, &kq_box, tail)?;
    let r = n_max as i64;
    let orthogonality: Vec<OrthogonalityEntry> = (-r..=r)
        .flat_map(|a| (-r..=r).map(move |b| (a, b)))
        .map(|n| OrthogonalityEntry {
            n,
            value: zak_orthogonality_integral(&psi, n),
            target: if n == (0, 0) { 1.0 } else { 0.0 },
        })
        .collect();
    let max_orthogonality_error = orthogonality
        .iter()
        .map(|e| (e.value - e.target).norm())
        .fold(0.0, f64::max);
    let witnesses = witness_ls
        .iter()
        .map(|&wl| Ok(incompleteness_witness(&KqBox::for_lattice(wl, grid)?, 4)))
        .collect::<Result<Vec<_>>>()?;
    let profiles = (1..=l)
        .map(|j| box_profile_candidates(&kq_box, j))
        .collect::<Result<Vec<_>>>()?;
    let profile_distances = profiles.iter().map(|p| profile_distance(&psi, p)).collect();
    Ok(ZakVerifyReport {
        l,
        grid,
        vacuum_resolution: zak_resolution_check(&vac),
        psi_resolution: zak_resolution_check(&psi),
        orthogonality,
        max_orthogonality_error,
        vacuum_neighbor_integral: zak_orthogonality_integral(&vac, (1, 0)),
        vacuum_neighbor_overlap: coherent_overlap((1, 0), l),
        witnesses,
        profiles,
        profile_distances,
    })
}
