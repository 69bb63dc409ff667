use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;

/// Terms smaller than this fraction of the largest one are dropped.
const THETA_RELATIVE_CUTOFF: f64 = 1e-18;
const THETA_MAX_TERMS: i64 = 10_000;

/// Argument of `θ₃(z, q) = Σ_n q^{n²} e^{2inz}` with its truncation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThetaArg {
    pub z: Complex64,
    pub q: f64,
    /// Terms `n` with `|n - n_peak| <= tail_terms` are summed.
    pub tail_terms: usize,
    /// Index of the largest term.
    pub peak: i64,
}

impl ThetaArg {
    /// Pick the truncation from the exact term magnitudes
    /// `exp(n² ln q - 2n Im z)`. Any finite `z` is accepted since the Gaussian
    /// factor always wins; the term count is capped.
    pub fn new(z: Complex64, q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) || !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::ThetaDivergent { q, imag: z.im });
        }
        let lq = q.ln();
        let y = z.im;
        let log_mag = |n: i64| (n * n) as f64 * lq - 2.0 * n as f64 * y;
        let vertex = y / lq;
        if !vertex.is_finite() || vertex.abs() > THETA_MAX_TERMS as f64 {
            return Err(Error::ThetaDivergent { q, imag: y });
        }
        let peak = [vertex.floor() as i64, vertex.ceil() as i64]
            .into_iter()
            .max_by(|a, b| log_mag(*a).total_cmp(&log_mag(*b)))
            .unwrap();
        let floor = log_mag(peak) + THETA_RELATIVE_CUTOFF.ln();
        let mut tail = 1i64;
        while log_mag(peak + tail) > floor || log_mag(peak - tail) > floor {
            tail += 1;
            if tail > THETA_MAX_TERMS {
                return Err(Error::ThetaDivergent { q, imag: y });
            }
        }
        Ok(Self {
            z,
            q,
            tail_terms: tail as usize,
            peak,
        })
    }
}

pub fn theta3(arg: &ThetaArg) -> Complex64 {
    let lq = arg.q.ln();
    let t = arg.tail_terms as i64;
    let terms: Vec<Complex64> = (arg.peak - t..=arg.peak + t)
        .map(|n| {
            let nf = n as f64;
            Complex64::from_polar((nf * nf * lq - 2.0 * nf * arg.z.im).exp(), 2.0 * nf * arg.z.re)
        })
        .collect();
    pairwise_sum(&terms)
}

/// `θ₃(z, q)` with automatic truncation.
pub fn theta3_at(z: Complex64, q: f64) -> Result<Complex64> {
    Ok(theta3(&ThetaArg::new(z, q)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn bound(l: f64) -> f64 {
        let t = theta3_at(Complex64::default(), (-PI * l / 2.0).exp()).unwrap();
        t.re * t.re - 1.0
    }

    #[test]
    fn bound_values() {
        assert!((bound(1.0) - 1.01497).abs() < 1e-5);
        assert!((bound(2.0) - 0.180341).abs() < 1e-6);
        assert!((bound(3.0) - 0.036256).abs() < 1e-6);
    }

    #[test]
    fn matches_naive_sum() {
        let z = Complex64::new(0.7, -0.3);
        let q: f64 = 0.4;
        let naive: Complex64 = (-60i64..=60)
            .map(|n| q.powi((n * n) as i32) * (Complex64::i() * 2.0 * n as f64 * z).exp())
            .sum();
        assert!((theta3_at(z, q).unwrap() - naive).norm() < 1e-14);
    }

    #[test]
    fn large_imaginary_shift_moves_the_peak() {
        // Term magnitudes equal 1 at n = 0 and n = -1.
        let q = (-4.0 * PI).exp();
        let arg = ThetaArg::new(Complex64::new(0.3, 2.0 * PI), q).unwrap();
        assert!(arg.peak == 0 || arg.peak == -1);
        let naive: Complex64 = (-20i64..=20)
            .map(|n| {
                let nf = n as f64;
                Complex64::from_polar((nf * nf * q.ln() - 4.0 * PI * nf).exp(), 0.6 * nf)
            })
            .sum();
        assert!((theta3(&arg) - naive).norm() < 1e-14);
    }

    #[test]
    fn quasi_periodicity() {
        // θ₃(z + π, q) = θ₃(z, q)
        let q = 0.3;
        let z = Complex64::new(0.4, 0.2);
        let a = theta3_at(z, q).unwrap();
        let b = theta3_at(z + PI, q).unwrap();
        assert!((a - b).norm() < 1e-13);
    }

    #[test]
    fn rejects_bad_nome() {
        for q in [0.0, 1.0, 1.5, -0.2, f64::NAN] {
            assert!(ThetaArg::new(Complex64::default(), q).is_err());
        }
        assert!(ThetaArg::new(Complex64::new(f64::INFINITY, 0.0), 0.5).is_err());
        assert!(ThetaArg::new(Complex64::new(0.0, 1e9), 0.5).is_err());
    }
}
