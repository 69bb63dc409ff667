use std::f64::consts::{PI, TAU};

use lattice_ortho::core1d::*;
use lattice_ortho::examples1d::*;
use lattice_ortho::{CenteredSeq, TorusFunction1D};
use num_complex::Complex64;
use proptest::prelude::*;

fn box_pipeline(a: f64, normalize: bool) -> Pipeline1DReport {
    let seq = box_overlaps(BoxSeed::new(a).unwrap());
    run_pipeline(&seq, PipelineOptions { normalize, ..Default::default() }).unwrap()
}

/// Fourier coefficient of a real even function by adaptive quadrature.
fn quad_coefficient(f: impl Fn(f64) -> f64, l: i64) -> f64 {
    let g = |p: f64| f(p) * (l as f64 * p).cos();
    quadrature::double_exponential::integrate(g, 0.0, TAU, 1e-13).integral / TAU
}

#[test]
fn box_three_halves_norms() {
    let rep = box_pipeline(1.5, false);
    assert!((rep.sum_sq_c - 2.0 / 5f64.sqrt()).abs() < 1e-6);
    assert!((rep.sum_rule - 1.0).norm() < 1e-8);
    let c5 = rep.coefficients.c.get(5).norm();
    let d5 = rep.coefficients.d.get(5).norm();
    assert!((5e-4..=2e-3).contains(&c5), "|c_5| = {c5}");
    assert!((1e-4..=4e-4).contains(&d5), "|d_5| = {d5}");
    // Raw mode: the seed has norm² a_0.
    assert!((rep.sum_sq_d - 1.5).abs() < 1e-8);
}

#[test]
fn box_three_halves_normalized_parseval() {
    let rep = box_pipeline(1.5, true);
    assert!((rep.sum_sq_d - 1.0).abs() < 1e-8);
    assert!((rep.sum_sq_c - 3.0 / 5f64.sqrt()).abs() < 1e-6);
}

#[test]
fn box_density_exact_on_grid() {
    let seq = box_overlaps(BoxSeed::new(1.5).unwrap());
    for m in [12, 64, 1000] {
        let alpha = spectral_density(&seq, m, false).unwrap();
        for (i, v) in alpha.samples.iter().enumerate() {
            assert!((v.re - (1.5 + alpha.node(i).cos())).abs() < 1e-15);
        }
    }
}

#[test]
fn narrow_box_is_rescaled_delta() {
    for a in [0.3, 0.75] {
        let rep = box_pipeline(a, false);
        assert!((rep.coefficients.c.get(0).re - 1.0 / a.sqrt()).abs() < 1e-14);
        assert!(rep.coefficients.c.iter().filter(|(l, _)| *l != 0).all(|(_, v)| v.norm() < 1e-15));
    }
}

#[test]
fn gram_rows_for_positive_examples() {
    let dyadic = dilation_overlaps(DilationSeed::default());
    let reports = [
        box_pipeline(1.5, false),
        run_pipeline(&dyadic, PipelineOptions::default()).unwrap(),
    ];
    for rep in reports {
        assert_eq!(rep.gram.n_max, 8);
        assert!(rep.gram.max_off_center() <= 1e-8);
        assert!((rep.gram.center() - 1.0).norm() <= 1e-8);
        assert!((rep.sum_rule - 1.0).norm() < 1e-8);
        assert!(rep.symbol_residual <= 1e-8);
    }
}

#[test]
fn box_two_refuses_and_diverges() {
    let seq = box_overlaps(BoxSeed::new(2.0).unwrap());
    let alpha = spectral_density(&seq, 4096, false).unwrap();
    let rep = check_positivity(&alpha).unwrap();
    assert_eq!(rep.status, PositivityStatus::HasZero);
    assert!((rep.argmin - PI).abs() < 1e-6);
    assert!(run_pipeline(&seq, PipelineOptions::default()).is_err());

    let rows = divergence_probe(&seq, &[256, 1024, 4096]).unwrap();
    assert!(rows.windows(2).all(|w| w[1].sum_sq > w[0].sum_sq));
    assert!(rows[2].sum_sq > 10.0);
}

#[test]
fn probe_converges_for_positive_densities() {
    let box_seq = box_overlaps(BoxSeed::new(1.5).unwrap());
    for row in divergence_probe(&box_seq, &[256, 1024, 4096]).unwrap() {
        assert!((row.sum_sq - 2.0 / 5f64.sqrt()).abs() < 1e-6);
    }
    let dyadic = dilation_overlaps(DilationSeed::default());
    for row in divergence_probe(&dyadic, &[1024, 4096]).unwrap() {
        assert!((row.sum_sq - 3.0).abs() < 1e-6);
    }
}

#[test]
fn dyadic_density_values() {
    let dyadic = dilation_overlaps(DilationSeed::default());
    let alpha = spectral_density(&dyadic, 1024, false).unwrap();
    for (i, v) in alpha.samples.iter().enumerate() {
        assert!((v.re - dilation_density_closed(alpha.node(i))).abs() < 1e-12);
    }
    assert!((alpha.samples[0].re - 5.82843).abs() < 5e-5);
    assert!((alpha.samples[512].re - 0.17157).abs() < 5e-5);
    let rep = run_pipeline(&dyadic, PipelineOptions::default()).unwrap();
    assert!((rep.sum_sq_c - 3.0).abs() < 1e-6);
    assert!((rep.sum_sq_d - 1.0).abs() < 1e-8);
}

#[test]
fn dyadic_truncation_within_tail_bound() {
    let seed = DilationSeed::new(60).unwrap();
    let alpha = spectral_density(&dilation_overlaps(seed), 512, false).unwrap();
    let worst = (0..512)
        .map(|m| (alpha.samples[m].re - dilation_density_closed(alpha.node(m))).abs())
        .fold(0.0, f64::max);
    assert!(worst <= seed.tail_bound(), "{worst} > {}", seed.tail_bound());
}

#[test]
fn short_dyadic_truncation_has_larger_residual() {
    let dyadic = dilation_overlaps(DilationSeed::default());
    let alpha = spectral_density(&dyadic, 4096, false).unwrap();
    let wide = CoefficientSet1D::extract(&alpha, 64).unwrap();
    let narrow = CoefficientSet1D::extract(&alpha, 2).unwrap();
    let r64 = symbol_inverse_residual(&wide.c, &wide.d, 4096);
    let r2 = symbol_inverse_residual(&narrow.c, &narrow.d, 4096);
    assert!(r2 > r64);
}

#[test]
fn decay_magnitudes_of_box() {
    let rep = box_pipeline(1.5, false);
    let c5 = rep.decay_c.magnitudes[5].1;
    let d5 = rep.decay_d.magnitudes[5].1;
    assert!(c5 > 1e-4 && c5 < 1e-2);
    assert!(d5 > 2e-5 && d5 < 2e-3);
    // Geometric decay: the fitted slope is far steeper than any power law
    // would give at this range.
    assert!(rep.decay_c.log_slope.unwrap() < -0.5);
}

type Density = Box<dyn Fn(f64) -> f64>;

#[test]
fn coefficients_match_adaptive_quadrature() {
    let cases: [(Density, &str); 3] = [
        (Box::new(|_| 1.0), "one"),
        (Box::new(|_| 0.4), "const"),
        (Box::new(|p: f64| 1.5 + p.cos()), "shifted cosine"),
    ];
    for (f, name) in cases.iter() {
        let alpha = TorusFunction1D::from_real_fn(4096, false, f);
        let set = CoefficientSet1D::extract(&alpha, 16).unwrap();
        for l in 0..=16 {
            let qc = quad_coefficient(|p| 1.0 / f(p).sqrt(), l);
            let qd = quad_coefficient(|p| f(p).sqrt(), l);
            assert!((set.c.get(l).re - qc).abs() < 1e-9, "{name} c_{l}");
            assert!((set.d.get(l).re - qd).abs() < 1e-9, "{name} d_{l}");
        }
    }
}

#[test]
fn overlap_json_round_trip() {
    let seq = box_overlaps(BoxSeed::new(1.5).unwrap());
    let text = seq.to_json_string();
    assert!(text.contains("\"J\":1"));
    assert_eq!(OverlapSequence1D::from_json_str(&text).unwrap(), seq);
}

fn cosine_family() -> impl Strategy<Value = (f64, f64)> {
    // α(p) = base + amp cos p with base - |amp| >= 0.2.
    (0.2f64..3.0, -1.0f64..1.0).prop_map(|(gap, t)| {
        let amp = t * 2.0;
        (gap + amp.abs(), amp)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gram_sum_rule_and_symmetry((base, amp) in cosine_family()) {
        let a0 = base;
        let seq = OverlapSequence1D::new_raw(CenteredSeq::new(vec![
            Complex64::new(amp / 2.0, 0.0),
            Complex64::new(a0, 0.0),
            Complex64::new(amp / 2.0, 0.0),
        ]).unwrap()).unwrap().normalized();
        let rep = run_pipeline(&seq, PipelineOptions::default()).unwrap();
        prop_assert!((rep.gram.center() - 1.0).norm() <= 1e-8);
        prop_assert!(rep.gram.max_off_center() <= 1e-8);
        prop_assert!((rep.sum_rule - 1.0).norm() <= 1e-8);
        prop_assert!((rep.sum_sq_d - 1.0).abs() <= 1e-8);
        prop_assert!(rep.coefficients.c.hermitian_defect() <= 1e-12);
        prop_assert!(rep.coefficients.d.hermitian_defect() <= 1e-12);
    }

    #[test]
    fn grid_doubling_is_stable((base, amp) in cosine_family()) {
        let f = |p: f64| base + amp * p.cos();
        let coarse = CoefficientSet1D::extract(&TorusFunction1D::from_real_fn(2048, false, f), 64).unwrap();
        let fine = CoefficientSet1D::extract(&TorusFunction1D::from_real_fn(4096, false, f), 64).unwrap();
        for l in -64..=64 {
            prop_assert!((coarse.c.get(l) - fine.c.get(l)).norm() <= 1e-10);
            prop_assert!((coarse.d.get(l) - fine.d.get(l)).norm() <= 1e-10);
        }
    }

    #[test]
    fn box_overlaps_shape(a in 0.05f64..6.0) {
        let seq = box_overlaps(BoxSeed::new(a).unwrap());
        prop_assert_eq!(seq.half_width(), a.ceil() as usize - 1);
        for (j, v) in seq.values().iter() {
            prop_assert!(v.re >= 0.0);
            prop_assert_eq!(v.im, 0.0);
            prop_assert_eq!(v, seq.get(-j));
        }
        prop_assert!(seq.get(seq.half_width() as i64).re > 0.0);
    }
}
