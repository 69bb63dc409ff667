use std::f64::consts::PI;

use lattice_ortho::fock::*;
use lattice_ortho::lattice2d::*;
use lattice_ortho::CenteredGrid2D;
use num_complex::Complex64;

fn exact_set(l: u32) -> CoefficientSet2D {
    CoefficientSet2D::extract(l, ExtractionOptions::default()).unwrap()
}

#[test]
fn verify_l2_default_truncation() {
    let set = exact_set(2);
    let rep = verify(&set, DEFAULT_DIM, 1).unwrap();
    assert!(rep.max_eigen_residual <= 1e-5, "{}", rep.max_eigen_residual);
    assert!(rep.max_uncertainty_gap <= 1e-5);
    assert!(rep.max_variance_gap <= 1e-5);
    assert!(rep.max_gram_diff <= 1e-6, "{}", rep.max_gram_diff);
    assert!(rep.self_adjoint_defect <= 1e-9);
    // B is not normal.
    assert!(rep.commutator_deviation > 1e-4);
    // First-order prediction: ‖[B,B†] - 1‖ ≈ 4πL e^{-πL/2}.
    let predicted = 4.0 * PI * 2.0 * (-PI).exp();
    assert!((rep.commutator_deviation / predicted - 1.0).abs() < 0.2, "{}", rep.commutator_deviation);

    let wider = verify(&set, DEFAULT_DIM + STABILITY_STEP, 1).unwrap();
    assert!(stability_gap(&rep, &wider).unwrap() <= 1e-8);
}

#[test]
fn dual_inverse_matches_matrix_inverse() {
    // The half-block of the default truncation still feels the edge through
    // X; at N = 180 the two inverses agree.
    let set = exact_set(2);
    let sys = FockSystem::new(2, &set.c, &set.dual, 180).unwrap();
    assert!(sys.inverse_crosscheck().unwrap() <= 1e-6);
    assert!(sys.x.compose(&sys.x_inv).low_block_deviation_from_identity() <= 1e-6);
}

#[test]
fn eigenvalues_follow_lattice_points() {
    let z = lattice_point((1, 0), 2);
    assert!((z - Complex64::new(0.0, (2.0 * PI).sqrt())).norm() < 1e-15);
    let sys = FockSystem::exact(2, DEFAULT_DIM).unwrap();
    assert!(sys.eigen_residual((0, 0)).unwrap() <= 1e-5);
    assert!(sys.eigen_residual((1, 0)).unwrap() <= 1e-5);
}

#[test]
fn identity_x_reduces_to_coherent_states() {
    let d = CenteredGrid2D::delta(0);
    let sys = FockSystem::new(2, &d, &d, 100).unwrap();
    assert_eq!(sys.x, FockOperator::identity(100));
    let u = sys.uncertainty((1, 0)).unwrap();
    assert!((u.dq - 0.5f64.sqrt()).abs() < 1e-10);
    assert!((u.dp - 0.5f64.sqrt()).abs() < 1e-10);
    assert!((u.product - 0.5).abs() < 1e-10);
    assert!(sys.commutator_deviation() < 1e-10);
    assert!(sys.eigen_residual((1, 1)).unwrap() < 1e-6);
}

#[test]
fn coherent_overlap_matches_lattice_overlap() {
    let v = coherent_vector(lattice_point((1, 0), 2), 80).unwrap();
    let vac = FockVector::vacuum(80);
    assert!((v.inner(&vac).re - (-PI).exp()).abs() < 1e-12);
    assert!((v.inner(&vac).re - coherent_overlap((1, 0), 2)).abs() < 1e-12);

    let z1 = Complex64::new(0.5, -1.0);
    let z2 = Complex64::new(-1.2, 0.3);
    let a = coherent_vector(z1, 80).unwrap();
    let b = coherent_vector(z2, 80).unwrap();
    let want = (-(z1.norm_sqr() + z2.norm_sqr()) / 2.0 + z1.conj() * z2).exp();
    assert!((a.inner(&b) - want).norm() < 1e-10);
}

#[test]
fn displacement_acts_on_vacuum() {
    let z = lattice_point((1, -1), 2);
    let d = displacement(z, 120).unwrap();
    let got = d.apply(&FockVector::vacuum(120));
    let want = coherent_vector(z, 120).unwrap();
    assert!(got.distance(&want) < 1e-10);
    assert!(d.unitarity_defect() < 1e-12);
}

#[test]
fn displacement_inverse_and_composition() {
    let n = 120;
    let disp = Displacer::new(n).unwrap();
    let z1 = Complex64::new(1.0, 0.5);
    let z2 = Complex64::new(-0.3, 1.4);
    let prod = disp.displacement(z1).compose(&disp.displacement(-z1));
    assert!(prod.low_block_deviation_from_identity() < 1e-9);

    let lhs = disp.displacement(z1).compose(&disp.displacement(z2));
    let phase = ((z1 * z2.conj() - z1.conj() * z2) / 2.0).exp();
    let mut rhs = disp.displacement(z1 + z2);
    rhs.matrix *= phase;
    assert!(lhs.low_block_distance(&rhs) < 1e-8);
}

#[test]
fn translation_composition_phase() {
    let mut lat = FockLattice::new(2, 160).unwrap();
    let t1 = lat.translation((1, 0));
    let t2 = lat.translation((0, 1));
    let t11 = lat.translation((1, 1));
    assert!(t1.compose(&t2).low_block_distance(&t11) < 1e-9);
    let d11 = displacement(lattice_point((1, 1), 2), 160).unwrap();
    // (-1)^{L n1 n2} = +1 for L = 2.
    assert!(t11.low_block_distance(&d11) < 1e-12);

    let mut odd = FockLattice::new(3, 180).unwrap();
    let t11 = odd.translation((1, 1));
    let d11 = displacement(lattice_point((1, 1), 3), 180).unwrap();
    let mut neg = d11.clone();
    neg.matrix.neg_mut();
    assert!(t11.low_block_distance(&neg) < 1e-12);
    let prod = odd.translation((1, 0)).compose(&odd.translation((0, 1)));
    assert!(prod.low_block_distance(&t11) < 1e-9);
}

#[test]
fn identity_coefficients_build_identity() {
    let x = build_x(&CenteredGrid2D::delta(2), 2, 30).unwrap();
    assert_eq!(x, FockOperator::identity(30));
    let b = build_b(&x, &x).unwrap();
    assert_eq!(b, annihilator(30).unwrap());
}

#[test]
fn perturbative_norm_in_fock_space() {
    let p = perturbative_coeffs(2).unwrap();
    let lat = FockLattice::new(2, DEFAULT_DIM).unwrap();
    let x = build_x(&p.c, 2, DEFAULT_DIM).unwrap();
    let psi = x.apply(&lat.lattice_vector((0, 0)).unwrap());
    assert!((psi.norm().powi(2) - 0.99440).abs() < 5e-5);
    assert!((psi.norm().powi(2) - norm_condition(&p.c, 2)).abs() < 1e-10);
}

#[test]
fn uncertainty_near_half_and_improving() {
    let u2 = uncertainty_report((0, 0), 2, DEFAULT_DIM).unwrap();
    assert!((u2.product - u2.half_commutator_expectation.abs()).abs() <= 1e-5);
    assert!((u2.product - 0.5).abs() <= (-PI).exp());
    let u4 = uncertainty_report((0, 0), 4, DEFAULT_DIM).unwrap();
    assert!((u4.product - 0.5).abs() < (u2.product - 0.5).abs());
}

#[test]
fn commutator_deviation_shrinks_with_l() {
    let d2 = commutator_deviation(2, DEFAULT_DIM).unwrap();
    let d3 = commutator_deviation(3, DEFAULT_DIM).unwrap();
    let d4 = commutator_deviation(4, DEFAULT_DIM).unwrap();
    assert!(d2 > 0.0);
    assert!(d3 < d2 && d4 < d3);
    for (l, d) in [(3.0, d3), (4.0, d4)] {
        let predicted = 4.0 * PI * l * (-PI * l / 2.0).exp();
        assert!((d / predicted - 1.0).abs() < 0.2, "L={l}: {d}");
    }
}

#[test]
fn tail_rule_is_enforced_for_lattice_vectors() {
    let lat = FockLattice::new(2, 40).unwrap();
    assert!(lat.lattice_vector((0, 0)).is_ok());
    assert!(matches!(
        lat.lattice_vector((2, 2)),
        Err(lattice_ortho::Error::TruncationTooSmall { .. })
    ));
}
