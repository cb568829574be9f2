mod common;

use common::{conjugate, random_transform};
use num_complex::Complex64;
use quadint::oracle::{
    brute_force_integrals, brute_force_symmetry_fields, commutator, rk4_conservation, rk4_conservation_extended,
    span_rank, spans_equal,
};
use quadint::{catalog, Mode, MultiPoly};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn f3() -> MultiPoly {
    MultiPoly::parse("x1^3 + x1^2*x2 - x1*x2^2 - x2^3", 2, Mode::Exact).unwrap()
}

#[test]
fn worked_example_kernels() {
    let sys = catalog::tsy512();
    for m in 1..=9 {
        let k = brute_force_integrals(&sys, m).unwrap();
        let expected = if m % 3 == 0 { 1 } else { 0 };
        assert_eq!(k.len(), expected, "M {m}");
    }
    let k3 = brute_force_integrals(&sys, 3).unwrap();
    assert_eq!(k3, vec![f3()]);
    assert!(spans_equal(&brute_force_integrals(&sys, 6).unwrap(), &[f3().pow(2)]));
}

#[test]
fn halphen_has_no_integrals() {
    let sys = catalog::halphen();
    for m in 1..=6 {
        assert!(brute_force_integrals(&sys, m).unwrap().is_empty(), "M {m}");
    }
}

#[test]
fn halphen_symmetry_fields() {
    let sys = catalog::halphen();
    for m in [-1, 0] {
        let s = brute_force_symmetry_fields(&sys, m).unwrap();
        assert!(s.basis.is_empty(), "M {m}");
        assert_eq!(s.quotient_dimension, 0);
    }
    let s = brute_force_symmetry_fields(&sys, 1).unwrap();
    assert_eq!(s.basis.len(), 1);
    assert_eq!(s.contains_field, Some(true));
    assert_eq!(s.quotient_dimension, 0);
    let w = &s.basis[0].w;
    assert_eq!(span_rank(&[w[0].clone()]), 1);
    assert!(commutator(w, sys.fields()).unwrap().iter().all(MultiPoly::is_zero));
    // proportional to the field itself
    let ratio = &w[0].leading_term().unwrap().1.clone() / sys.fields()[0].leading_term().unwrap().1;
    for (wi, fi) in w.iter().zip(sys.fields()) {
        assert_eq!(wi, &fi.scale(&ratio));
    }
}

#[test]
fn kernel_dimension_survives_linear_changes() {
    let sys = catalog::tsy512();
    let base: Vec<usize> = (1..=6).map(|m| brute_force_integrals(&sys, m).unwrap().len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..20 {
        let l = random_transform(&mut rng, 2);
        let moved = conjugate(&sys, &l);
        let dims: Vec<usize> = (1..=6).map(|m| brute_force_integrals(&moved, m).unwrap().len()).collect();
        assert_eq!(dims, base);
        // the integral moves with the coordinates
        let g = f3().substitute_linear(&l).unwrap();
        assert!(g.lie_derivative(moved.fields()).unwrap().is_zero());
    }
}

#[test]
fn conserved_quantity_drift_is_small() {
    let sys = catalog::tsy512();
    let x0 = [Complex64::new(0.1, 0.0), Complex64::new(0.05, 0.0)];
    let d = rk4_conservation(&sys, &f3(), &x0, 1.0, 1e-3).unwrap();
    assert!(!d.partial);
    assert!(d.max_drift <= 1e-6, "{}", d.max_drift);
}

#[test]
fn extended_precision_drift_scales_like_fourth_order() {
    let sys = catalog::tsy512();
    let coarse = rk4_conservation_extended(&sys, &f3(), &[0.1, 0.05], 1.0, 1e-3).unwrap();
    let fine = rk4_conservation_extended(&sys, &f3(), &[0.1, 0.05], 1.0, 5e-4).unwrap();
    assert!(coarse.max_drift > 0.0);
    assert!(coarse.max_drift / fine.max_drift >= 8.0, "{} / {}", coarse.max_drift, fine.max_drift);
}

#[test]
fn non_integral_drifts() {
    let sys = catalog::tsy512();
    let x1 = MultiPoly::parse("x1", 2, Mode::Exact).unwrap();
    let x0 = [Complex64::new(0.1, 0.0), Complex64::new(0.05, 0.0)];
    let d = rk4_conservation(&sys, &x1, &x0, 1.0, 1e-3).unwrap();
    assert!(d.max_drift > 1e-3, "{}", d.max_drift);
}

#[test]
fn decoupled_has_no_polynomial_integrals() {
    // ẋᵢ = −xᵢ²: no homogeneous polynomial integrals
    let sys = catalog::decoupled(2);
    for m in 1..=4 {
        assert!(brute_force_integrals(&sys, m).unwrap().is_empty());
    }
}
