use quadint::system::*;
use quadint::*;

#[test]
fn tensor_is_symmetrized() {
    // f1 = 4 x1 x2 entered asymmetrically as a_112 = 4, a_121 = 0
    let sys = QuadraticSystem::from_tensor(2, |i, j, k| {
        Scalar::from(if (i, j, k) == (0, 0, 1) { 4 } else { 0 })
    });
    assert_eq!(sys.coeff(0, 0, 1), &Scalar::from(2));
    assert_eq!(sys.coeff(0, 1, 0), &Scalar::from(2));
    assert_eq!(
        sys.fields()[0],
        MultiPoly::parse("4*x1*x2", 2, Mode::Exact).unwrap()
    );
}

#[test]
fn duplicate_terms_are_summed() {
    let sys = QuadraticSystem::from_monomial_coeffs(
        2,
        &[(0, 0, 1, Scalar::from(1)), (0, 1, 0, Scalar::from(2))],
    )
    .unwrap();
    assert_eq!(sys.fields()[0].to_string(), "3*x1*x2");
    assert!(QuadraticSystem::from_monomial_coeffs(2, &[(2, 0, 0, Scalar::from(1))]).is_err());
}

#[test]
fn fields_are_quadratic() {
    for f in catalog::halphen().fields() {
        assert_eq!(f.euler_degree().unwrap(), Homogeneity::Homogeneous(2));
    }
    let bad = vec![MultiPoly::parse("x1", 1, Mode::Exact).unwrap()];
    assert_eq!(QuadraticSystem::from_fields(bad), Err(Error::NotQuadratic));
}

#[test]
fn jacobian_matches_derivatives() {
    let sys = catalog::tsy512();
    let x = vec![Scalar::ratio(1, 3), Scalar::from(2)];
    let jac = sys.jacobian(&x);
    for i in 0..2 {
        for j in 0..2 {
            let d = sys.fields()[i].differentiate(j + 1).unwrap().eval(&x);
            assert_eq!(jac.get(i, j), &d);
        }
    }
}
