use quadint::spectral::*;
use quadint::*;
use quadint::system::catalog;

fn v(xs: &[(i64, i64)]) -> Vec<Scalar> {
    xs.iter().map(|&(a, b)| Scalar::ratio(a, b)).collect()
}

#[test]
fn residual_examples() {
    let h = catalog::halphen();
    assert!(residual(&h, &v(&[(1, 1), (1, 1), (1, 1)])).unwrap().iter().all(Scalar::is_zero));
    let t = catalog::tsy512();
    assert!(residual(&t, &v(&[(1, 8), (-1, 8)])).unwrap().iter().all(Scalar::is_zero));
    assert!(residual(&t, &v(&[(0, 1), (0, 1)])).unwrap().iter().all(Scalar::is_zero));
    assert!(residual(&t, &v(&[(1, 1)])).is_err());
}

#[test]
fn decoupled_planar_balances() {
    let pts = find_balance_points(&catalog::decoupled(2), &SpectralOptions::default()).unwrap();
    assert_eq!(pts, vec![v(&[(0, 1), (1, 1)]), v(&[(1, 1), (0, 1)]), v(&[(1, 1), (1, 1)])]);
}

#[test]
fn tsy512_balances_and_exponents() {
    let bals = find_balances(&catalog::tsy512(), &SpectralOptions::default()).unwrap();
    assert_eq!(bals.len(), 2);
    assert_eq!(bals[0].c, v(&[(1, 8), (-1, 8)]));
    assert_eq!(bals[1].c, v(&[(1, 8), (1, 8)]));
    // (1/8, -1/8) carries 3/2, (1/8, 1/8) carries 3
    assert_eq!(bals[0].exponents, v(&[(-1, 1), (3, 2)]));
    assert_eq!(bals[1].exponents, v(&[(-1, 1), (3, 1)]));
    for b in &bals {
        assert_eq!(b.mode(), Mode::Exact);
        assert_eq!(b.lemma1_defect(), 0.0);
    }
}

#[test]
fn halphen_matrix_is_minus_identity() {
    let k = kovalevskaya_matrix(&catalog::halphen(), &v(&[(1, 1), (1, 1), (1, 1)]), 1e-9).unwrap();
    assert_eq!(k, Matrix::identity(3, Mode::Exact).scale(&Scalar::from(-1)));
    let eig = kovalevskaya_exponents(&k, &v(&[(1, 1), (1, 1), (1, 1)]), &SpectralOptions::default())
        .unwrap();
    assert_eq!(eig.exponents, v(&[(-1, 1), (-1, 1), (-1, 1)]));
    assert!(eig.diagonalizable);
}

#[test]
fn decoupled_matrix_at_one_one() {
    let k = kovalevskaya_matrix(&catalog::decoupled(2), &v(&[(1, 1), (1, 1)]), 1e-9).unwrap();
    assert_eq!(k, Matrix::diagonal(&v(&[(-1, 1), (-1, 1)])));
}

#[test]
fn not_a_balance_is_rejected() {
    let r = kovalevskaya_matrix(&catalog::tsy512(), &v(&[(1, 1), (1, 1)]), 1e-9);
    assert!(matches!(r, Err(Error::NotABalance { .. })));
}

#[test]
fn diagonal_matrix_exponents() {
    let k = Matrix::diagonal(&v(&[(-1, 1), (5, 1)]));
    let eig = kovalevskaya_exponents(&k, &v(&[(1, 1), (0, 1)]), &SpectralOptions::default()).unwrap();
    assert_eq!(eig.exponents, v(&[(-1, 1), (5, 1)]));
    assert_eq!(eig.eigvecs, vec![v(&[(1, 1), (0, 1)]), v(&[(0, 1), (1, 1)])]);
}

#[test]
fn missing_trivial_exponent() {
    let k = Matrix::diagonal(&v(&[(2, 1), (5, 1)]));
    assert_eq!(
        kovalevskaya_exponents(&k, &v(&[(1, 1), (0, 1)]), &SpectralOptions::default()),
        Err(Error::MissingTrivialExponent)
    );
}

#[test]
fn defective_matrix_is_flagged() {
    // Jordan block for -1
    let k = Matrix::from_rows(vec![v(&[(-1, 1), (1, 1)]), v(&[(0, 1), (-1, 1)])]);
    let eig = kovalevskaya_exponents(&k, &v(&[(1, 1), (0, 1)]), &SpectralOptions::default()).unwrap();
    assert!(!eig.diagonalizable);
    assert_eq!(eig.exponents.len(), 2);
    let bal = BalanceData {
        c: v(&[(1, 1), (0, 1)]),
        k,
        exponents: eig.exponents,
        eigvecs: eig.eigvecs,
        diagonalizable: false,
        transform: None,
    };
    assert_eq!(diagonalizing_transform(&bal), Err(Error::NotDiagonalizable));
}

#[test]
fn transform_for_diagonal_k_is_identity() {
    let k = Matrix::diagonal(&v(&[(-1, 1), (5, 1)]));
    let c = v(&[(1, 1), (0, 1)]);
    let eig = kovalevskaya_exponents(&k, &c, &SpectralOptions::default()).unwrap();
    let bal = BalanceData {
        c,
        k,
        exponents: eig.exponents,
        eigvecs: eig.eigvecs,
        diagonalizable: eig.diagonalizable,
        transform: None,
    };
    assert_eq!(diagonalizing_transform(&bal).unwrap(), Matrix::identity(2, Mode::Exact));
}

#[test]
fn halphen_newton_finds_exact_balance() {
    let bals = find_balances(&catalog::halphen(), &SpectralOptions::default()).unwrap();
    let target = v(&[(1, 1), (1, 1), (1, 1)]);
    let b = bals.iter().find(|b| b.c == target).expect("(1,1,1) found");
    assert_eq!(b.mode(), Mode::Exact);
    let l = b.transform.as_ref().unwrap();
    let d = l.inverse().unwrap().mul(&b.k).unwrap().mul(l).unwrap();
    assert_eq!(d, Matrix::identity(3, Mode::Exact).scale(&Scalar::from(-1)));
}

#[test]
fn float_mode_is_forced() {
    let opts = SpectralOptions {
        mode: Mode::Float,
        ..Default::default()
    };
    let bals = find_balances(&catalog::tsy512(), &opts).unwrap();
    assert_eq!(bals.len(), 2);
    for b in &bals {
        assert_eq!(b.c[0].mode(), Mode::Float);
        assert!(b.lemma1_defect() <= 1e-9);
        // exponents are still snapped to rationals
        assert!(b.exponents.iter().all(Scalar::is_exact));
    }
}
