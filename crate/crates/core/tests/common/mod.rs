#![allow(dead_code)]

use quadint::{catalog, Matrix, Mode, QuadraticSystem, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn q(n: i64, d: i64) -> Scalar {
    Scalar::ratio(n, d)
}

/// Planar system with coefficients drawn from −9..=9.
pub fn random_planar(seed: u64) -> QuadraticSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut terms = Vec::new();
        for i in 0..2 {
            for (j, k) in [(0, 0), (0, 1), (1, 1)] {
                let v: i64 = rng.random_range(-9..=9);
                terms.push((i, j, k, Scalar::from_i64(v, Mode::Exact)));
            }
        }
        let sys = QuadraticSystem::from_monomial_coeffs(2, &terms).unwrap();
        if sys.fields().iter().all(|f| !f.is_zero()) {
            return sys;
        }
    }
}

/// Random invertible matrix with entries in −3..=3.
pub fn random_transform(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    loop {
        let rows: Vec<Vec<Scalar>> = (0..n)
            .map(|_| (0..n).map(|_| Scalar::from_i64(rng.random_range(-3..=3), Mode::Exact)).collect())
            .collect();
        let m = Matrix::from_rows(rows);
        if !m.determinant().unwrap().is_zero() {
            return m;
        }
    }
}

/// The system expressed in new coordinates `x = L y`.
pub fn conjugate(sys: &QuadraticSystem, l: &Matrix) -> QuadraticSystem {
    QuadraticSystem::from_fields(sys.transformed_fields(l).unwrap()).unwrap()
}

/// Reduced planar form with the given exponents, mixed by a random transform.
pub fn synthesized_planar(rho1: Scalar, rho2: Scalar, seed: u64) -> QuadraticSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = catalog::planar_reduced(&rho1, &rho2);
    let l = random_transform(&mut rng, 2);
    conjugate(&base, &l)
}

/// Exponent pairs for which integrals exist at some degree.
pub fn integrable_pairs() -> Vec<(Scalar, Scalar)> {
    vec![
        (q(3, 1), q(3, 2)),
        (q(2, 1), q(2, 1)),
        (q(4, 1), q(4, 3)),
        (q(6, 1), q(6, 5)),
        (q(2, 1), q(3, 1)),
        (q(3, 1), q(3, 1)),
        (q(4, 1), q(4, 1)),
        (q(2, 1), q(4, 1)),
        (q(3, 1), q(6, 1)),
    ]
}
