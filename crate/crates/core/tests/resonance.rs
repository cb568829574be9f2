use proptest::prelude::*;
use quadint::poly::monomials_of_degree;
use quadint::resonance::{enumerate_jm, integral_degree_admissible, symmetry_degree_admissible};
use quadint::{Mode, Scalar};

fn exponent() -> impl Strategy<Value = Scalar> {
    (-6i64..=12, 1i64..=4).prop_map(|(n, d)| Scalar::ratio(n, d))
}

/// Every `z` with `1 ≤ |z| ≤ M` by brute force over each simplex layer.
fn naive_jm(rho: &[Scalar], m: u32) -> Vec<Vec<u32>> {
    let target = Scalar::from_i64(m as i64, Mode::Exact);
    let mut out = Vec::new();
    for norm in 1..=m {
        for mono in monomials_of_degree(rho.len(), norm) {
            let z = mono.exponents().to_vec();
            let dot = z
                .iter()
                .zip(rho)
                .fold(Scalar::zero(Mode::Exact), |acc, (k, r)| &acc + &(&Scalar::from(*k as i64) * r));
            if dot == target {
                out.push(z);
            }
        }
    }
    out.sort();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matches_naive_enumeration(rho in prop::collection::vec(exponent(), 1..=3), m in 1u32..=12) {
        let got = enumerate_jm(&rho, m);
        let mut members = got.members.clone();
        members.sort();
        prop_assert_eq!(members, naive_jm(&rho, m));
    }

    #[test]
    fn members_sorted_by_norm(rho in prop::collection::vec(exponent(), 1..=3), m in 1u32..=12) {
        let got = enumerate_jm(&rho, m);
        let norms: Vec<u32> = got.members.iter().map(|z| z.iter().sum()).collect();
        prop_assert!(norms.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn extra_direction_never_removes_solutions(rho in prop::collection::vec(exponent(), 1..=3), extra in exponent(), m in 1u32..=12) {
        let mut longer = rho.clone();
        longer.push(extra);
        if integral_degree_admissible(&rho, m) {
            prop_assert!(integral_degree_admissible(&longer, m));
        }
    }
}

#[test]
fn single_exponent_one_admits_everything() {
    let rho = [Scalar::from(1)];
    for m in 1..=3 {
        assert!(integral_degree_admissible(&rho, m));
    }
}

#[test]
fn halphen_integrals_never_admissible() {
    let rho = [Scalar::from(-1), Scalar::from(-1)];
    assert!((1..=20).all(|m| !integral_degree_admissible(&rho, m)));
}

#[test]
fn halphen_symmetry_degrees() {
    let rho = vec![Scalar::from(-1); 3];
    let got: Vec<i32> = (-1..=8).filter(|&m| symmetry_degree_admissible(&rho, m)).collect();
    assert_eq!(got, vec![0, 1]);
}

#[test]
fn float_exponents_use_tolerance() {
    let rho = [Scalar::float(1.5 + 1e-9), Scalar::float(3.0)];
    let got = enumerate_jm(&rho, 3);
    assert!(got.contains(&[2, 0]));
    assert!(got.contains(&[0, 1]));
}
