mod common;

use common::{integrable_pairs, random_planar, synthesized_planar};
use quadint::normal_form::{to_normal_form, NormalForm, OperatorKind};
use quadint::spectral::find_balances;
use quadint::{catalog, Matrix, Mode, MultiPoly, QuadraticSystem, Scalar, SpectralOptions};

fn exact_normal_forms() -> Vec<(QuadraticSystem, NormalForm)> {
    let mut systems = vec![catalog::halphen(), catalog::tsy512(), catalog::decoupled(3)];
    systems.push(
        QuadraticSystem::from_fields(vec![
            MultiPoly::parse("-x1^2 + x2*x3", 3, Mode::Exact).unwrap(),
            MultiPoly::parse("2*x1*x2", 3, Mode::Exact).unwrap(),
            MultiPoly::parse("-1/2*x1*x3 + x2^2", 3, Mode::Exact).unwrap(),
        ])
        .unwrap(),
    );
    systems.extend((0..20).map(random_planar));
    systems.extend(
        integrable_pairs()
            .into_iter()
            .enumerate()
            .map(|(i, (a, b))| synthesized_planar(a, b, i as u64)),
    );
    let opts = SpectralOptions::default();
    let mut out = Vec::new();
    for sys in systems {
        for bal in find_balances(&sys, &opts).unwrap() {
            if bal.diagonalizable && bal.mode() == Mode::Exact {
                let nf = to_normal_form(&sys, &bal).unwrap();
                out.push((sys.clone(), nf));
            }
        }
    }
    assert!(out.len() >= 10);
    out
}

fn op(nf: &NormalForm, kind: OperatorKind, l: u32) -> Matrix {
    nf.operator_matrix(kind, l).unwrap()
}

#[test]
fn raising_lowering_commutator() {
    for (_, nf) in exact_normal_forms() {
        for l in 1..=8 {
            let lhs = op(&nf, OperatorKind::DMinus, l + 1)
                .mul(&op(&nf, OperatorKind::DPlus, l))
                .unwrap()
                .sub(&op(&nf, OperatorKind::DPlus, l - 1).mul(&op(&nf, OperatorKind::DMinus, l)).unwrap())
                .unwrap();
            let euler = Matrix::identity(lhs.rows(), Mode::Exact).scale(&Scalar::from(l as i64));
            let rhs = op(&nf, OperatorKind::DZero, l).sub(&euler).unwrap();
            assert_eq!(lhs, rhs, "degree {l}");
        }
    }
}

#[test]
fn grading_commutator() {
    for (_, nf) in exact_normal_forms() {
        for l in 1..=8 {
            let lhs = op(&nf, OperatorKind::DZero, l - 1)
                .mul(&op(&nf, OperatorKind::DMinus, l))
                .unwrap()
                .sub(&op(&nf, OperatorKind::DMinus, l).mul(&op(&nf, OperatorKind::DZero, l)).unwrap())
                .unwrap();
            assert_eq!(lhs, op(&nf, OperatorKind::DMinus, l), "degree {l}");
        }
    }
}

#[test]
fn pieces_reassemble_the_field() {
    for (_, nf) in exact_normal_forms() {
        for l in 0..=8 {
            for mono in nf.domain_basis(OperatorKind::DPlus, l) {
                let p = MultiPoly::term(mono, Scalar::one(Mode::Exact));
                assert_eq!(
                    nf.d_plus_from_pieces(&p).unwrap(),
                    nf.apply(OperatorKind::DPlus, &p).unwrap()
                );
            }
        }
    }
}

#[test]
fn back_transform_reproduces_system() {
    for (sys, nf) in exact_normal_forms() {
        assert_eq!(nf.original_fields().unwrap(), sys.fields().to_vec());
    }
}

#[test]
fn euler_and_grading_matrices_are_diagonal() {
    for (_, nf) in exact_normal_forms().into_iter().take(5) {
        for l in 0..=5 {
            let u = op(&nf, OperatorKind::UTilde, l);
            assert_eq!(u, Matrix::identity(u.rows(), Mode::Exact).scale(&Scalar::from(l as i64)));
            let d0 = op(&nf, OperatorKind::DZero, l);
            for (j, mono) in nf.domain_basis(OperatorKind::DZero, l).iter().enumerate() {
                let w = mono
                    .exponents()
                    .iter()
                    .zip(nf.exponents())
                    .fold(Scalar::zero(Mode::Exact), |acc, (e, r)| &acc + &(&Scalar::from(*e as i64) * r));
                assert_eq!(d0.get(j, j), &w);
            }
        }
    }
}

#[test]
fn cached_matrices_are_stable() {
    let (_, nf) = exact_normal_forms().swap_remove(0);
    let a = op(&nf, OperatorKind::DPlus, 4);
    let b = op(&nf, OperatorKind::DPlus, 4);
    assert_eq!(a, b);
    let shared = std::sync::Arc::new(nf);
    let handles: Vec<_> = (0..4)
        .map(|_| {
            let nf = shared.clone();
            std::thread::spawn(move || nf.operator_matrix(OperatorKind::APlus, 3).unwrap())
        })
        .collect();
    let mats: Vec<Matrix> = handles.into_iter().map(|h| h.join().unwrap()).collect();
    assert!(mats.windows(2).all(|w| w[0] == w[1]));
}
