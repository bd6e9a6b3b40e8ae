use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use starkondo::exact_diag::{eig_hermitian, to_matrix};
use starkondo::free_fermion::{build_a, secular_roots};
use starkondo::pauli::commutator;
use starkondo::{OperatorSum, PauliString};

fn pauli_string(n: usize) -> impl Strategy<Value = PauliString> {
    let mask = (1u64 << n) - 1;
    (any::<u64>(), any::<u64>(), 0u8..4)
        .prop_map(move |(x, z, p)| PauliString::new(n, x & mask, z & mask, p).unwrap())
}

fn coeff() -> impl Strategy<Value = Complex64> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(re, im)| Complex64::new(re, im))
}

fn op_sum(n: usize, max_terms: usize) -> impl Strategy<Value = OperatorSum> {
    prop::collection::vec((pauli_string(n), coeff()), 1..=max_terms).prop_map(move |terms| {
        let mut s = OperatorSum::zero(n).unwrap();
        for (p, c) in terms {
            s.add_string(&p, c).unwrap();
        }
        s
    })
}

fn hermitian(n: usize, max_terms: usize) -> impl Strategy<Value = OperatorSum> {
    op_sum(n, max_terms).prop_map(|s| s.plus(&s.adjoint()).unwrap())
}

fn close(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, tol: f64) -> bool {
    a.shape() == b.shape() && a.iter().zip(b.iter()).all(|(x, y)| (x - y).norm() <= tol)
}

fn sized_pair() -> impl Strategy<Value = (PauliString, PauliString, PauliString)> {
    (1usize..=10).prop_flat_map(|n| (pauli_string(n), pauli_string(n), pauli_string(n)))
}

proptest! {
    #[test]
    fn string_product_is_associative((p, q, r) in sized_pair()) {
        let left = p.product(&q).unwrap().product(&r).unwrap();
        let right = p.product(&q.product(&r).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn commutation_follows_symplectic_parity((p, q, _r) in sized_pair()) {
        let parity = ((p.x_mask() & q.z_mask()).count_ones()
            + (p.z_mask() & q.x_mask()).count_ones()) % 2;
        prop_assert_eq!(p.commutes_with(&q), parity == 0);
        let pq = p.product(&q).unwrap();
        let qp = q.product(&p).unwrap();
        prop_assert_eq!(pq.x_mask(), qp.x_mask());
        prop_assert_eq!(pq.z_mask(), qp.z_mask());
        let expected = if parity == 0 { qp.phase_exp() } else { (qp.phase_exp() + 2) % 4 };
        prop_assert_eq!(pq.phase_exp(), expected);
    }

    #[test]
    fn string_adjoint_reverses_products((p, q, _r) in sized_pair()) {
        prop_assert_eq!(p.adjoint().adjoint(), p);
        let lhs = p.product(&q).unwrap().adjoint();
        let rhs = q.adjoint().product(&p.adjoint()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn sum_product_matches_matrix_product(
        (a, b) in (1usize..=6).prop_flat_map(|n| (op_sum(n, 6), op_sum(n, 6)))
    ) {
        let lhs = to_matrix(&a.product(&b).unwrap()).unwrap();
        let rhs = to_matrix(&a).unwrap() * to_matrix(&b).unwrap();
        prop_assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn sum_adjoint_matches_matrix_adjoint(
        (a, b) in (1usize..=6).prop_flat_map(|n| (op_sum(n, 6), op_sum(n, 6)))
    ) {
        prop_assert!(close(&to_matrix(&a.adjoint()).unwrap(), &to_matrix(&a).unwrap().adjoint(), 1e-14));
        prop_assert_eq!(a.adjoint().adjoint(), a.clone());
        let lhs = a.product(&b).unwrap().adjoint();
        let rhs = b.adjoint().product(&a.adjoint()).unwrap();
        prop_assert!(lhs.minus(&rhs).unwrap().max_abs_coeff() <= 1e-12);
    }

    #[test]
    fn text_round_trip(a in (1usize..=12).prop_flat_map(|n| op_sum(n, 8))) {
        let back = OperatorSum::from_text(a.n_sites(), &a.to_text()).unwrap();
        prop_assert!(back.minus(&a).unwrap().max_abs_coeff() <= 1e-15);
    }

    #[test]
    fn trace_is_identity_coefficient(a in (1usize..=6).prop_flat_map(|n| op_sum(n, 8))) {
        let m = to_matrix(&a).unwrap();
        let dim = m.nrows() as f64;
        prop_assert!((m.trace() - a.identity_coeff() * dim).norm() <= 1e-11);
    }

    #[test]
    fn spectrum_invariant_under_pauli_conjugation(
        (h, p) in (1usize..=5).prop_flat_map(|n| (hermitian(n, 6), pauli_string(n)))
    ) {
        let ps = OperatorSum::from_string(&p, Complex64::new(1.0, 0.0)).unwrap();
        let conj = ps.product(&h).unwrap().product(&ps.adjoint()).unwrap();
        let before = eig_hermitian(&to_matrix(&h).unwrap()).unwrap();
        let after = eig_hermitian(&to_matrix(&conj).unwrap()).unwrap();
        for (x, y) in before.values().iter().zip(after.values()) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn commutator_is_antisymmetric(
        (a, b) in (1usize..=6).prop_flat_map(|n| (op_sum(n, 5), op_sum(n, 5)))
    ) {
        let ab = commutator(&a, &b).unwrap();
        let ba = commutator(&b, &a).unwrap();
        prop_assert!(ab.plus(&ba).unwrap().max_abs_coeff() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn secular_roots_track_the_hopping_matrix(l in 1usize..=40, a in -2.5f64..2.5) {
        let roots = secular_roots(l, a).unwrap().lambdas();
        prop_assert_eq!(roots.len(), 3 * l);
        let eig = build_a(l, a).unwrap().eigenvalues().unwrap();
        for (x, y) in roots.iter().zip(eig.values()) {
            prop_assert!((x - y).abs() <= 1e-9, "L={} a={} {} vs {}", l, a, x, y);
        }
        for (x, y) in roots.iter().zip(roots.iter().rev()) {
            prop_assert!((x + y).abs() <= 1e-9);
        }
    }
}
