mod common;

use common::*;
use proptest::prelude::*;
use stabilizer_learn::pauli::{hermitian_from_bits, multiply, symplectic_product};
use stabilizer_learn::{BitVector, PauliString, Phase, Sign};

fn all_paulis(n: usize) -> Vec<PauliString> {
    all_labels(n)
        .into_iter()
        .flat_map(|bits| (0..4).map(move |e| PauliString::new(bits.clone(), Phase::from_exponent(e)).unwrap()))
        .collect()
}

#[test]
fn single_qubit_products_match_matrices() {
    let ps = all_paulis(1);
    assert_eq!(ps.len(), 16);
    for p in &ps {
        for q in &ps {
            let prod = multiply(p, q).unwrap();
            assert!(mat_close(&pauli_matrix(&prod), &matmul(&pauli_matrix(p), &pauli_matrix(q))), "{p} * {q}");
        }
    }
}

#[test]
fn three_qubit_label_products_match_matrices() {
    let labels = all_labels(3);
    let ps: Vec<_> = labels.iter().map(|b| PauliString::new(b.clone(), Phase::ONE).unwrap()).collect();
    let mats: Vec<_> = ps.iter().map(pauli_matrix).collect();
    let mut checked = 0;
    for (p, mp) in ps.iter().zip(&mats) {
        for (q, mq) in ps.iter().zip(&mats) {
            let prod = multiply(p, q).unwrap();
            assert_eq!(prod.bits(), &(p.bits() ^ q.bits()));
            assert!(mat_close(&pauli_matrix(&prod), &matmul(mp, mq)));
            checked += 1;
        }
    }
    assert_eq!(checked, 4096);
}

#[test]
fn symplectic_product_decides_commutation() {
    for p in all_paulis(2).iter().step_by(4) {
        for q in all_paulis(2).iter().step_by(4) {
            let pq = matmul(&pauli_matrix(p), &pauli_matrix(q));
            let qp = matmul(&pauli_matrix(q), &pauli_matrix(p));
            let anti = symplectic_product(p.bits(), q.bits()).unwrap();
            assert_eq!(mat_close(&pq, &qp), !anti, "{p} vs {q}");
        }
    }
}

#[test]
fn hermitian_observables_are_hermitian_involutions() {
    for bits in all_labels(2) {
        for sign in [Sign::Plus, Sign::Minus] {
            let h = hermitian_from_bits(&bits, sign).unwrap();
            let m = pauli_matrix(&h);
            assert!(mat_close(&m, &adjoint(&m)));
            assert!(mat_close(&matmul(&m, &m), &identity(4)));
            assert_eq!(h.hermitian_sign(), Some(sign));
        }
    }
}

#[test]
fn text_letters_match_hermitian_matrices() {
    let y: PauliString = "+Y".parse().unwrap();
    let m = pauli_matrix(&y);
    let i = num_complex::Complex64::i();
    assert!(mat_close(&m, &vec![vec![0.0 * i, -i], vec![i, 0.0 * i]]));
}

fn pauli_strategy(n: usize) -> impl Strategy<Value = PauliString> {
    (proptest::collection::vec(any::<bool>(), 2 * n), 0u32..4)
        .prop_map(|(bits, e)| PauliString::new(BitVector::from_bools(&bits), Phase::from_exponent(e)).unwrap())
}

proptest! {
    #[test]
    fn identity_is_neutral(p in (1usize..=4).prop_flat_map(pauli_strategy)) {
        let id = PauliString::identity(p.num_qubits());
        prop_assert_eq!(multiply(&id, &p).unwrap(), p.clone());
        prop_assert_eq!(multiply(&p, &id).unwrap(), p);
    }

    #[test]
    fn products_xor_labels_and_commutation_sets_phase(
        (p, q) in (1usize..=70).prop_flat_map(|n| (pauli_strategy(n), pauli_strategy(n)))
    ) {
        let pq = multiply(&p, &q).unwrap();
        let qp = multiply(&q, &p).unwrap();
        prop_assert_eq!(pq.bits(), &(p.bits() ^ q.bits()));
        prop_assert_eq!(pq.bits(), qp.bits());
        let anti = symplectic_product(p.bits(), q.bits()).unwrap();
        let expected = if anti { -qp.phase() } else { qp.phase() };
        prop_assert_eq!(pq.phase(), expected);
    }

    #[test]
    fn hermitian_squares_to_identity(bits in (1usize..=70).prop_flat_map(|n| proptest::collection::vec(any::<bool>(), 2 * n)), minus in any::<bool>()) {
        let h = hermitian_from_bits(&BitVector::from_bools(&bits), Sign::from_bit(minus)).unwrap();
        let sq = multiply(&h, &h).unwrap();
        prop_assert!(sq.is_identity_label());
        prop_assert_eq!(sq.phase(), Phase::ONE);
    }

    #[test]
    fn text_round_trips(p in (1usize..=8).prop_flat_map(pauli_strategy)) {
        let back: PauliString = p.to_string().parse().unwrap();
        prop_assert_eq!(back, p);
    }
}
