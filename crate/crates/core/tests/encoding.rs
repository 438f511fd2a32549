mod common;

use common::{fixture, hubbard};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use qucc::encoding::{find_z2_symmetries, jordan_wigner, EncodingPlan, Mapping, Pauli, PauliOperator, PauliString};
use qucc::fermion::FermionOperator;
use qucc::hamiltonian::{build_hamiltonian, MolecularIntegrals};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn single(p: Pauli) -> DMatrix<Complex64> {
    let (o, l) = (c(0.0, 0.0), c(1.0, 0.0));
    match p {
        Pauli::I => DMatrix::from_row_slice(2, 2, &[l, o, o, l]),
        Pauli::X => DMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        Pauli::Y => DMatrix::from_row_slice(2, 2, &[o, c(0.0, -1.0), c(0.0, 1.0), o]),
        Pauli::Z => DMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
    }
}

fn pauli_string(n: usize) -> impl Strategy<Value = PauliString> {
    (0..1u64 << n, 0..1u64 << n).prop_map(|(x, z)| PauliString::new(x, z))
}

fn pauli_operator(n: usize) -> impl Strategy<Value = PauliOperator> {
    prop::collection::vec((pauli_string(n), -1.0..1.0f64, -1.0..1.0f64), 1..6)
        .prop_map(move |terms| PauliOperator::from_terms(n, terms.into_iter().map(|(p, re, im)| (p, c(re, im)))))
}

fn close(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> bool {
    (a - b).iter().all(|z| z.norm() < 1e-12)
}

/// Number of independent Z-only strings commuting with every term, by enumeration.
fn z_symmetry_rank(op: &PauliOperator) -> usize {
    let xs: Vec<u64> = op.terms().map(|(p, _)| p.x).filter(|&x| x != 0).collect();
    let count = (0..1u64 << op.n_qubits())
        .filter(|z| xs.iter().all(|x| (x & z).count_ones() % 2 == 0))
        .count();
    count.trailing_zeros() as usize
}

fn reduced_plan(ints: &MolecularIntegrals) -> EncodingPlan {
    EncodingPlan::new(Mapping::Parity, true, 2 * ints.n_orbitals, ints.n_alpha, ints.n_beta).unwrap()
}

#[test]
fn single_qubit_multiplication_table() {
    let all = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    for a in all {
        for b in all {
            let (phase, p) = PauliString::single(0, a).multiply(&PauliString::single(0, b));
            let got = single(p.get(0)) * phase;
            assert!(close(&got, &(single(a) * single(b))), "{a:?}{b:?}");
        }
    }
}

#[test]
fn label_ordering_puts_qubit_zero_rightmost() {
    let p = PauliString::from_label("ZIXY").unwrap();
    assert_eq!(
        (p.get(3), p.get(2), p.get(1), p.get(0)),
        (Pauli::Z, Pauli::I, Pauli::X, Pauli::Y)
    );
    assert_eq!(p.label(4), "ZIXY");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_is_associative_on_dense_forms(
        a in pauli_operator(3), b in pauli_operator(3), d in pauli_operator(3)
    ) {
        let left = a.multiply(&b).unwrap().multiply(&d).unwrap();
        let right = a.multiply(&b.multiply(&d).unwrap()).unwrap();
        prop_assert!(close(&left.to_dense().unwrap(), &right.to_dense().unwrap()));
        let prod = a.multiply(&b).unwrap().to_dense().unwrap();
        prop_assert!(close(&prod, &(a.to_dense().unwrap() * b.to_dense().unwrap())));
    }

    #[test]
    fn commutation_flag_matches_dense(p in pauli_string(3), q in pauli_string(3)) {
        let dp = PauliOperator::from_terms(3, [(p, c(1.0, 0.0))]).to_dense().unwrap();
        let dq = PauliOperator::from_terms(3, [(q, c(1.0, 0.0))]).to_dense().unwrap();
        prop_assert_eq!(p.commutes_with(&q), close(&(&dp * &dq), &(&dq * &dp)));
    }

    #[test]
    fn parity_register_is_prefix_xor(occ in 0u64..1 << 8) {
        let plan = EncodingPlan::new(Mapping::Parity, false, 8, 2, 2).unwrap();
        let mut want = 0u64;
        for j in 0..8 {
            let prefix = (occ & ((2u64 << j) - 1)).count_ones() as u64 % 2;
            want |= prefix << j;
        }
        prop_assert_eq!(plan.register_index(occ).unwrap() as u64, want);
        prop_assert_eq!(plan.decode_basis(want as usize).0, occ);
    }

    #[test]
    fn determinants_round_trip_through_every_plan(up in 0u64..16, down in 0u64..16) {
        let ints = hubbard(4, 2.0, false, (2, 2));
        let ham = build_hamiltonian(&ints);
        let occ = up | down << 4;
        for plan in [
            EncodingPlan::jordan_wigner(8, 2, 2),
            reduced_plan(&ints),
            EncodingPlan::jordan_wigner(8, 2, 2).with_tapering(&ham).unwrap(),
            reduced_plan(&ints).with_tapering(&ham).unwrap(),
        ] {
            if let Ok(k) = plan.encode_determinant(occ) {
                prop_assert_eq!(plan.decode_basis(k).0, occ);
            } else {
                // only determinants outside the encoded parity/symmetry sector are rejected
                prop_assert!(plan.two_qubit_reduction || plan.is_tapered());
            }
        }
    }
}

#[test]
fn jordan_wigner_determinant_indices() {
    let plan = EncodingPlan::jordan_wigner(4, 1, 1);
    assert_eq!(plan.encode_determinant(0b0011).unwrap(), 0b0011);
    assert_eq!(plan.encode_determinant(0).unwrap(), 0);
    // reference fills up-orbital 0 and down-orbital 0 → modes 0 and 2
    assert_eq!(plan.reference_index().unwrap(), 0b0101);
}

#[test]
fn every_term_commutes_with_every_generator() {
    for ints in [
        fixture("h2_sto3g_0.735.fcidump"),
        fixture("h4_sto3g_beta87.fcidump"),
        hubbard(3, 4.0, true, (2, 1)),
    ] {
        let op = jordan_wigner(&build_hamiltonian(&ints));
        let gens = find_z2_symmetries(&op);
        assert_eq!(gens.len(), z_symmetry_rank(&op));
        for g in &gens {
            assert_eq!(g.pauli.x, 0);
            assert!(op.terms().all(|(p, _)| p.commutes_with(&g.pauli)));
        }
    }
}

#[test]
fn tapering_removes_exactly_the_generator_targets() {
    let ints = fixture("h4_sto3g_beta91.fcidump");
    let ham = build_hamiltonian(&ints);
    let plan = reduced_plan(&ints);
    let untapered = plan.encode(&ham).unwrap();
    let tapered_plan = plan.clone().with_tapering(&ham).unwrap();
    let tapered = tapered_plan.encode(&ham).unwrap();
    let k = z_symmetry_rank(&untapered);
    assert_eq!(tapered_plan.generators.len(), k);
    assert_eq!(tapered.n_qubits(), untapered.n_qubits() - k);
    let width = 1u64 << tapered.n_qubits();
    assert!(tapered.terms().all(|(p, _)| p.x < width && p.z < width));
    assert!(tapered.is_hermitian(1e-12));
}

#[test]
fn tapered_register_sizes() {
    // N2 with two frozen core orbitals: 16 spin orbitals → 12 qubits
    let n2 = fixture("n2_sto3g_1.200.fcidump").freeze_core(&[0, 1]).unwrap();
    let plan = EncodingPlan::jordan_wigner(16, n2.n_alpha, n2.n_beta)
        .with_tapering(&build_hamiltonian(&n2))
        .unwrap();
    assert_eq!(plan.n_qubits(), 12);

    // H2O with one frozen core orbital: 12 spin orbitals minus four independent Z symmetries
    let h2o = fixture("h2o_sto3g_d1.754.fcidump").freeze_core(&[0]).unwrap();
    let ham = build_hamiltonian(&h2o);
    let jw = jordan_wigner(&ham);
    let plan = EncodingPlan::jordan_wigner(12, h2o.n_alpha, h2o.n_beta)
        .with_tapering(&ham)
        .unwrap();
    assert_eq!(z_symmetry_rank(&jw), 4);
    assert_eq!(plan.n_qubits(), 8);
    assert_eq!(reduced_plan(&h2o).with_tapering(&ham).unwrap().n_qubits(), 8);
}

#[test]
fn encoding_a_zero_operator_gives_zero() {
    let plan = EncodingPlan::jordan_wigner(4, 1, 1);
    assert!(plan.encode(&FermionOperator::zero(4)).unwrap().is_empty());
}
