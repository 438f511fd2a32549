mod common;

use common::{fixture, hubbard, max_abs_diff};
use qucc::encoding::EncodingPlan;
use qucc::exact::{exact_ground, exact_spectrum, exact_spectrum_sector};
use qucc::hamiltonian::{build_hamiltonian, MolecularIntegrals};

/// Slater–Condon spectrum against the sector-restricted Jordan–Wigner operator.
fn assert_paths_agree(name: &str, ints: &MolecularIntegrals) {
    let plan = EncodingPlan::jordan_wigner(2 * ints.n_orbitals, ints.n_alpha, ints.n_beta);
    let op = plan.encode(&build_hamiltonian(ints)).unwrap();
    let qubit = exact_spectrum_sector(&op, &plan, ints.n_alpha, ints.n_beta).unwrap();
    let determinant = exact_spectrum(ints).unwrap();
    assert!(max_abs_diff(&qubit, &determinant) < 1e-9, "{name}");
    assert!(
        (exact_ground(ints).unwrap().energy - determinant[0]).abs() < 1e-9,
        "{name}"
    );
}

#[test]
fn both_construction_paths_agree_on_fixtures() {
    for name in [
        "h2_sto3g_0.735.fcidump",
        "h2_631g_0.546.fcidump",
        "h4_sto3g_beta85.fcidump",
        "h4_sto3g_beta95.fcidump",
    ] {
        assert_paths_agree(name, &fixture(name));
    }
    let h2o = fixture("h2o_sto3g_d1.937.fcidump").freeze_core(&[0]).unwrap();
    assert_paths_agree("h2o", &h2o);
}

#[test]
fn both_construction_paths_agree_on_hubbard() {
    assert_paths_agree("ring", &hubbard(4, 6.0, true, (2, 2)));
    assert_paths_agree("open shell", &hubbard(5, 3.0, false, (3, 2)));
    assert_paths_agree("one spin", &hubbard(3, 1.0, true, (2, 0)));
}

#[test]
fn h2_minimal_basis_ground_energy() {
    let e = exact_ground(&fixture("h2_sto3g_0.735.fcidump")).unwrap().energy;
    assert!((e + 1.137).abs() < 1e-3, "{e}");
}

#[test]
fn hubbard_ground_energy_grows_with_repulsion() {
    let mut last = f64::NEG_INFINITY;
    for u in [0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0] {
        let e = exact_ground(&hubbard(6, u, true, (3, 3))).unwrap().energy;
        assert!(e >= last - 1e-12, "U={u}");
        last = e;
    }
}

#[test]
fn uncorrelated_two_site_dimer() {
    let e = exact_ground(&hubbard(2, 0.0, false, (1, 1))).unwrap().energy;
    assert!((e + 2.0).abs() < 1e-12);
}

#[test]
fn identity_sector_spectrum_is_all_ones() {
    let ints = MolecularIntegrals {
        e_offset: 1.0,
        ..MolecularIntegrals::zeros(3, 1, 1)
    };
    let plan = EncodingPlan::jordan_wigner(6, 1, 1);
    let op = plan.encode(&build_hamiltonian(&ints)).unwrap();
    let s = exact_spectrum_sector(&op, &plan, 1, 1).unwrap();
    assert_eq!(s.len(), 9);
    assert!(s.iter().all(|v| (v - 1.0).abs() < 1e-14));
}
