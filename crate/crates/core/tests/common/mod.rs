#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use qucc::encoding::PauliOperator;
use qucc::hamiltonian::{build_hubbard, read_fcidump, HubbardSpec, MolecularIntegrals};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn fixture(name: &str) -> MolecularIntegrals {
    read_fcidump(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn hubbard(n_sites: usize, u: f64, periodic: bool, filling: (usize, usize)) -> MolecularIntegrals {
    build_hubbard(&HubbardSpec {
        n_sites,
        t: 1.0,
        u,
        periodic,
        filling,
    })
    .unwrap()
}

/// Sorted eigenvalues of a Hermitian qubit operator via its dense matrix.
pub fn dense_spectrum(op: &PauliOperator) -> Vec<f64> {
    let m: DMatrix<Complex64> = op.to_dense().unwrap();
    let mut v: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "spectra differ in length");
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
