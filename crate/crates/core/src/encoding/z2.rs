//! Z2 symmetry detection and qubit tapering.
//!
//! Only Z-type symmetries are searched: a string `Z^b` commutes with every term
//! `X^x Z^z` exactly when `b·x = 0` over GF(2), so the generators span the null
//! space of the matrix whose rows are the X masks of the Hamiltonian.

use std::collections::{BTreeSet, HashMap};

use num_complex::Complex64;

use super::pauli::{Pauli, PauliOperator, PauliString};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymmetryGenerator {
    pub pauli: PauliString,
    pub target_qubit: usize,
    /// Eigenvalue selected for tapering, `+1` or `−1`.
    pub sector_eigenvalue: i8,
}

/// Row-reduces `rows` in place so that each row's lowest set bit is a pivot
/// appearing in no other row. Returns the pivot of each surviving row.
fn reduce_lowest_pivots(rows: &mut Vec<u64>, n_bits: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n_bits {
        let bit = 1u64 << col;
        let Some(k) = (r..rows.len()).find(|&k| rows[k] & bit != 0) else {
            continue;
        };
        rows.swap(r, k);
        for j in 0..rows.len() {
            if j != r && rows[j] & bit != 0 {
                rows[j] ^= rows[r];
            }
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

/// Independent Z-type generators of the symmetry group of `op`.
///
/// Generators are in reduced row-echelon form with the lowest-index pivots;
/// each pivot is that generator's target qubit. Sector eigenvalues are set
/// to `+1` until assigned.
pub fn find_z2_symmetries(op: &PauliOperator) -> Vec<SymmetryGenerator> {
    let n = op.n_qubits();
    let x_rows: BTreeSet<u64> = op.terms().map(|(p, _)| p.x).filter(|&x| x != 0).collect();
    let mut rows: Vec<u64> = x_rows.into_iter().collect();
    let pivots = reduce_lowest_pivots(&mut rows, n);
    // null space: one vector per free column
    let mut kernel = Vec::new();
    for f in (0..n).filter(|c| !pivots.contains(c)) {
        let mut v = 1u64 << f;
        for (row, &p) in rows.iter().zip(&pivots) {
            if row >> f & 1 == 1 {
                v |= 1u64 << p;
            }
        }
        kernel.push(v);
    }
    let targets = reduce_lowest_pivots(&mut kernel, n);
    kernel
        .into_iter()
        .zip(targets)
        .map(|(z, q)| SymmetryGenerator {
            pauli: PauliString::new(0, z),
            target_qubit: q,
            sector_eigenvalue: 1,
        })
        .collect()
}

/// Eigenvalue of each generator on the computational basis state `basis`.
pub fn sector_from_reference(gens: &[SymmetryGenerator], basis: usize) -> Result<Vec<i8>> {
    gens.iter()
        .map(|g| {
            if g.pauli.x != 0 {
                return Err(Error::domain(format!(
                    "reference basis state is not an eigenstate of generator with X mask {:#x}",
                    g.pauli.x
                )));
            }
            Ok(if (basis as u64 & g.pauli.z).count_ones().is_multiple_of(2) {
                1
            } else {
                -1
            })
        })
        .collect()
}

/// Conjugates `op` by `Π (X_q + τ)/√2` and substitutes the sector eigenvalues
/// for the target-qubit X factors, removing those qubits.
pub fn taper(op: &PauliOperator, gens: &[SymmetryGenerator], sectors: &[i8]) -> Result<PauliOperator> {
    if gens.len() != sectors.len() {
        return Err(Error::domain("one sector eigenvalue per generator is required"));
    }
    if gens.is_empty() {
        return Ok(op.clone());
    }
    let n = op.n_qubits();
    let mut terms: Vec<(PauliString, Complex64)> = op.terms().map(|(p, c)| (*p, *c)).collect();
    for g in gens {
        let x = PauliString::single(g.target_qubit, Pauli::X);
        let tau = g.pauli;
        let mut acc: HashMap<PauliString, Complex64> = HashMap::new();
        for (p, c) in terms {
            if !p.commutes_with(&tau) {
                return Err(Error::domain(format!(
                    "term {} does not commute with a symmetry generator",
                    p.label(n)
                )));
            }
            // U P U with U = (X + τ)/√2
            for (a, b) in [(x, x), (x, tau), (tau, x), (tau, tau)] {
                let (ph1, ap) = a.multiply(&p);
                let (ph2, apb) = ap.multiply(&b);
                *acc.entry(apb).or_default() += c * ph1 * ph2 * 0.5;
            }
        }
        terms = acc.into_iter().filter(|(_, c)| c.norm() >= crate::COEFF_EPS).collect();
    }
    let removed: Vec<usize> = gens.iter().map(|g| g.target_qubit).collect();
    let mut acc: HashMap<PauliString, Complex64> = HashMap::new();
    for (p, mut c) in terms {
        for (g, &s) in gens.iter().zip(sectors) {
            match p.get(g.target_qubit) {
                Pauli::I => {}
                Pauli::X => c *= f64::from(s),
                other => {
                    return Err(Error::Internal(format!(
                        "tapered term {} keeps {other:?} on target qubit {}",
                        p.label(n),
                        g.target_qubit
                    )))
                }
            }
        }
        *acc.entry(p.remove_qubits(&removed)).or_default() += c;
    }
    Ok(PauliOperator::from_map(n - gens.len(), acc))
}
