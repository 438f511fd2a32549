//! Fermion-to-qubit encodings and qubit reduction.

pub mod pauli;
mod plan;
mod z2;

use std::collections::HashMap;

use num_complex::Complex64;

pub use pauli::{Pauli, PauliOperator, PauliString};
pub use plan::{occupation_string, EncodingPlan, Mapping};
pub use z2::{find_z2_symmetries, sector_from_reference, taper, SymmetryGenerator};

use crate::error::{Error, Result};
use crate::fermion::{FermionOperator, Ladder};

type LadderImage = [(PauliString, Complex64); 2];

fn jw_ladder(mode: usize, dagger: bool) -> LadderImage {
    let z_string = (1u64 << mode) - 1;
    let bit = 1u64 << mode;
    let sign = if dagger { -0.5 } else { 0.5 };
    [
        (PauliString::new(bit, z_string), Complex64::new(0.5, 0.0)),
        (PauliString::new(bit, z_string | bit), Complex64::new(0.0, sign)),
    ]
}

fn parity_ladder(mode: usize, dagger: bool, n_modes: usize) -> LadderImage {
    let upper = if n_modes == 64 { u64::MAX } else { (1u64 << n_modes) - 1 };
    let bit = 1u64 << mode;
    let x_tail = upper & !((bit << 1).wrapping_sub(1)) & !bit;
    let below = if mode == 0 { 0 } else { 1u64 << (mode - 1) };
    let sign = if dagger { -0.5 } else { 0.5 };
    [
        (PauliString::new(bit | x_tail, below), Complex64::new(0.5, 0.0)),
        (PauliString::new(bit | x_tail, bit), Complex64::new(0.0, sign)),
    ]
}

fn encode_with(op: &FermionOperator, image: impl Fn(Ladder) -> LadderImage) -> PauliOperator {
    let n = op.n_modes();
    let mut acc: HashMap<PauliString, Complex64> = HashMap::new();
    let mut partial: Vec<(PauliString, Complex64)> = Vec::new();
    let mut next: Vec<(PauliString, Complex64)> = Vec::new();
    for (ops, coeff) in op.terms() {
        partial.clear();
        partial.push((PauliString::IDENTITY, coeff));
        for &l in ops {
            next.clear();
            for (p, c) in &partial {
                for (q, d) in image(l) {
                    let (phase, r) = p.multiply(&q);
                    next.push((r, c * d * phase));
                }
            }
            std::mem::swap(&mut partial, &mut next);
        }
        for (p, c) in partial.drain(..) {
            *acc.entry(p).or_default() += c;
        }
    }
    PauliOperator::from_map(n, acc)
}

/// Jordan-Wigner image: `a†_p → ½(X_p − iY_p) Z_{p−1}⋯Z_0`.
pub fn jordan_wigner(op: &FermionOperator) -> PauliOperator {
    encode_with(op, |l| jw_ladder(l.mode, l.dagger))
}

/// Parity image: `a†_j → ½(Z_{j−1}X_j − iY_j) X_{j+1}⋯X_{M−1}`.
pub fn parity(op: &FermionOperator) -> PauliOperator {
    let n = op.n_modes();
    encode_with(op, |l| parity_ladder(l.mode, l.dagger, n))
}

/// Qubits holding the spin-up parity and the total parity in the parity encoding.
pub fn reduction_qubits(n_modes: usize) -> [usize; 2] {
    [n_modes / 2 - 1, n_modes - 1]
}

/// Replaces the two stored-parity qubits by their eigenvalues and removes them.
pub fn two_qubit_reduce(op: &PauliOperator, n_alpha: usize, n_beta: usize) -> Result<PauliOperator> {
    let n = op.n_qubits();
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::domain(format!(
            "two-qubit reduction needs an even register, got {n} qubits"
        )));
    }
    let [qa, qt] = reduction_qubits(n);
    let eigen = [
        if n_alpha.is_multiple_of(2) { 1.0 } else { -1.0 },
        if (n_alpha + n_beta).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        },
    ];
    let mut acc: HashMap<PauliString, Complex64> = HashMap::new();
    for (p, &c) in op.terms() {
        let mut c = c;
        for (&q, &e) in [qa, qt].iter().zip(&eigen) {
            match p.get(q) {
                Pauli::I => {}
                Pauli::Z => c *= e,
                other => {
                    return Err(Error::domain(format!(
                        "term {} acts with {other:?} on reduction qubit {q}",
                        p.label(n)
                    )))
                }
            }
        }
        *acc.entry(p.remove_qubits(&[qa, qt])).or_default() += c;
    }
    Ok(PauliOperator::from_map(n - 2, acc))
}

/// Parity mapping followed by the two-qubit reduction.
pub fn parity_map_reduced(op: &FermionOperator, n_alpha: usize, n_beta: usize) -> Result<PauliOperator> {
    two_qubit_reduce(&parity(op), n_alpha, n_beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::ladders;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn jw_number_operator() {
        let n = FermionOperator::from_term(1, ladders(&[(0, true), (0, false)]), c(1.0, 0.0)).unwrap();
        let q = jordan_wigner(&n);
        assert_eq!(q.len(), 2);
        assert_eq!(q.coefficient(&PauliString::IDENTITY), c(0.5, 0.0));
        assert_eq!(q.coefficient(&PauliString::single(0, Pauli::Z)), c(-0.5, 0.0));
    }

    #[test]
    fn jw_hopping() {
        let mut hop = FermionOperator::zero(2);
        hop.add_term(ladders(&[(1, true), (0, false)]), c(1.0, 0.0)).unwrap();
        hop.add_term(ladders(&[(0, true), (1, false)]), c(1.0, 0.0)).unwrap();
        let q = jordan_wigner(&hop.simplify());
        let xx = PauliString::from_label("XX").unwrap();
        let yy = PauliString::from_label("YY").unwrap();
        assert_eq!(q.len(), 2);
        assert!((q.coefficient(&xx) - c(0.5, 0.0)).norm() < 1e-15);
        assert!((q.coefficient(&yy) - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn dense_images_match_fermionic_matrices() {
        let mut op = FermionOperator::zero(4);
        op.add_term(ladders(&[(3, true), (1, false)]), c(0.3, -0.2)).unwrap();
        op.add_term(ladders(&[(2, true), (0, true), (1, false), (3, false)]), c(-0.7, 0.1))
            .unwrap();
        op.add_term(ladders(&[(2, true)]), c(0.4, 0.0)).unwrap();
        let op = op.simplify();
        let fermi = op.to_dense().unwrap();
        let jw = jordan_wigner(&op).to_dense().unwrap();
        assert!((fermi - &jw).norm() < 1e-13);
        // parity basis state b_j = ⊕_{k≤j} n_k; compare matrix elements
        let par = parity(&op).to_dense().unwrap();
        let to_parity = |occ: usize| {
            let mut b = 0;
            let mut acc = 0;
            for j in 0..4 {
                acc ^= occ >> j & 1;
                b |= acc << j;
            }
            b
        };
        for a in 0..16 {
            for b in 0..16 {
                assert!((jw[(a, b)] - par[(to_parity(a), to_parity(b))]).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn reduction_of_identity_and_violations() {
        let id = parity(&FermionOperator::identity(4));
        let red = two_qubit_reduce(&id, 1, 1).unwrap();
        assert_eq!(red.n_qubits(), 2);
        assert_eq!(red.coefficient(&PauliString::IDENTITY), c(1.0, 0.0));
        let flip = FermionOperator::from_term(4, ladders(&[(0, true)]), c(1.0, 0.0)).unwrap();
        assert!(matches!(parity_map_reduced(&flip, 1, 1), Err(Error::Domain(_))));
    }
}
