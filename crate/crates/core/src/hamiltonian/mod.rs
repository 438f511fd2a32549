//! Integral sources and second-quantized Hamiltonian assembly.

mod fcidump;
mod hubbard;
mod integrals;

pub use fcidump::{parse_fcidump, read_fcidump, write_fcidump};
pub use hubbard::{build_hubbard, canonical_eigenbasis, HubbardSpec};
pub use integrals::{physicist_images, KappaMatrix, MolecularIntegrals};

use num_complex::Complex64;

use crate::fermion::{FermionOperator, Ladder};
use crate::COEFF_EPS;

/// Folds the `core` orbitals into an effective one-body potential.
pub fn apply_frozen_core(ints: &MolecularIntegrals, core: &[usize]) -> crate::Result<MolecularIntegrals> {
    ints.freeze_core(core)
}

/// Integrals transformed by `R = exp(−κ)`.
pub fn rotate_integrals(ints: &MolecularIntegrals, kappa: &KappaMatrix) -> crate::Result<MolecularIntegrals> {
    ints.rotate(kappa)
}

/// Second-quantized Hamiltonian over `2 n` spin orbitals (block spin order):
/// `Σ h_rs a†_rσ a_sσ + ½ Σ ⟨rs|tu⟩ a†_rσ a†_sτ a_uτ a_tσ + e_offset`.
pub fn build_hamiltonian(ints: &MolecularIntegrals) -> FermionOperator {
    let n = ints.n_orbitals;
    let modes = 2 * n;
    let mut op = FermionOperator::zero(modes);
    let so = |p: usize, spin: usize| p + spin * n;
    let re = |v: f64| Complex64::new(v, 0.0);
    if ints.e_offset.abs() >= COEFF_EPS {
        op.add_term(Vec::new(), re(ints.e_offset)).unwrap();
    }
    for spin in 0..2 {
        for r in 0..n {
            for s in 0..n {
                let v = ints.h[(r, s)];
                if v.abs() >= COEFF_EPS {
                    op.add_term(
                        vec![Ladder::create(so(r, spin)), Ladder::annihilate(so(s, spin))],
                        re(v),
                    )
                    .unwrap();
                }
            }
        }
    }
    for sigma in 0..2 {
        for tau in 0..2 {
            for r in 0..n {
                for s in 0..n {
                    if sigma == tau && r == s {
                        continue;
                    }
                    for t in 0..n {
                        for u in 0..n {
                            if sigma == tau && t == u {
                                continue;
                            }
                            let v = ints.g(r, s, t, u);
                            if v.abs() < COEFF_EPS {
                                continue;
                            }
                            op.add_term(
                                vec![
                                    Ladder::create(so(r, sigma)),
                                    Ladder::create(so(s, tau)),
                                    Ladder::annihilate(so(u, tau)),
                                    Ladder::annihilate(so(t, sigma)),
                                ],
                                re(0.5 * v),
                            )
                            .unwrap();
                        }
                    }
                }
            }
        }
    }
    op.simplify()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::{number_operator, Spin};

    #[test]
    fn one_orbital_transcription() {
        let mut ints = MolecularIntegrals::zeros(1, 1, 1);
        ints.h[(0, 0)] = -1.25;
        ints.e_offset = 0.5;
        let op = build_hamiltonian(&ints);
        assert_eq!(op.len(), 3);
        assert_eq!(op.coefficient(&[]), Complex64::new(0.5, 0.0));
        let up = [Ladder::create(0), Ladder::annihilate(0)];
        let down = [Ladder::create(1), Ladder::annihilate(1)];
        assert_eq!(op.coefficient(&up), Complex64::new(-1.25, 0.0));
        assert_eq!(op.coefficient(&down), Complex64::new(-1.25, 0.0));
    }

    #[test]
    fn hubbard_hamiltonian_conserves_spin_numbers() {
        let ints = build_hubbard(&HubbardSpec {
            n_sites: 3,
            t: 1.0,
            u: 2.0,
            periodic: true,
            filling: (1, 2),
        })
        .unwrap();
        let h = build_hamiltonian(&ints);
        for spin in [Spin::Up, Spin::Down] {
            let c = h.commutator(&number_operator(spin, 3)).unwrap();
            assert!(c.is_zero(1e-12));
        }
        assert!(h.max_difference(&h.adjoint()).unwrap() < 1e-12);
    }
}
