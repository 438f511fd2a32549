use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::integrals::MolecularIntegrals;
use crate::error::{Error, Result};

/// One-dimensional Fermi-Hubbard chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HubbardSpec {
    pub n_sites: usize,
    pub t: f64,
    pub u: f64,
    pub periodic: bool,
    pub filling: (usize, usize),
}

impl HubbardSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(Error::domain("a Hubbard chain needs at least 2 sites"));
        }
        if self.filling.0 > self.n_sites || self.filling.1 > self.n_sites {
            return Err(Error::domain(format!(
                "filling {:?} exceeds {} sites",
                self.filling, self.n_sites
            )));
        }
        Ok(())
    }

    /// Site-basis hopping matrix with `−t` on every bond.
    pub fn hopping_matrix(&self) -> DMatrix<f64> {
        let n = self.n_sites;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n - 1 {
            m[(i, i + 1)] = -self.t;
            m[(i + 1, i)] = -self.t;
        }
        // for two sites the wrap bond would duplicate the only bond
        if self.periodic && n > 2 {
            m[(0, n - 1)] = -self.t;
            m[(n - 1, 0)] = -self.t;
        }
        m
    }
}

/// Eigenvectors of `m` as columns, eigenvalues ascending.
///
/// Degenerate blocks get a canonical basis: Gram-Schmidt applied to the
/// projections of the site unit vectors onto the block, each vector then
/// signed so its first nonzero component is positive.
pub fn canonical_eigenbasis(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    const DEGENERACY_TOL: f64 = 1e-8;
    let n = m.nrows();
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (values[end] - values[start]).abs() < DEGENERACY_TOL {
            end += 1;
        }
        let block: Vec<DVector<f64>> = order[start..end]
            .iter()
            .map(|&k| eig.eigenvectors.column(k).into_owned())
            .collect();
        let mut basis: Vec<DVector<f64>> = Vec::new();
        for site in 0..n {
            if basis.len() == block.len() {
                break;
            }
            // projection of e_site onto the block
            let mut v = DVector::zeros(n);
            for b in &block {
                v += b * b[site];
            }
            for q in &basis {
                let overlap = q.dot(&v);
                v -= q * overlap;
            }
            let norm = v.norm();
            if norm > 1e-6 {
                basis.push(v / norm);
            }
        }
        for (k, mut v) in basis.into_iter().enumerate() {
            if let Some(first) = v.iter().copied().find(|x| x.abs() > 1e-10) {
                if first < 0.0 {
                    v = -v;
                }
            }
            vectors.set_column(start + k, &v);
        }
        start = end;
    }
    (values, vectors)
}

/// Hubbard Hamiltonian as integrals in the hopping eigenbasis.
pub fn build_hubbard(spec: &HubbardSpec) -> Result<MolecularIntegrals> {
    spec.validate()?;
    let n = spec.n_sites;
    let hop = spec.hopping_matrix();
    let (_, c) = canonical_eigenbasis(&hop);
    let mut ints = MolecularIntegrals::zeros(n, spec.filling.0, spec.filling.1);
    ints.h = c.transpose() * &hop * &c;
    for p in 0..n {
        for q in 0..n {
            if (p != q) && ints.h[(p, q)].abs() < 1e-14 {
                ints.h[(p, q)] = 0.0;
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v: f64 = (0..n).map(|i| c[(i, p)] * c[(i, q)] * c[(i, r)] * c[(i, s)]).sum();
                    let k = ints.g_index(p, q, r, s);
                    ints.g[k] = spec.u * v;
                }
            }
        }
    }
    Ok(ints)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize, t: f64, u: f64, periodic: bool, filling: (usize, usize)) -> HubbardSpec {
        HubbardSpec {
            n_sites: n,
            t,
            u,
            periodic,
            filling,
        }
    }

    #[test]
    fn six_site_ring_orbital_energies() {
        let ints = build_hubbard(&chain(6, -1.0, 0.0, true, (3, 3))).unwrap();
        let diag: Vec<f64> = (0..6).map(|i| ints.h[(i, i)]).collect();
        let expect = [-2.0, -1.0, -1.0, 1.0, 1.0, 2.0];
        for (a, b) in diag.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{diag:?}");
        }
        assert!(ints.h.iter().enumerate().all(|(k, v)| k % 7 == 0 || v.abs() < 1e-12));
        ints.validate(1e-12).unwrap();
    }

    #[test]
    fn two_site_periodic_flag_adds_no_bond() {
        let open = chain(2, 1.0, 4.0, false, (1, 1)).hopping_matrix();
        let ring = chain(2, 1.0, 4.0, true, (1, 1)).hopping_matrix();
        assert_eq!(open, ring);
    }

    #[test]
    fn canonical_basis_is_orthonormal_and_deterministic() {
        let hop = chain(6, 1.0, 0.0, true, (3, 3)).hopping_matrix();
        let (_, c) = canonical_eigenbasis(&hop);
        let id = c.transpose() * &c;
        assert!((id - DMatrix::identity(6, 6)).abs().max() < 1e-12);
        let (_, c2) = canonical_eigenbasis(&hop);
        assert_eq!(c, c2);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(build_hubbard(&chain(1, 1.0, 1.0, false, (1, 0))).is_err());
        assert!(build_hubbard(&chain(3, 1.0, 1.0, false, (4, 0))).is_err());
    }
}
