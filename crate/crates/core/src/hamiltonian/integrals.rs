use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// One- and two-electron integrals over real spatial orbitals.
///
/// `g` is stored in physicist order, `g(r, s, t, u) = ⟨rs|tu⟩`, as a flat
/// row-major `n^4` array.
#[derive(Clone, Debug, PartialEq)]
pub struct MolecularIntegrals {
    pub n_orbitals: usize,
    pub h: DMatrix<f64>,
    pub g: Vec<f64>,
    pub e_offset: f64,
    pub n_alpha: usize,
    pub n_beta: usize,
}

impl MolecularIntegrals {
    pub fn zeros(n_orbitals: usize, n_alpha: usize, n_beta: usize) -> Self {
        MolecularIntegrals {
            n_orbitals,
            h: DMatrix::zeros(n_orbitals, n_orbitals),
            g: vec![0.0; n_orbitals.pow(4)],
            e_offset: 0.0,
            n_alpha,
            n_beta,
        }
    }

    #[inline]
    pub fn g_index(&self, r: usize, s: usize, t: usize, u: usize) -> usize {
        let n = self.n_orbitals;
        ((r * n + s) * n + t) * n + u
    }

    #[inline]
    pub fn g(&self, r: usize, s: usize, t: usize, u: usize) -> f64 {
        self.g[self.g_index(r, s, t, u)]
    }

    /// Sets `⟨rs|tu⟩` and every entry related by the real-orbital symmetry.
    pub fn set_g_symmetric(&mut self, r: usize, s: usize, t: usize, u: usize, value: f64) {
        for (a, b, c, d) in physicist_images(r, s, t, u) {
            let k = self.g_index(a, b, c, d);
            self.g[k] = value;
        }
    }

    pub fn n_electrons(&self) -> usize {
        self.n_alpha + self.n_beta
    }

    pub fn n_spin_orbitals(&self) -> usize {
        2 * self.n_orbitals
    }

    /// Checks shapes, symmetries and electron counts.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let n = self.n_orbitals;
        if self.h.nrows() != n || self.h.ncols() != n || self.g.len() != n.pow(4) {
            return Err(Error::domain("integral arrays do not match n_orbitals"));
        }
        if self.n_alpha > n || self.n_beta > n {
            return Err(Error::domain(format!(
                "electron counts ({}, {}) exceed {} orbitals",
                self.n_alpha, self.n_beta, n
            )));
        }
        for r in 0..n {
            for s in 0..n {
                if (self.h[(r, s)] - self.h[(s, r)]).abs() > tol {
                    return Err(Error::domain(format!("h is not symmetric at ({r},{s})")));
                }
            }
        }
        for r in 0..n {
            for s in 0..n {
                for t in 0..n {
                    for u in 0..n {
                        let v = self.g(r, s, t, u);
                        for (a, b, c, d) in physicist_images(r, s, t, u) {
                            if (self.g(a, b, c, d) - v).abs() > tol {
                                return Err(Error::domain(format!("g lacks 8-fold symmetry at ({r},{s},{t},{u})")));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Energy of the determinant filling the lowest `n_alpha` / `n_beta` orbitals.
    pub fn reference_energy(&self) -> f64 {
        let mut e = self.e_offset;
        for i in 0..self.n_alpha {
            e += self.h[(i, i)];
        }
        for i in 0..self.n_beta {
            e += self.h[(i, i)];
        }
        let occ = |na: usize, nb: usize| {
            let mut e2 = 0.0;
            for i in 0..na {
                for j in 0..nb {
                    e2 += self.g(i, j, i, j);
                }
            }
            e2
        };
        let same = |m: usize| {
            let mut e2 = 0.0;
            for i in 0..m {
                for j in 0..m {
                    e2 += 0.5 * (self.g(i, j, i, j) - self.g(i, j, j, i));
                }
            }
            e2
        };
        e + occ(self.n_alpha, self.n_beta) + same(self.n_alpha) + same(self.n_beta)
    }

    /// Folds doubly occupied `core` orbitals into an effective one-body term.
    pub fn freeze_core(&self, core: &[usize]) -> Result<MolecularIntegrals> {
        let mut core: Vec<usize> = core.to_vec();
        core.sort_unstable();
        core.dedup();
        if core.is_empty() {
            return Ok(self.clone());
        }
        for &c in &core {
            if c >= self.n_alpha || c >= self.n_beta {
                return Err(Error::domain(format!(
                    "core orbital {c} is not doubly occupied in the reference"
                )));
            }
        }
        let active: Vec<usize> = (0..self.n_orbitals).filter(|p| !core.contains(p)).collect();
        let na = active.len();
        let mut out = MolecularIntegrals::zeros(na, self.n_alpha - core.len(), self.n_beta - core.len());
        let mut e = self.e_offset;
        for &i in &core {
            e += 2.0 * self.h[(i, i)];
            for &j in &core {
                e += 2.0 * self.g(i, j, i, j) - self.g(i, j, j, i);
            }
        }
        out.e_offset = e;
        for (a, &r) in active.iter().enumerate() {
            for (b, &s) in active.iter().enumerate() {
                let mut v = self.h[(r, s)];
                for &i in &core {
                    v += 2.0 * self.g(r, i, s, i) - self.g(r, i, i, s);
                }
                out.h[(a, b)] = v;
            }
        }
        for (a, &r) in active.iter().enumerate() {
            for (b, &s) in active.iter().enumerate() {
                for (c, &t) in active.iter().enumerate() {
                    for (d, &u) in active.iter().enumerate() {
                        let k = out.g_index(a, b, c, d);
                        out.g[k] = self.g(r, s, t, u);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Integrals in the rotated basis `φ'_p = Σ_r φ_r R_rp` with `R = exp(−κ)`.
    pub fn rotate(&self, kappa: &KappaMatrix) -> Result<MolecularIntegrals> {
        if kappa.dim() != self.n_orbitals {
            return Err(Error::domain(format!(
                "kappa is {}x{} but there are {} orbitals",
                kappa.dim(),
                kappa.dim(),
                self.n_orbitals
            )));
        }
        self.rotate_with(&kappa.rotation())
    }

    /// Basis change by an explicit orthogonal matrix.
    pub fn rotate_with(&self, r: &DMatrix<f64>) -> Result<MolecularIntegrals> {
        let n = self.n_orbitals;
        if r.nrows() != n || r.ncols() != n {
            return Err(Error::domain("rotation matrix dimension mismatch"));
        }
        let mut out = self.clone();
        out.h = r.transpose() * &self.h * r;
        // four quarter transformations, one index at a time
        let mut cur = self.g.clone();
        let mut next = vec![0.0; n.pow(4)];
        for axis in 0..4 {
            let stride = n.pow(3 - axis as u32);
            for (idx, slot) in next.iter_mut().enumerate() {
                let q = (idx / stride) % n;
                let base = idx - q * stride;
                let mut acc = 0.0;
                for p in 0..n {
                    acc += r[(p, q)] * cur[base + p * stride];
                }
                *slot = acc;
            }
            std::mem::swap(&mut cur, &mut next);
        }
        out.g = cur;
        Ok(out)
    }
}

/// The eight index tuples equal to `⟨rs|tu⟩` for real orbitals.
pub fn physicist_images(r: usize, s: usize, t: usize, u: usize) -> [(usize, usize, usize, usize); 8] {
    [
        (r, s, t, u),
        (s, r, u, t),
        (t, u, r, s),
        (u, t, s, r),
        (t, s, r, u),
        (s, t, u, r),
        (r, u, t, s),
        (u, r, s, t),
    ]
}

/// Real antisymmetric orbital-rotation generator.
#[derive(Clone, Debug, PartialEq)]
pub struct KappaMatrix {
    values: DMatrix<f64>,
}

impl KappaMatrix {
    pub fn zeros(n: usize) -> Self {
        KappaMatrix {
            values: DMatrix::zeros(n, n),
        }
    }

    pub fn from_matrix(values: DMatrix<f64>) -> Result<Self> {
        if values.nrows() != values.ncols() {
            return Err(Error::domain("kappa must be square"));
        }
        let n = values.nrows();
        for r in 0..n {
            for s in 0..n {
                if (values[(r, s)] + values[(s, r)]).abs() > 1e-12 {
                    return Err(Error::domain(format!("kappa not antisymmetric at ({r},{s})")));
                }
            }
        }
        Ok(KappaMatrix { values })
    }

    /// Builds κ from its strictly upper triangle, row by row (`κ_rs`, r < s).
    pub fn from_parameters(n: usize, params: &[f64]) -> Result<Self> {
        if params.len() != Self::n_parameters(n) {
            return Err(Error::domain(format!(
                "expected {} kappa parameters, got {}",
                Self::n_parameters(n),
                params.len()
            )));
        }
        let mut values = DMatrix::zeros(n, n);
        let mut k = 0;
        for r in 0..n {
            for s in r + 1..n {
                values[(r, s)] = params[k];
                values[(s, r)] = -params[k];
                k += 1;
            }
        }
        Ok(KappaMatrix { values })
    }

    pub fn n_parameters(n: usize) -> usize {
        n * n.saturating_sub(1) / 2
    }

    pub fn parameters(&self) -> Vec<f64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(Self::n_parameters(n));
        for r in 0..n {
            for s in r + 1..n {
                out.push(self.values[(r, s)]);
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.values.nrows()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    /// `exp(−κ)` via nalgebra's scaling-and-squaring Padé exponential.
    pub fn rotation(&self) -> DMatrix<f64> {
        (-&self.values).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> MolecularIntegrals {
        let mut ints = MolecularIntegrals::zeros(3, 2, 2);
        ints.h = DMatrix::from_row_slice(3, 3, &[-1.5, 0.1, 0.02, 0.1, -0.9, 0.05, 0.02, 0.05, 0.3]);
        ints.set_g_symmetric(0, 0, 0, 0, 0.7);
        ints.set_g_symmetric(0, 1, 0, 1, 0.6);
        ints.set_g_symmetric(0, 1, 1, 0, 0.15);
        ints.set_g_symmetric(1, 1, 1, 1, 0.65);
        ints.set_g_symmetric(0, 2, 1, 2, 0.03);
        ints.set_g_symmetric(2, 2, 2, 2, 0.5);
        ints.set_g_symmetric(0, 2, 0, 2, 0.4);
        ints.e_offset = 0.25;
        ints
    }

    #[test]
    fn symmetric_setter_passes_validation() {
        toy().validate(1e-14).unwrap();
    }

    #[test]
    fn kappa_round_trips_parameters() {
        let k = KappaMatrix::from_parameters(4, &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6]).unwrap();
        assert_eq!(k.parameters(), vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6]);
        assert_eq!(k.values()[(3, 2)], -0.6);
        let r = k.rotation();
        let id = r.transpose() * &r;
        assert!((id - DMatrix::identity(4, 4)).abs().max() < 1e-13);
    }

    #[test]
    fn zero_kappa_is_identity() {
        let ints = toy();
        let out = ints.rotate(&KappaMatrix::zeros(3)).unwrap();
        assert!((out.h.clone() - ints.h.clone()).abs().max() < 1e-15);
        assert!(out.g.iter().zip(&ints.g).all(|(a, b)| (a - b).abs() < 1e-15));
    }

    #[test]
    fn rotation_preserves_symmetry_and_matches_naive_transform() {
        let ints = toy();
        let k = KappaMatrix::from_parameters(3, &[0.07, -0.03, 0.09]).unwrap();
        let out = ints.rotate(&k).unwrap();
        out.validate(1e-12).unwrap();
        let r = k.rotation();
        let n = 3;
        let mut v = 0.0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        v += r[(a, 0)] * r[(b, 2)] * r[(c, 1)] * r[(d, 2)] * ints.g(a, b, c, d);
                    }
                }
            }
        }
        assert!((out.g(0, 2, 1, 2) - v).abs() < 1e-14);
    }

    #[test]
    fn frozen_core_reference_energy_is_consistent() {
        let ints = toy();
        let frozen = ints.freeze_core(&[0]).unwrap();
        assert_eq!(frozen.n_orbitals, 2);
        assert_eq!((frozen.n_alpha, frozen.n_beta), (1, 1));
        assert!((frozen.reference_energy() - ints.reference_energy()).abs() < 1e-13);
    }

    #[test]
    fn freezing_an_unoccupied_orbital_fails() {
        assert!(matches!(toy().freeze_core(&[2]), Err(Error::Domain(_))));
    }
}
