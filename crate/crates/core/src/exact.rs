//! Exact diagonalization in a fixed `(n_alpha, n_beta)` determinant sector.
//!
//! Matrix elements come straight from the integrals through the Slater-Condon
//! rules on occupation bitstrings, without touching the fermion-operator or
//! qubit code paths.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::encoding::{EncodingPlan, PauliOperator};
use crate::error::{Error, Result};
use crate::hamiltonian::MolecularIntegrals;

/// Largest sector handled by the iterative solver.
pub const MAX_SECTOR_DIM: usize = 400_000;
/// Sectors up to this size are diagonalized densely.
pub const DENSE_DIM: usize = 1500;
/// Cap for dense diagonalization of qubit operators.
pub const MAX_QUBIT_SECTOR_DIM: usize = 2500;

/// Determinants `(up, down)` with the requested electron counts, ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorBasis {
    pub n_orbitals: usize,
    pub dets: Vec<(u64, u64)>,
}

fn strings_with_popcount(n: usize, k: usize) -> Vec<u64> {
    (0u64..1 << n).filter(|s| s.count_ones() as usize == k).collect()
}

impl SectorBasis {
    pub fn new(n_orbitals: usize, n_alpha: usize, n_beta: usize) -> Self {
        let ups = strings_with_popcount(n_orbitals, n_alpha);
        let downs = strings_with_popcount(n_orbitals, n_beta);
        let dets = ups.iter().flat_map(|&u| downs.iter().map(move |&d| (u, d))).collect();
        SectorBasis { n_orbitals, dets }
    }

    pub fn dim(&self) -> usize {
        self.dets.len()
    }

    /// Spin-orbital bitmask (spin up in the low `n` bits).
    pub fn combined(&self, k: usize) -> u64 {
        let (u, d) = self.dets[k];
        u | d << self.n_orbitals
    }
}

pub fn sector_dimension(n_orbitals: usize, n_alpha: usize, n_beta: usize) -> usize {
    binomial(n_orbitals, n_alpha) * binomial(n_orbitals, n_beta)
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Sign of moving past the occupied modes below `p`.
#[inline]
fn parity_below(det: u64, p: usize) -> f64 {
    if (det & ((1u64 << p) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Spin-orbital integral tables in the `up | down << n` layout.
struct SpinIntegrals<'a> {
    ints: &'a MolecularIntegrals,
    n: usize,
}

impl SpinIntegrals<'_> {
    #[inline]
    fn split(&self, p: usize) -> (usize, usize) {
        (p % self.n, p / self.n)
    }

    #[inline]
    fn h(&self, p: usize, q: usize) -> f64 {
        let (a, sa) = self.split(p);
        let (b, sb) = self.split(q);
        if sa == sb {
            self.ints.h[(a, b)]
        } else {
            0.0
        }
    }

    /// `⟨pq|rs⟩` with spin integration.
    #[inline]
    fn g(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let (a, sa) = self.split(p);
        let (b, sb) = self.split(q);
        let (c, sc) = self.split(r);
        let (d, sd) = self.split(s);
        if sa == sc && sb == sd {
            self.ints.g(a, b, c, d)
        } else {
            0.0
        }
    }

    #[inline]
    fn anti(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.g(p, q, r, s) - self.g(p, q, s, r)
    }
}

fn occupied(det: u64) -> Vec<usize> {
    (0..64).filter(|&p| det >> p & 1 == 1).collect()
}

/// Row-wise sparse sector Hamiltonian.
struct SectorMatrix {
    diag: Vec<f64>,
    rows: Vec<Vec<(usize, f64)>>,
}

fn build_sector_matrix(ints: &MolecularIntegrals, basis: &SectorBasis) -> SectorMatrix {
    let n = ints.n_orbitals;
    let si = SpinIntegrals { ints, n };
    let index: HashMap<u64, usize> = (0..basis.dim()).map(|k| (basis.combined(k), k)).collect();
    let modes = 2 * n;
    let mut diag = vec![0.0; basis.dim()];
    let mut rows = vec![Vec::new(); basis.dim()];
    for k in 0..basis.dim() {
        let det = basis.combined(k);
        let occ = occupied(det);
        let virt: Vec<usize> = (0..modes).filter(|&p| det >> p & 1 == 0).collect();
        let mut e = ints.e_offset;
        for (x, &i) in occ.iter().enumerate() {
            e += si.h(i, i);
            for &j in &occ[x + 1..] {
                e += si.anti(i, j, i, j);
            }
        }
        diag[k] = e;
        let row = &mut rows[k];
        // singles a†_a a_i
        for &i in &occ {
            for &a in &virt {
                if i / n != a / n {
                    continue;
                }
                let mid = det ^ (1u64 << i);
                let sign = parity_below(det, i) * parity_below(mid, a);
                let target = mid | (1u64 << a);
                let mut v = si.h(a, i);
                for &j in &occ {
                    if j != i {
                        v += si.anti(a, j, i, j);
                    }
                }
                if v != 0.0 {
                    row.push((index[&target], sign * v));
                }
            }
        }
        // doubles a†_a a†_b a_j a_i, i < j, a < b
        for (x, &i) in occ.iter().enumerate() {
            for &j in &occ[x + 1..] {
                for (y, &a) in virt.iter().enumerate() {
                    for &b in &virt[y + 1..] {
                        let up_before = (i < n) as usize + (j < n) as usize;
                        let up_after = (a < n) as usize + (b < n) as usize;
                        if up_before != up_after {
                            continue;
                        }
                        let v = si.anti(a, b, i, j);
                        if v == 0.0 {
                            continue;
                        }
                        let mut d = det;
                        let mut sign = parity_below(d, i);
                        d ^= 1u64 << i;
                        sign *= parity_below(d, j);
                        d ^= 1u64 << j;
                        sign *= parity_below(d, b);
                        d |= 1u64 << b;
                        sign *= parity_below(d, a);
                        d |= 1u64 << a;
                        row.push((index[&d], sign * v));
                    }
                }
            }
        }
    }
    SectorMatrix { diag, rows }
}

impl SectorMatrix {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply(&self, v: &[f64], out: &mut [f64]) {
        for (k, row) in self.rows.iter().enumerate() {
            let mut acc = self.diag[k] * v[k];
            for &(j, h) in row {
                acc += h * v[j];
            }
            out[k] = acc;
        }
    }

    fn dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (k, row) in self.rows.iter().enumerate() {
            m[(k, k)] = self.diag[k];
            for &(j, h) in row {
                m[(j, k)] += h;
            }
        }
        m
    }
}

/// Lowest eigenpair of a sector.
#[derive(Clone, Debug)]
pub struct ExactResult {
    pub energy: f64,
    pub vector: Vec<f64>,
    pub basis: SectorBasis,
}

impl ExactResult {
    /// Amplitude of each determinant as a spin-orbital bitmask.
    pub fn determinant_amplitudes(&self) -> Vec<(u64, f64)> {
        (0..self.basis.dim())
            .map(|k| (self.basis.combined(k), self.vector[k]))
            .collect()
    }
}

fn check_dimension(ints: &MolecularIntegrals) -> Result<()> {
    let dim = sector_dimension(ints.n_orbitals, ints.n_alpha, ints.n_beta);
    if dim > MAX_SECTOR_DIM {
        return Err(Error::Capability(format!(
            "sector dimension {dim} exceeds the cap of {MAX_SECTOR_DIM}"
        )));
    }
    if 2 * ints.n_orbitals > 64 {
        return Err(Error::Capability("at most 32 spatial orbitals".into()));
    }
    Ok(())
}

/// Ground state of the `(n_alpha, n_beta)` sector, energy including `e_offset`.
pub fn exact_ground(ints: &MolecularIntegrals) -> Result<ExactResult> {
    check_dimension(ints)?;
    let basis = SectorBasis::new(ints.n_orbitals, ints.n_alpha, ints.n_beta);
    let h = build_sector_matrix(ints, &basis);
    let (energy, vector) = if h.dim() <= DENSE_DIM {
        let eig = SymmetricEigen::new(h.dense());
        let k = eig.eigenvalues.imin();
        (eig.eigenvalues[k], eig.eigenvectors.column(k).iter().copied().collect())
    } else {
        davidson(&h)?
    };
    Ok(ExactResult { energy, vector, basis })
}

/// Every eigenvalue of the sector, ascending (dense path only).
pub fn exact_spectrum(ints: &MolecularIntegrals) -> Result<Vec<f64>> {
    check_dimension(ints)?;
    let dim = sector_dimension(ints.n_orbitals, ints.n_alpha, ints.n_beta);
    if dim > DENSE_DIM {
        return Err(Error::Capability(format!(
            "full spectrum limited to dimension {DENSE_DIM}, got {dim}"
        )));
    }
    let basis = SectorBasis::new(ints.n_orbitals, ints.n_alpha, ints.n_beta);
    let h = build_sector_matrix(ints, &basis);
    let mut values: Vec<f64> = SymmetricEigen::new(h.dense()).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

fn davidson(h: &SectorMatrix) -> Result<(f64, Vec<f64>)> {
    const MAX_SUBSPACE: usize = 40;
    const TOL: f64 = 1e-9;
    let n = h.dim();
    let start = (0..n).min_by(|&a, &b| h.diag[a].total_cmp(&h.diag[b])).unwrap();
    let mut v0 = vec![0.0; n];
    v0[start] = 1.0;
    let mut basis: Vec<Vec<f64>> = vec![v0];
    let mut sigma: Vec<Vec<f64>> = Vec::new();
    let mut theta = h.diag[start];
    for _ in 0..1000 {
        while sigma.len() < basis.len() {
            let mut s = vec![0.0; n];
            h.apply(&basis[sigma.len()], &mut s);
            sigma.push(s);
        }
        let m = basis.len();
        let small = DMatrix::from_fn(m, m, |a, b| dot(&basis[a], &sigma[b]));
        let small = (&small + small.transpose()) * 0.5;
        let eig = SymmetricEigen::new(small);
        let k = eig.eigenvalues.imin();
        theta = eig.eigenvalues[k];
        let y: DVector<f64> = eig.eigenvectors.column(k).into_owned();
        let mut x = vec![0.0; n];
        let mut r = vec![0.0; n];
        for (j, &c) in y.iter().enumerate() {
            axpy(c, &basis[j], &mut x);
            axpy(c, &sigma[j], &mut r);
        }
        axpy(-theta, &x.clone(), &mut r);
        let rnorm = dot(&r, &r).sqrt();
        if rnorm < TOL {
            return Ok((theta, x));
        }
        if m >= MAX_SUBSPACE {
            let mut sx = vec![0.0; n];
            for (j, &c) in y.iter().enumerate() {
                axpy(c, &sigma[j], &mut sx);
            }
            basis = vec![x];
            sigma = vec![sx];
        }
        let mut t: Vec<f64> = r
            .iter()
            .zip(&h.diag)
            .map(|(ri, d)| {
                let denom = theta - d;
                if denom.abs() < 1e-8 {
                    -ri / 1e-8
                } else {
                    -ri / denom
                }
            })
            .collect();
        for _ in 0..2 {
            for b in &basis {
                let o = dot(b, &t);
                axpy(-o, b, &mut t);
            }
        }
        let tn = dot(&t, &t).sqrt();
        if tn < 1e-14 {
            break;
        }
        t.iter_mut().for_each(|v| *v /= tn);
        basis.push(t);
    }
    Err(Error::Internal(format!(
        "Davidson did not converge (last estimate {theta})"
    )))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Basis indices of `plan`'s register whose decoded determinant has the
/// requested electron counts.
pub fn sector_indices(plan: &EncodingPlan, n_alpha: usize, n_beta: usize) -> Vec<usize> {
    let n = plan.n_modes / 2;
    let up_mask = (1u64 << n) - 1;
    (0..1usize << plan.n_qubits())
        .filter(|&k| {
            let (occ, _) = plan.decode_basis(k);
            (occ & up_mask).count_ones() as usize == n_alpha && (occ >> n).count_ones() as usize == n_beta
        })
        .collect()
}

/// Eigenvalues of a qubit operator restricted to the `(n_alpha, n_beta)`
/// particle sector, ascending.
pub fn exact_spectrum_sector(
    op: &PauliOperator,
    plan: &EncodingPlan,
    n_alpha: usize,
    n_beta: usize,
) -> Result<Vec<f64>> {
    if op.n_qubits() != plan.n_qubits() {
        return Err(Error::domain("operator and plan disagree on the register width"));
    }
    if op.n_qubits() > 14 {
        return Err(Error::Capability(format!(
            "sector spectra limited to 14 qubits, got {}",
            op.n_qubits()
        )));
    }
    let idx = sector_indices(plan, n_alpha, n_beta);
    if idx.len() > MAX_QUBIT_SECTOR_DIM {
        return Err(Error::Capability(format!(
            "sector dimension {} exceeds {MAX_QUBIT_SECTOR_DIM}",
            idx.len()
        )));
    }
    let pos: HashMap<usize, usize> = idx.iter().enumerate().map(|(a, &k)| (k, a)).collect();
    let d = idx.len();
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for (col, &k) in idx.iter().enumerate() {
        for (p, c) in op.terms() {
            let (row_k, phase) = p.apply_to_basis(k);
            if let Some(&row) = pos.get(&row_k) {
                m[(row, col)] += c * phase;
            }
        }
    }
    let mut values: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Lowest sector eigenvalue of a qubit operator.
pub fn sector_ground_energy(op: &PauliOperator, plan: &EncodingPlan, n_alpha: usize, n_beta: usize) -> Result<f64> {
    exact_spectrum_sector(op, plan, n_alpha, n_beta)?
        .first()
        .copied()
        .ok_or_else(|| Error::domain("empty particle sector"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_hubbard, HubbardSpec};

    #[test]
    fn two_site_hubbard_closed_form() {
        for u in [0.0, 1.0, 4.0, 10.0] {
            let ints = build_hubbard(&HubbardSpec {
                n_sites: 2,
                t: 1.0,
                u,
                periodic: false,
                filling: (1, 1),
            })
            .unwrap();
            let e = exact_ground(&ints).unwrap().energy;
            let expect = (u - (u * u + 16.0).sqrt()) / 2.0;
            assert!((e - expect).abs() < 1e-12, "U={u}: {e} vs {expect}");
        }
    }

    #[test]
    fn single_orbital_determinant() {
        let mut ints = MolecularIntegrals::zeros(1, 1, 1);
        ints.h[(0, 0)] = -1.0;
        ints.e_offset = 0.3;
        assert!((exact_ground(&ints).unwrap().energy - (-2.0 + 0.3)).abs() < 1e-15);
    }

    #[test]
    fn davidson_matches_dense() {
        let ints = build_hubbard(&HubbardSpec {
            n_sites: 6,
            t: 1.0,
            u: 3.0,
            periodic: true,
            filling: (3, 3),
        })
        .unwrap();
        let basis = SectorBasis::new(6, 3, 3);
        let h = build_sector_matrix(&ints, &basis);
        let (e_dav, v) = davidson(&h).unwrap();
        let dense = exact_spectrum(&ints).unwrap()[0];
        assert!((e_dav - dense).abs() < 1e-10);
        assert!((dot(&v, &v) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sector_dimensions() {
        assert_eq!(sector_dimension(6, 3, 3), 400);
        assert_eq!(SectorBasis::new(4, 2, 1).dim(), 24);
    }
}
