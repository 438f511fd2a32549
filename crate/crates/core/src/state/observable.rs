use std::collections::BTreeMap;

use num_complex::Complex64;

use super::Statevector;
use crate::encoding::pauli::i_pow;
use crate::encoding::{PauliOperator, PauliString};
use crate::error::{Error, Result};

/// Diagonal tables are precomputed while `groups · 2^n` stays below this.
const TABLE_BUDGET: usize = 1 << 24;
const IMAG_TOL: f64 = 1e-9;

struct Group {
    x: usize,
    /// (z mask, term index) for every string with this X mask.
    members: Vec<(usize, usize)>,
    table: Option<Vec<Complex64>>,
}

/// A Hermitian Pauli sum prepared for repeated expectation values.
///
/// Terms sharing an X mask are evaluated together: for mask `x` the
/// contribution is `Σ_k conj(ψ[k⊕x]) ψ[k] D_x(k)` with
/// `D_x(k) = Σ c_t i^{ny_t} (−1)^{|k & z_t|}`.
pub struct Observable {
    n_qubits: usize,
    strings: Vec<PauliString>,
    coeffs: Vec<f64>,
    groups: Vec<Group>,
}

impl Observable {
    pub fn new(op: &PauliOperator) -> Result<Self> {
        if !op.is_hermitian(IMAG_TOL) {
            return Err(Error::domain("expectation requires a Hermitian operator"));
        }
        let strings: Vec<PauliString> = op.terms().map(|(p, _)| *p).collect();
        let coeffs: Vec<f64> = op.terms().map(|(_, c)| c.re).collect();
        Ok(Self::from_parts(op.n_qubits(), strings, coeffs))
    }

    /// Builds an observable over fixed strings; coefficients may be replaced
    /// later with [`set_coefficients`](Self::set_coefficients).
    pub fn from_parts(n_qubits: usize, strings: Vec<PauliString>, coeffs: Vec<f64>) -> Self {
        assert_eq!(strings.len(), coeffs.len());
        let mut by_x: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        for (t, p) in strings.iter().enumerate() {
            by_x.entry(p.x as usize).or_default().push((p.z as usize, t));
        }
        let groups = by_x
            .into_iter()
            .map(|(x, members)| Group {
                x,
                members,
                table: None,
            })
            .collect();
        let mut obs = Observable {
            n_qubits,
            strings,
            coeffs,
            groups,
        };
        obs.rebuild_tables();
        obs
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn strings(&self) -> &[PauliString] {
        &self.strings
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn set_coefficients(&mut self, coeffs: &[f64]) {
        assert_eq!(coeffs.len(), self.coeffs.len());
        self.coeffs.copy_from_slice(coeffs);
        self.rebuild_tables();
    }

    fn rebuild_tables(&mut self) {
        let dim = 1usize << self.n_qubits;
        let use_tables = self.groups.len().saturating_mul(dim) <= TABLE_BUDGET;
        for g in &mut self.groups {
            if !use_tables {
                g.table = None;
                continue;
            }
            let mut table = vec![Complex64::new(0.0, 0.0); dim];
            for &(z, t) in &g.members {
                let c = self.coeffs[t] * i_pow(self.strings[t].y_count() as i64);
                for (k, d) in table.iter_mut().enumerate() {
                    if (k & z).count_ones() % 2 == 0 {
                        *d += c;
                    } else {
                        *d -= c;
                    }
                }
            }
            g.table = Some(table);
        }
    }

    /// `⟨ψ|O|ψ⟩`.
    pub fn expectation(&self, state: &Statevector) -> Result<f64> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::domain(format!(
                "state has {} qubits, observable {}",
                state.n_qubits(),
                self.n_qubits
            )));
        }
        let psi = state.amplitudes();
        let mut total = Complex64::new(0.0, 0.0);
        for g in &self.groups {
            match &g.table {
                Some(table) => {
                    for (k, (a, d)) in psi.iter().zip(table).enumerate() {
                        total += psi[k ^ g.x].conj() * a * d;
                    }
                }
                None => {
                    for &(z, t) in &g.members {
                        let c = self.coeffs[t] * i_pow(self.strings[t].y_count() as i64);
                        let mut acc = Complex64::new(0.0, 0.0);
                        for (k, a) in psi.iter().enumerate() {
                            let w = psi[k ^ g.x].conj() * a;
                            if (k & z).count_ones() % 2 == 0 {
                                acc += w;
                            } else {
                                acc -= w;
                            }
                        }
                        total += c * acc;
                    }
                }
            }
        }
        let scale = 1.0 + total.re.abs();
        if total.im.abs() > IMAG_TOL * scale {
            return Err(Error::Internal(format!(
                "expectation has imaginary residue {:e}",
                total.im
            )));
        }
        Ok(total.re)
    }

    /// `⟨ψ|P_t|ψ⟩` for every string, in construction order.
    pub fn string_expectations(&self, state: &Statevector) -> Vec<f64> {
        let psi = state.amplitudes();
        let dim = psi.len();
        let mut out = vec![0.0; self.strings.len()];
        // ⟨P⟩ = Re(i^{ny} Σ_k (−1)^{|k&z|} conj(ψ[k⊕x]) ψ[k]) needs only one component
        let mut re = vec![0.0; dim];
        let mut im = vec![0.0; dim];
        for g in &self.groups {
            for k in 0..dim {
                let v = psi[k ^ g.x].conj() * psi[k];
                re[k] = v.re;
                im[k] = v.im;
            }
            if g.members.len() > 2 * self.n_qubits {
                walsh_hadamard(&mut re);
                walsh_hadamard(&mut im);
                for &(z, t) in &g.members {
                    out[t] = component(self.strings[t].y_count(), re[z], im[z]);
                }
                continue;
            }
            for &(z, t) in &g.members {
                let ny = self.strings[t].y_count();
                let part = if ny.is_multiple_of(2) { &re } else { &im };
                let mut acc = 0.0;
                for (k, v) in part.iter().enumerate() {
                    let odd = (k & z).count_ones() & 1;
                    acc += f64::from(1 - 2 * odd as i32) * v;
                }
                out[t] = if ny.is_multiple_of(2) {
                    component(ny, acc, 0.0)
                } else {
                    component(ny, 0.0, acc)
                };
            }
        }
        out
    }
}

/// `Re(i^{ny} (re + i·im))`.
fn component(ny: u32, re: f64, im: f64) -> f64 {
    match ny % 4 {
        0 => re,
        1 => -im,
        2 => -re,
        _ => im,
    }
}

/// In-place unnormalized transform `v[z] ← Σ_k (−1)^{|k&z|} v[k]`.
fn walsh_hadamard(v: &mut [f64]) {
    let mut h = 1;
    while h < v.len() {
        for block in v.chunks_mut(2 * h) {
            let (a, b) = block.split_at_mut(h);
            for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                let (p, q) = (*x, *y);
                *x = p + q;
                *y = p - q;
            }
        }
        h *= 2;
    }
}

/// `⟨ψ|op|ψ⟩` for a Hermitian Pauli sum.
pub fn expectation(state: &Statevector, op: &PauliOperator) -> Result<f64> {
    let obs = Observable::new(op)?;
    obs.expectation(state)
}
