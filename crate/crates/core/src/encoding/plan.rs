use serde::{Deserialize, Serialize};

use super::pauli::{compress_bit, expand_bit, PauliOperator};
use super::z2::{find_z2_symmetries, sector_from_reference, taper, SymmetryGenerator};
use super::{jordan_wigner, parity, reduction_qubits, two_qubit_reduce};
use crate::error::{Error, Result};
use crate::fermion::FermionOperator;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mapping {
    JordanWigner,
    Parity,
}

/// Everything needed to move operators and determinants between the
/// fermionic and qubit pictures.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodingPlan {
    pub mapping: Mapping,
    pub two_qubit_reduction: bool,
    pub n_modes: usize,
    pub n_alpha: usize,
    pub n_beta: usize,
    /// Tapering generators on the mapped (and reduced) register, with sectors.
    pub generators: Vec<SymmetryGenerator>,
}

impl EncodingPlan {
    pub fn new(
        mapping: Mapping,
        two_qubit_reduction: bool,
        n_modes: usize,
        n_alpha: usize,
        n_beta: usize,
    ) -> Result<Self> {
        if n_modes == 0 || !n_modes.is_multiple_of(2) || n_modes > 64 {
            return Err(Error::domain(format!("unsupported spin-orbital count {n_modes}")));
        }
        if n_alpha > n_modes / 2 || n_beta > n_modes / 2 {
            return Err(Error::domain("more electrons per spin than orbitals"));
        }
        if two_qubit_reduction && mapping != Mapping::Parity {
            return Err(Error::domain("two-qubit reduction requires the parity mapping"));
        }
        Ok(EncodingPlan {
            mapping,
            two_qubit_reduction,
            n_modes,
            n_alpha,
            n_beta,
            generators: Vec::new(),
        })
    }

    pub fn jordan_wigner(n_modes: usize, n_alpha: usize, n_beta: usize) -> Self {
        Self::new(Mapping::JordanWigner, false, n_modes, n_alpha, n_beta).unwrap()
    }

    /// Adds the Z2 symmetries of `hamiltonian`, in the reference sector.
    pub fn with_tapering(mut self, hamiltonian: &FermionOperator) -> Result<Self> {
        self.generators.clear();
        let image = self.encode_untapered(hamiltonian)?;
        let mut gens = find_z2_symmetries(&image);
        let reference = self.register_index(self.reference_occupation())?;
        let sectors = sector_from_reference(&gens, reference)?;
        for (g, s) in gens.iter_mut().zip(sectors) {
            g.sector_eigenvalue = s;
        }
        self.generators = gens;
        Ok(self)
    }

    pub fn is_tapered(&self) -> bool {
        !self.generators.is_empty()
    }

    /// Register width after mapping and two-qubit reduction.
    pub fn register_qubits(&self) -> usize {
        self.n_modes - if self.two_qubit_reduction { 2 } else { 0 }
    }

    pub fn n_qubits(&self) -> usize {
        self.register_qubits() - self.generators.len()
    }

    /// Occupation bitmask of the determinant filling the lowest orbitals.
    pub fn reference_occupation(&self) -> u64 {
        let n = self.n_modes / 2;
        let up = (1u64 << self.n_alpha) - 1;
        let down = ((1u64 << self.n_beta) - 1) << n;
        up | down
    }

    pub fn encode_untapered(&self, op: &FermionOperator) -> Result<PauliOperator> {
        if op.n_modes() != self.n_modes {
            return Err(Error::domain(format!(
                "operator has {} modes, plan expects {}",
                op.n_modes(),
                self.n_modes
            )));
        }
        match (self.mapping, self.two_qubit_reduction) {
            (Mapping::JordanWigner, _) => Ok(jordan_wigner(op)),
            (Mapping::Parity, false) => Ok(parity(op)),
            (Mapping::Parity, true) => two_qubit_reduce(&parity(op), self.n_alpha, self.n_beta),
        }
    }

    /// Full encoding: mapping, reduction and tapering.
    pub fn encode(&self, op: &FermionOperator) -> Result<PauliOperator> {
        let image = self.encode_untapered(op)?;
        let sectors: Vec<i8> = self.generators.iter().map(|g| g.sector_eigenvalue).collect();
        taper(&image, &self.generators, &sectors)
    }

    /// Basis index on the mapped (and reduced) register, before tapering.
    pub fn register_index(&self, occupation: u64) -> Result<usize> {
        if occupation & !mode_mask(self.n_modes) != 0 {
            return Err(Error::domain("occupation has bits beyond the mode count"));
        }
        let mut bits = match self.mapping {
            Mapping::JordanWigner => occupation,
            Mapping::Parity => {
                let mut b = 0u64;
                let mut acc = 0u64;
                for j in 0..self.n_modes {
                    acc ^= occupation >> j & 1;
                    b |= acc << j;
                }
                b
            }
        };
        if self.two_qubit_reduction {
            let [qa, qt] = reduction_qubits(self.n_modes);
            let expect = [self.n_alpha % 2 == 1, (self.n_alpha + self.n_beta) % 2 == 1];
            for (q, e) in [qa, qt].into_iter().zip(expect) {
                if (bits >> q & 1 == 1) != e {
                    return Err(Error::domain(
                        "determinant lies outside the particle-number parity sector",
                    ));
                }
            }
            bits = compress_bit(bits, qt);
            bits = compress_bit(bits, qa);
        }
        Ok(bits as usize)
    }

    /// Basis index of a determinant on the final (possibly tapered) register.
    pub fn encode_determinant(&self, occupation: u64) -> Result<usize> {
        let mut index = self.register_index(occupation)?;
        if self.generators.is_empty() {
            return Ok(index);
        }
        let sectors = sector_from_reference(&self.generators, index)?;
        if sectors
            .iter()
            .zip(&self.generators)
            .any(|(s, g)| *s != g.sector_eigenvalue)
        {
            return Err(Error::domain("determinant lies outside the tapered symmetry sector"));
        }
        let mut targets: Vec<usize> = self.generators.iter().map(|g| g.target_qubit).collect();
        targets.sort_unstable();
        for &q in targets.iter().rev() {
            index = compress_bit(index as u64, q) as usize;
        }
        Ok(index)
    }

    pub fn reference_index(&self) -> Result<usize> {
        self.encode_determinant(self.reference_occupation())
    }

    /// Inverse of [`encode_determinant`](Self::encode_determinant): the
    /// occupation of a basis state and the sign it picks up through the
    /// tapering Clifford.
    pub fn decode_basis(&self, index: usize) -> (u64, f64) {
        let mut bits = index as u64;
        let mut phase = 1.0;
        if !self.generators.is_empty() {
            let mut gens = self.generators.clone();
            gens.sort_by_key(|g| g.target_qubit);
            for g in &gens {
                bits = expand_bit(bits as usize, g.target_qubit, false) as u64;
            }
            for g in &gens {
                let rest = g.pauli.z & !(1u64 << g.target_qubit);
                let t_odd = (bits & rest).count_ones() % 2 == 1;
                let s_odd = g.sector_eigenvalue < 0;
                let bit = t_odd != s_odd;
                if bit {
                    bits |= 1u64 << g.target_qubit;
                } else {
                    phase *= f64::from(g.sector_eigenvalue);
                }
            }
        }
        if self.two_qubit_reduction {
            let [qa, qt] = reduction_qubits(self.n_modes);
            bits = expand_bit(bits as usize, qa, self.n_alpha % 2 == 1) as u64;
            bits = expand_bit(bits as usize, qt, (self.n_alpha + self.n_beta) % 2 == 1) as u64;
        }
        let occupation = match self.mapping {
            Mapping::JordanWigner => bits,
            Mapping::Parity => (bits ^ (bits << 1)) & mode_mask(self.n_modes),
        };
        (occupation, phase)
    }
}

fn mode_mask(n_modes: usize) -> u64 {
    if n_modes >= 64 {
        u64::MAX
    } else {
        (1u64 << n_modes) - 1
    }
}

/// Occupation bitmask rendered with mode 0 leftmost, e.g. `"1100"`.
pub fn occupation_string(occupation: u64, n_modes: usize) -> String {
    (0..n_modes)
        .map(|p| if occupation >> p & 1 == 1 { '1' } else { '0' })
        .collect()
}
