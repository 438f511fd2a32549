//! Statevector simulation kernels.
//!
//! Amplitude `k` belongs to the basis state whose bit `q` is the value of
//! qubit `q` (qubit 0 least significant).

mod compiled;
mod observable;

use std::io::Write;

use num_complex::Complex64;

pub use compiled::{
    apply_ansatz_exact, compile_ansatz, estimate_resources, CompiledAnsatz, CompiledExcitation, ResourceEstimate,
    EXACT_MAX_QUBITS,
};
pub use observable::{expectation, Observable};

use crate::encoding::pauli::i_pow;
use crate::encoding::{occupation_string, EncodingPlan, PauliString};
use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 26;

#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl Statevector {
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::Capability(format!(
                "statevectors are limited to {MAX_QUBITS} qubits, got {n_qubits}"
            )));
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::domain(format!("basis index {index} outside 2^{n_qubits}")));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Statevector { n_qubits, amplitudes })
    }

    /// Wraps raw amplitudes, normalizing them.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if !dim.is_power_of_two() {
            return Err(Error::domain("amplitude count must be a power of two"));
        }
        let mut s = Statevector {
            n_qubits: dim.trailing_zeros() as usize,
            amplitudes,
        };
        let norm = s.norm();
        if norm == 0.0 {
            return Err(Error::domain("zero vector cannot be normalized"));
        }
        s.amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &Statevector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `ψ ← exp(i·angle·P) ψ = cos(angle) ψ + i sin(angle) P ψ`.
    pub fn apply_pauli_exponential(&mut self, p: &PauliString, angle: f64) {
        let (s, c) = angle.sin_cos();
        let amps = &mut self.amplitudes;
        let x = p.x as usize;
        if x == 0 {
            // diagonal: phase e^{±i angle}
            let plus = Complex64::new(c, s);
            let minus = Complex64::new(c, -s);
            let z = p.z as usize;
            for (k, a) in amps.iter_mut().enumerate() {
                *a *= if (k & z).count_ones().is_multiple_of(2) {
                    plus
                } else {
                    minus
                };
            }
            return;
        }
        let pivot = 1usize << (63 - (x as u64).leading_zeros());
        let z = p.z as usize;
        // P|k⟩ = i^{ny} (−1)^{|k&z|} |k⊕x⟩
        let base = i_pow(p.y_count() as i64) * Complex64::new(0.0, s);
        for k in 0..amps.len() {
            if k & pivot != 0 {
                continue;
            }
            let l = k ^ x;
            let ph_k = if (k & z).count_ones() & 1 == 0 { base } else { -base };
            let ph_l = if (l & z).count_ones() & 1 == 0 { base } else { -base };
            let ak = amps[k];
            let al = amps[l];
            amps[k] = ak * c + ph_l * al;
            amps[l] = al * c + ph_k * ak;
        }
    }

    /// `ψ ← P ψ`.
    pub fn apply_pauli(&mut self, p: &PauliString) {
        let mut out = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for (k, a) in self.amplitudes.iter().enumerate() {
            let (l, ph) = p.apply_to_basis(k);
            out[l] = ph * a;
        }
        self.amplitudes = out;
    }

    /// Little-endian `(re, im)` f64 pairs.
    pub fn write_binary(&self, mut w: impl Write) -> std::io::Result<()> {
        for a in &self.amplitudes {
            w.write_all(&a.re.to_le_bytes())?;
            w.write_all(&a.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary(bytes: &[u8]) -> Result<Self> {
        if !bytes.len().is_multiple_of(16) {
            return Err(Error::domain("binary statevector length must be a multiple of 16"));
        }
        let amps = bytes
            .chunks_exact(16)
            .map(|ch| {
                let re = f64::from_le_bytes(ch[..8].try_into().unwrap());
                let im = f64::from_le_bytes(ch[8..].try_into().unwrap());
                Complex64::new(re, im)
            })
            .collect();
        Self::from_amplitudes(amps)
    }
}

/// Reference determinant on the plan's register.
pub fn prepare_reference(plan: &EncodingPlan) -> Result<Statevector> {
    Statevector::basis(plan.n_qubits(), plan.reference_index()?)
}

/// A determinant's amplitude in a state.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigurationWeight {
    pub occupation: String,
    pub amplitude: Complex64,
}

impl ConfigurationWeight {
    pub fn weight(&self) -> f64 {
        self.amplitude.norm_sqr()
    }
}

/// Decodes amplitudes to fermionic occupations, largest magnitude first.
pub fn configuration_weights(state: &Statevector, plan: &EncodingPlan) -> Vec<ConfigurationWeight> {
    const CUTOFF: f64 = 1e-14;
    let mut out: Vec<ConfigurationWeight> = state
        .amplitudes
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > CUTOFF)
        .map(|(k, a)| {
            let (occ, phase) = plan.decode_basis(k);
            ConfigurationWeight {
                occupation: occupation_string(occ, plan.n_modes),
                amplitude: a * phase,
            }
        })
        .collect();
    out.sort_by(|a, b| {
        b.amplitude
            .norm()
            .total_cmp(&a.amplitude.norm())
            .then_with(|| a.occupation.cmp(&b.occupation))
    });
    out
}

/// CSV with columns `occupation,re,im,weight`.
pub fn weights_csv(weights: &[ConfigurationWeight]) -> String {
    let mut s = String::from("occupation,re,im,weight\n");
    for w in weights {
        s.push_str(&format!(
            "{},{:e},{:e},{:e}\n",
            w.occupation,
            w.amplitude.re,
            w.amplitude.im,
            w.weight()
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{Pauli, PauliOperator};

    fn random_state(n: usize, seed: u64) -> Statevector {
        // small LCG keeps the unit tests dependency-free
        let mut x = seed;
        let mut next = || {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let amps = (0..1 << n).map(|_| Complex64::new(next(), next())).collect();
        Statevector::from_amplitudes(amps).unwrap()
    }

    #[test]
    fn exponential_matches_dense() {
        let p = PauliString::from_ops(&[(0, Pauli::X), (1, Pauli::Y), (2, Pauli::Z)]);
        let angle: f64 = 0.37;
        let mut psi = random_state(3, 7);
        let dense = PauliOperator::from_terms(3, [(p, Complex64::new(1.0, 0.0))])
            .to_dense()
            .unwrap();
        let v = nalgebra::DVector::from_vec(psi.amplitudes.clone());
        let expect = &v * Complex64::new(angle.cos(), 0.0) + (&dense * &v) * Complex64::new(0.0, angle.sin());
        psi.apply_pauli_exponential(&p, angle);
        for (a, b) in psi.amplitudes.iter().zip(expect.iter()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn z_on_zero_is_a_phase() {
        let mut psi = Statevector::basis(1, 0).unwrap();
        psi.apply_pauli_exponential(&PauliString::single(0, Pauli::Z), std::f64::consts::FRAC_PI_2);
        assert!((psi.amplitudes[0] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((psi.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn forward_then_backward_is_identity() {
        let p = PauliString::from_label("YXZY").unwrap();
        let psi = random_state(4, 3);
        let mut phi = psi.clone();
        phi.apply_pauli_exponential(&p, 0.81);
        phi.apply_pauli_exponential(&p, -0.81);
        assert!((phi.inner(&psi).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn binary_dump_round_trip() {
        let psi = random_state(2, 11);
        let mut buf = Vec::new();
        psi.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 64);
        let back = Statevector::read_binary(&buf).unwrap();
        assert!((back.inner(&psi).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reference_weights() {
        let plan = EncodingPlan::jordan_wigner(4, 1, 1);
        let psi = prepare_reference(&plan).unwrap();
        let w = configuration_weights(&psi, &plan);
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].occupation, "1010");
        assert_eq!(w[0].weight(), 1.0);
    }
}
