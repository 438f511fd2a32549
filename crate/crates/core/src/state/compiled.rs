use std::collections::HashMap;

use num_complex::Complex64;
use serde::Serialize;

use super::Statevector;
use crate::ansatz::AnsatzSpec;
use crate::encoding::pauli::i_pow;
use crate::encoding::{EncodingPlan, PauliOperator, PauliString};
use crate::error::{Error, Result};

/// Largest register for the exact (untrotterized) exponential.
pub const EXACT_MAX_QUBITS: usize = 14;

/// Qubit image `i·Σ r_k P_k` of one excitation generator.
#[derive(Clone, Debug, PartialEq)]
pub struct CompiledExcitation {
    pub group: usize,
    pub weight: f64,
    pub strings: Vec<(PauliString, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompiledAnsatz {
    pub n_qubits: usize,
    pub n_parameters: usize,
    pub reference_index: usize,
    pub excitations: Vec<CompiledExcitation>,
    /// Indices of spec excitations removed because they break a tapered symmetry.
    pub dropped: Vec<usize>,
}

/// Encodes every excitation generator of `spec` through `plan`.
pub fn compile_ansatz(spec: &AnsatzSpec, plan: &EncodingPlan) -> Result<CompiledAnsatz> {
    if spec.n_modes() != plan.n_modes {
        return Err(Error::domain(format!(
            "ansatz acts on {} modes, plan on {}",
            spec.n_modes(),
            plan.n_modes
        )));
    }
    let sectors: Vec<i8> = plan.generators.iter().map(|g| g.sector_eigenvalue).collect();
    let mut excitations = Vec::with_capacity(spec.excitations.len());
    let mut dropped = Vec::new();
    for (k, e) in spec.excitations.iter().enumerate() {
        let image = plan.encode_untapered(&spec.generator(k))?;
        let breaks_symmetry = image
            .terms()
            .any(|(p, _)| plan.generators.iter().any(|g| !p.commutes_with(&g.pauli)));
        if breaks_symmetry {
            dropped.push(k);
            continue;
        }
        let image = crate::encoding::taper(&image, &plan.generators, &sectors)?;
        let mut strings = Vec::with_capacity(image.len());
        for (p, c) in image.terms() {
            if c.re.abs() > 1e-10 {
                return Err(Error::Internal(format!(
                    "generator image of excitation {k} is not anti-Hermitian"
                )));
            }
            strings.push((*p, c.im));
        }
        for (a, (p, _)) in strings.iter().enumerate() {
            for (q, _) in &strings[a + 1..] {
                if !p.commutes_with(q) {
                    return Err(Error::Internal(format!(
                        "excitation {k} has non-commuting Pauli images"
                    )));
                }
            }
        }
        excitations.push(CompiledExcitation {
            group: e.group,
            weight: e.weight,
            strings,
        });
    }
    Ok(CompiledAnsatz {
        n_qubits: plan.n_qubits(),
        n_parameters: spec.n_parameters,
        reference_index: plan.reference_index()?,
        excitations,
        dropped,
    })
}

impl CompiledAnsatz {
    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.n_parameters {
            return Err(Error::domain(format!(
                "expected {} amplitudes, got {}",
                self.n_parameters,
                theta.len()
            )));
        }
        Ok(())
    }

    pub fn reference_state(&self) -> Statevector {
        Statevector::basis(self.n_qubits, self.reference_index).expect("validated at compile time")
    }

    /// One first-order Trotter step, excitations in compile order.
    pub fn apply_trotter(&self, state: &mut Statevector, theta: &[f64]) -> Result<()> {
        self.check_theta(theta)?;
        if state.n_qubits() != self.n_qubits {
            return Err(Error::domain("state width does not match the ansatz"));
        }
        for e in &self.excitations {
            let th = theta[e.group];
            if th == 0.0 {
                continue;
            }
            for (p, r) in &e.strings {
                state.apply_pauli_exponential(p, th * r);
            }
        }
        Ok(())
    }

    /// Trotterized ansatz state on the reference.
    pub fn prepare(&self, theta: &[f64]) -> Result<Statevector> {
        let mut psi = self.reference_state();
        self.apply_trotter(&mut psi, theta)?;
        Ok(psi)
    }

    /// Qubit image of the full cluster operator `Σ θ (t − t†)`.
    pub fn cluster_image(&self, theta: &[f64]) -> Result<PauliOperator> {
        self.check_theta(theta)?;
        let mut acc: HashMap<PauliString, Complex64> = HashMap::new();
        for e in &self.excitations {
            for (p, r) in &e.strings {
                *acc.entry(*p).or_default() += Complex64::new(0.0, theta[e.group] * r);
            }
        }
        Ok(PauliOperator::from_terms(self.n_qubits, acc))
    }

    /// Untrotterized ansatz state `exp(Σ θ (t − t†)) |ref⟩`.
    pub fn prepare_exact(&self, theta: &[f64]) -> Result<Statevector> {
        let mut psi = self.reference_state();
        apply_ansatz_exact(&mut psi, &self.cluster_image(theta)?)?;
        Ok(psi)
    }
}

/// `ψ ← exp(A) ψ` for an anti-Hermitian Pauli sum `A`.
///
/// Truncated Taylor series applied to the vector with `s` substeps, where `s`
/// keeps `‖A‖₁/s ≤ 1/2`; terms are added until they fall below 1e-17.
pub fn apply_ansatz_exact(state: &mut Statevector, generator: &PauliOperator) -> Result<()> {
    if generator.n_qubits() > EXACT_MAX_QUBITS {
        return Err(Error::Capability(format!(
            "exact exponential limited to {EXACT_MAX_QUBITS} qubits, got {}",
            generator.n_qubits()
        )));
    }
    if generator.n_qubits() != state.n_qubits() {
        return Err(Error::domain("state width does not match the generator"));
    }
    if generator.terms().any(|(_, c)| c.re.abs() > 1e-10) {
        return Err(Error::domain("exact exponential requires an anti-Hermitian generator"));
    }
    let norm = generator.one_norm();
    if norm == 0.0 {
        return Ok(());
    }
    let steps = (norm / 0.5).ceil().max(1.0) as usize;
    let terms: Vec<(usize, usize, Complex64)> = generator
        .terms()
        .map(|(p, c)| (p.x as usize, p.z as usize, c * i_pow(p.y_count() as i64) / steps as f64))
        .collect();
    let apply = |v: &[Complex64], out: &mut [Complex64]| {
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
        for &(x, z, c) in &terms {
            for (k, a) in v.iter().enumerate() {
                let sign = if (k & z).count_ones() % 2 == 0 { c } else { -c };
                out[k ^ x] += sign * a;
            }
        }
    };
    let dim = state.amplitudes.len();
    let mut term = vec![Complex64::new(0.0, 0.0); dim];
    let mut next = vec![Complex64::new(0.0, 0.0); dim];
    for _ in 0..steps {
        term.copy_from_slice(&state.amplitudes);
        for k in 1..=60 {
            apply(&term, &mut next);
            let inv = 1.0 / k as f64;
            let mut size = 0.0;
            for (t, n) in term.iter_mut().zip(&next) {
                *t = n * inv;
                size += t.norm_sqr();
            }
            for (a, t) in state.amplitudes.iter_mut().zip(&term) {
                *a += t;
            }
            if size.sqrt() < 1e-17 {
                break;
            }
        }
    }
    Ok(())
}

/// Gate totals under a fixed compilation model: a weight-`k` string costs
/// `2(k−1)` CNOTs, one rotation and two basis changes per X or Y factor.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ResourceEstimate {
    pub rotations: usize,
    pub single_qubit_gates: usize,
    pub two_qubit_gates: usize,
    pub parameters: usize,
}

pub fn estimate_resources(ansatz: &CompiledAnsatz) -> ResourceEstimate {
    let mut r = ResourceEstimate {
        parameters: ansatz.n_parameters,
        ..Default::default()
    };
    for e in &ansatz.excitations {
        for (p, _) in &e.strings {
            let k = p.weight() as usize;
            if k == 0 {
                continue;
            }
            r.rotations += 1;
            r.two_qubit_gates += 2 * (k - 1);
            r.single_qubit_gates += 2 * p.x.count_ones() as usize;
        }
    }
    r
}
