//! VQE and orbital-optimized VQE drivers.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::encoding::{EncodingPlan, PauliOperator, PauliString};
use crate::error::{Error, Result};
use crate::fermion::{FermionOperator, Ladder};
use crate::hamiltonian::{physicist_images, KappaMatrix, MolecularIntegrals};
use crate::optimize::{minimize, OptimizerConfig};
use crate::state::{CompiledAnsatz, Observable, Statevector};

/// Starting value of every cluster amplitude.
pub const THETA_START: f64 = 0.1;
/// Starting value of every orbital-rotation parameter.
pub const KAPPA_START: f64 = 1e-3;

/// How the ansatz unitary is realized on the statevector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Evolution {
    /// One first-order Trotter step in compile order.
    Trotter,
    /// Exact exponential of the full cluster operator.
    Exact,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceEntry {
    pub energy: f64,
    pub theta: Vec<f64>,
    pub kappa: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct VqeResult {
    pub energy: f64,
    pub theta: Vec<f64>,
    pub kappa: Vec<f64>,
    pub n_energy_evaluations: usize,
    pub n_iterations: usize,
    pub converged: bool,
    pub trace: Vec<TraceEntry>,
}

impl VqeResult {
    /// CSV with columns `iteration,energy,theta_0..,kappa_0..`.
    pub fn trace_csv(&self) -> String {
        let mut s = String::from("iteration,energy");
        for k in 0..self.theta.len() {
            let _ = write!(s, ",theta_{k}");
        }
        for k in 0..self.kappa.len() {
            let _ = write!(s, ",kappa_{k}");
        }
        s.push('\n');
        for (it, e) in self.trace.iter().enumerate() {
            let _ = write!(s, "{it},{:.12}", e.energy);
            for v in e.theta.iter().chain(&e.kappa) {
                let _ = write!(s, ",{v:.10e}");
            }
            s.push('\n');
        }
        s
    }
}

/// Transparent wrapper counting calls to an objective.
pub struct CountingObjective<F> {
    f: F,
    count: usize,
}

impl<F: FnMut(&[f64]) -> Result<f64>> CountingObjective<F> {
    pub fn new(f: F) -> Self {
        CountingObjective { f, count: 0 }
    }

    pub fn call(&mut self, x: &[f64]) -> Result<f64> {
        self.count += 1;
        (self.f)(x)
    }

    pub fn count(&self) -> usize {
        self.count
    }
}

fn prepare(ansatz: &CompiledAnsatz, theta: &[f64], evolution: Evolution) -> Result<Statevector> {
    match evolution {
        Evolution::Trotter => ansatz.prepare(theta),
        Evolution::Exact => ansatz.prepare_exact(theta),
    }
}

/// `E(θ) = ⟨ref| U(θ)† H U(θ) |ref⟩`.
pub fn ansatz_energy(
    hamiltonian: &PauliOperator,
    ansatz: &CompiledAnsatz,
    theta: &[f64],
    evolution: Evolution,
) -> Result<f64> {
    Observable::new(hamiltonian)?.expectation(&prepare(ansatz, theta, evolution)?)
}

/// Minimizes the ansatz energy from `θ = 0.1`.
pub fn vqe_minimize(
    hamiltonian: &PauliOperator,
    ansatz: &CompiledAnsatz,
    config: &OptimizerConfig,
) -> Result<VqeResult> {
    vqe_minimize_with(hamiltonian, ansatz, config, Evolution::Trotter, None)
}

/// [`vqe_minimize`] with a choice of evolution and optional starting point.
pub fn vqe_minimize_with(
    hamiltonian: &PauliOperator,
    ansatz: &CompiledAnsatz,
    config: &OptimizerConfig,
    evolution: Evolution,
    start: Option<&[f64]>,
) -> Result<VqeResult> {
    if hamiltonian.n_qubits() != ansatz.n_qubits {
        return Err(Error::domain(format!(
            "Hamiltonian has {} qubits, ansatz {}",
            hamiltonian.n_qubits(),
            ansatz.n_qubits
        )));
    }
    let obs = Observable::new(hamiltonian)?;
    let x0 = match start {
        Some(s) => s.to_vec(),
        None => vec![THETA_START; ansatz.n_parameters],
    };
    let mut counter = CountingObjective::new(|theta: &[f64]| obs.expectation(&prepare(ansatz, theta, evolution)?));
    let mut f = |x: &[f64]| counter.call(x);
    let r = minimize(&mut f, &x0, config)?;
    debug_assert_eq!(r.n_evaluations, counter.count());
    Ok(VqeResult {
        energy: r.value,
        theta: r.x,
        kappa: Vec::new(),
        n_energy_evaluations: counter.count(),
        n_iterations: r.n_iterations,
        converged: r.converged,
        trace: r
            .trace
            .into_iter()
            .map(|t| TraceEntry {
                energy: t.value,
                theta: t.x,
                kappa: Vec::new(),
            })
            .collect(),
    })
}

/// Which integral a template slot multiplies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    Offset,
    OneBody(usize, usize),
    TwoBody(usize, usize, usize, usize),
}

/// Qubit Hamiltonian as a linear function of the integrals.
///
/// Each symmetry class of integrals (offset, `h_rs = h_sr`, the eightfold
/// `⟨rs|tu⟩` images) is encoded once as a Hermitian operator; the qubit
/// coefficients for any real symmetric integral set are then a sparse linear
/// combination.
pub struct HamiltonianTemplate {
    n_orbitals: usize,
    n_qubits: usize,
    strings: Vec<PauliString>,
    slots: Vec<(Slot, Vec<(usize, f64)>)>,
}

impl HamiltonianTemplate {
    pub fn new(n_orbitals: usize, plan: &EncodingPlan) -> Result<Self> {
        if plan.is_tapered() {
            return Err(Error::domain(
                "orbital rotation changes the Z2 symmetries; tapered plans are not supported",
            ));
        }
        if plan.n_modes != 2 * n_orbitals {
            return Err(Error::domain("plan does not match the orbital count"));
        }
        let n = n_orbitals;
        let modes = 2 * n;
        let mut index: HashMap<PauliString, usize> = HashMap::new();
        let mut strings = Vec::new();
        let mut slots = Vec::new();
        let mut push_slot = |slot: Slot, op: FermionOperator| -> Result<()> {
            let image = plan.encode(&op.simplify())?;
            let mut entries = Vec::with_capacity(image.len());
            for (p, c) in image.terms() {
                if c.im.abs() > 1e-10 {
                    return Err(Error::Internal(format!("template slot {slot:?} is not Hermitian")));
                }
                if c.re.abs() < crate::COEFF_EPS {
                    continue;
                }
                let k = *index.entry(*p).or_insert_with(|| {
                    strings.push(*p);
                    strings.len() - 1
                });
                entries.push((k, c.re));
            }
            slots.push((slot, entries));
            Ok(())
        };
        let one = Complex64::new(1.0, 0.0);
        push_slot(Slot::Offset, FermionOperator::identity(modes))?;
        for r in 0..n {
            for s in r..n {
                let mut op = FermionOperator::zero(modes);
                let pairs: &[(usize, usize)] = if r == s { &[(r, s)] } else { &[(r, s), (s, r)] };
                for &(a, b) in pairs {
                    for spin in 0..2 {
                        op.add_term(
                            vec![Ladder::create(a + spin * n), Ladder::annihilate(b + spin * n)],
                            one,
                        )?;
                    }
                }
                push_slot(Slot::OneBody(r, s), op)?;
            }
        }
        for r in 0..n {
            for s in 0..n {
                for t in 0..n {
                    for u in 0..n {
                        let mut images = physicist_images(r, s, t, u).to_vec();
                        images.sort_unstable();
                        images.dedup();
                        if images[0] != (r, s, t, u) {
                            continue;
                        }
                        let mut op = FermionOperator::zero(modes);
                        for &(a, b, c, d) in &images {
                            for sigma in 0..2 {
                                for tau in 0..2 {
                                    op.add_term(
                                        vec![
                                            Ladder::create(a + sigma * n),
                                            Ladder::create(b + tau * n),
                                            Ladder::annihilate(d + tau * n),
                                            Ladder::annihilate(c + sigma * n),
                                        ],
                                        Complex64::new(0.5, 0.0),
                                    )?;
                                }
                            }
                        }
                        push_slot(Slot::TwoBody(r, s, t, u), op)?;
                    }
                }
            }
        }
        Ok(HamiltonianTemplate {
            n_orbitals,
            n_qubits: plan.n_qubits(),
            strings,
            slots,
        })
    }

    pub fn strings(&self) -> &[PauliString] {
        &self.strings
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Qubit coefficients aligned with [`strings`](Self::strings).
    ///
    /// Assumes `h` symmetric and `g` eightfold symmetric, as every builder
    /// and rotation in this crate guarantees.
    pub fn coefficients(&self, ints: &MolecularIntegrals) -> Result<Vec<f64>> {
        if ints.n_orbitals != self.n_orbitals {
            return Err(Error::domain("integrals do not match the template"));
        }
        let mut acc = vec![0.0; self.strings.len()];
        for (slot, entries) in &self.slots {
            let v = match *slot {
                Slot::Offset => ints.e_offset,
                Slot::OneBody(r, s) => ints.h[(r, s)],
                Slot::TwoBody(r, s, t, u) => ints.g(r, s, t, u),
            };
            if v != 0.0 {
                for &(k, c) in entries {
                    acc[k] += c * v;
                }
            }
        }
        Ok(acc)
    }

    pub fn operator(&self, ints: &MolecularIntegrals) -> Result<PauliOperator> {
        let coeffs = self.coefficients(ints)?;
        Ok(PauliOperator::from_terms(
            self.n_qubits,
            self.strings
                .iter()
                .zip(coeffs)
                .map(|(p, c)| (*p, Complex64::new(c, 0.0))),
        ))
    }
}

/// Joint `(θ, κ)` energy for orbital-optimized VQE.
pub struct OoObjective<'a> {
    ints: &'a MolecularIntegrals,
    ansatz: &'a CompiledAnsatz,
    template: HamiltonianTemplate,
    evaluator: Observable,
    evolution: Evolution,
    cache: Option<(Vec<f64>, Vec<f64>)>,
}

impl<'a> OoObjective<'a> {
    pub fn new(
        ints: &'a MolecularIntegrals,
        ansatz: &'a CompiledAnsatz,
        plan: &EncodingPlan,
        evolution: Evolution,
    ) -> Result<Self> {
        let template = HamiltonianTemplate::new(ints.n_orbitals, plan)?;
        if template.n_qubits() != ansatz.n_qubits {
            return Err(Error::domain("ansatz and plan disagree on the register width"));
        }
        let evaluator = Observable::from_parts(
            template.n_qubits(),
            template.strings().to_vec(),
            vec![0.0; template.strings().len()],
        );
        Ok(OoObjective {
            ints,
            ansatz,
            template,
            evaluator,
            evolution,
            cache: None,
        })
    }

    pub fn n_kappa(&self) -> usize {
        KappaMatrix::n_parameters(self.ints.n_orbitals)
    }

    /// Energy with `θ` amplitudes and κ upper-triangle parameters.
    pub fn energy(&mut self, theta: &[f64], kappa: &[f64]) -> Result<f64> {
        let k = KappaMatrix::from_parameters(self.ints.n_orbitals, kappa)?;
        let rotated = self.ints.rotate(&k)?;
        let coeffs = self.template.coefficients(&rotated)?;
        let stale = !matches!(&self.cache, Some((t, _)) if t.as_slice() == theta);
        if stale {
            let psi = prepare(self.ansatz, theta, self.evolution)?;
            let values = self.evaluator.string_expectations(&psi);
            self.cache = Some((theta.to_vec(), values));
        }
        let (_, values) = self.cache.as_ref().unwrap();
        Ok(coeffs.iter().zip(values).map(|(c, v)| c * v).sum())
    }
}

/// Orbital-optimized VQE: `θ` starts at 0.1 and κ at 1e-3.
pub fn oo_vqe_minimize(
    ints: &MolecularIntegrals,
    ansatz: &CompiledAnsatz,
    plan: &EncodingPlan,
    config: &OptimizerConfig,
) -> Result<VqeResult> {
    let mut objective = OoObjective::new(ints, ansatz, plan, Evolution::Trotter)?;
    let n_theta = ansatz.n_parameters;
    let n_kappa = objective.n_kappa();
    let mut x0 = vec![THETA_START; n_theta];
    x0.extend(std::iter::repeat_n(KAPPA_START, n_kappa));
    let mut counter = CountingObjective::new(|x: &[f64]| objective.energy(&x[..n_theta], &x[n_theta..]));
    let mut f = |x: &[f64]| counter.call(x);
    let r = minimize(&mut f, &x0, config)?;
    let split = |x: &[f64]| (x[..n_theta].to_vec(), x[n_theta..].to_vec());
    let (theta, kappa) = split(&r.x);
    Ok(VqeResult {
        energy: r.value,
        theta,
        kappa,
        n_energy_evaluations: counter.count(),
        n_iterations: r.n_iterations,
        converged: r.converged,
        trace: r
            .trace
            .iter()
            .map(|t| {
                let (theta, kappa) = split(&t.x);
                TraceEntry {
                    energy: t.value,
                    theta,
                    kappa,
                }
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{puccd_excitations, uccsd_excitations, ActiveSpace};
    use crate::encoding::Mapping;
    use crate::hamiltonian::{build_hamiltonian, build_hubbard, HubbardSpec};
    use crate::state::compile_ansatz;

    fn hubbard2(u: f64) -> MolecularIntegrals {
        build_hubbard(&HubbardSpec {
            n_sites: 2,
            t: 1.0,
            u,
            periodic: false,
            filling: (1, 1),
        })
        .unwrap()
    }

    #[test]
    fn counter_is_transparent() {
        let mut c = CountingObjective::new(|x: &[f64]| Ok(x[0] * 2.0));
        assert_eq!(c.call(&[1.5]).unwrap(), 3.0);
        c.call(&[0.0]).unwrap();
        c.call(&[0.0]).unwrap();
        assert_eq!(c.count(), 3);
    }

    #[test]
    fn template_matches_direct_encoding() {
        let ints = hubbard2(3.0);
        let plan = EncodingPlan::new(Mapping::Parity, true, 4, 1, 1).unwrap();
        let template = HamiltonianTemplate::new(2, &plan).unwrap();
        let direct = plan.encode(&build_hamiltonian(&ints)).unwrap();
        let via = template.operator(&ints).unwrap();
        assert!(direct.max_difference(&via).unwrap() < 1e-12);
    }

    #[test]
    fn two_site_uccsd_is_exact() {
        let ints = hubbard2(4.0);
        let plan = EncodingPlan::jordan_wigner(4, 1, 1);
        let h = plan.encode(&build_hamiltonian(&ints)).unwrap();
        let spec = uccsd_excitations(&ActiveSpace::new(2, 1).unwrap());
        let ansatz = compile_ansatz(&spec, &plan).unwrap();
        let r = vqe_minimize(&h, &ansatz, &OptimizerConfig::default()).unwrap();
        let exact = 2.0 - 8f64.sqrt();
        assert!((r.energy - exact).abs() < 1e-6, "{} vs {exact}", r.energy);
        assert!(r.converged);
        let fresh = ansatz_energy(&h, &ansatz, &r.theta, Evolution::Trotter).unwrap();
        assert!((fresh - r.energy).abs() < 1e-10);
        assert_eq!(r.trace.len(), r.n_iterations + 1);
    }

    #[test]
    fn oo_objective_at_zero_kappa_matches_plain_energy() {
        let ints = hubbard2(2.0);
        let plan = EncodingPlan::jordan_wigner(4, 1, 1);
        let h = plan.encode(&build_hamiltonian(&ints)).unwrap();
        let spec = puccd_excitations(&ActiveSpace::new(2, 1).unwrap(), false);
        let ansatz = compile_ansatz(&spec, &plan).unwrap();
        let mut oo = OoObjective::new(&ints, &ansatz, &plan, Evolution::Trotter).unwrap();
        let a = oo.energy(&[0.23], &[0.0]).unwrap();
        let b = ansatz_energy(&h, &ansatz, &[0.23], Evolution::Trotter).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn tapered_plans_are_rejected_for_orbital_optimization() {
        let ints = hubbard2(2.0);
        let plan = EncodingPlan::jordan_wigner(4, 1, 1)
            .with_tapering(&build_hamiltonian(&ints))
            .unwrap();
        assert!(plan.is_tapered());
        assert!(HamiltonianTemplate::new(2, &plan).is_err());
    }
}
