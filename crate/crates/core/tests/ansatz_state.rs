mod common;

use common::fixture;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use qucc::ansatz::{build_ansatz, ActiveSpace, AnsatzKind, AnsatzSpec};
use qucc::encoding::{EncodingPlan, Mapping};
use qucc::exact::exact_ground;
use qucc::fermion::{number_operator, Spin};
use qucc::hamiltonian::{build_hamiltonian, build_hubbard, HubbardSpec, KappaMatrix};
use qucc::state::{compile_ansatz, configuration_weights, expectation};
use qucc::vqe::{ansatz_energy, Evolution, OoObjective};

const KINDS: [AnsatzKind; 4] = [
    AnsatzKind::Uccsd,
    AnsatzKind::Puccd,
    AnsatzKind::Uccd0,
    AnsatzKind::Uccd0Full,
];

fn spec(kind: AnsatzKind, n_orbitals: usize, n_occ: usize) -> AnsatzSpec {
    build_ansatz(kind, &ActiveSpace::new(n_orbitals, n_occ).unwrap(), false).unwrap()
}

fn theta_for(spec: &AnsatzSpec, raw: &[f64]) -> Vec<f64> {
    (0..spec.n_parameters).map(|k| raw[k % raw.len()]).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn cluster_operators_are_antihermitian_with_unitary_exponential(raw in prop::collection::vec(-1.0..1.0f64, 1..16)) {
        for kind in KINDS {
            let s = spec(kind, 4, 2);
            let m = s.cluster_operator(&theta_for(&s, &raw)).unwrap().to_dense().unwrap();
            prop_assert!((&m + m.adjoint()).iter().all(|z| z.norm() < 1e-12));
            let u = m.exp();
            let eye = DMatrix::<Complex64>::identity(u.nrows(), u.ncols());
            prop_assert!((u.adjoint() * &u - eye).iter().all(|z| z.norm() < 1e-10));
        }
    }

    #[test]
    fn exact_preparation_matches_dense_exponential(raw in prop::collection::vec(-1.0..1.0f64, 1..16)) {
        let plan = EncodingPlan::jordan_wigner(8, 2, 2);
        for kind in KINDS {
            let s = spec(kind, 4, 2);
            let theta = theta_for(&s, &raw);
            let u = s.cluster_operator(&theta).unwrap().to_dense().unwrap().exp();
            let mut reference = DVector::<Complex64>::zeros(256);
            reference[plan.reference_index().unwrap()] = Complex64::new(1.0, 0.0);
            let want = u * reference;
            let got = compile_ansatz(&s, &plan).unwrap().prepare_exact(&theta).unwrap();
            prop_assert!(got.amplitudes().iter().zip(want.iter()).all(|(a, b)| (a - b).norm() < 1e-10));
        }
    }

    #[test]
    fn trotter_states_keep_norm_and_particle_numbers(raw in prop::collection::vec(-3.0..3.0f64, 1..16)) {
        for plan in [
            EncodingPlan::jordan_wigner(8, 2, 2),
            EncodingPlan::new(Mapping::Parity, true, 8, 2, 2).unwrap(),
        ] {
            let n_up = plan.encode(&number_operator(Spin::Up, 4)).unwrap();
            let n_down = plan.encode(&number_operator(Spin::Down, 4)).unwrap();
            for kind in KINDS {
                let a = compile_ansatz(&spec(kind, 4, 2), &plan).unwrap();
                let state = a.prepare(&theta_for(&spec(kind, 4, 2), &raw)).unwrap();
                prop_assert!((state.norm() - 1.0).abs() < 1e-10);
                prop_assert!((expectation(&state, &n_up).unwrap() - 2.0).abs() < 1e-10);
                prop_assert!((expectation(&state, &n_down).unwrap() - 2.0).abs() < 1e-10);
                let w: f64 = configuration_weights(&state, &plan).iter().map(|c| c.weight()).sum();
                prop_assert!((w - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn inactive_rotations_leave_the_reference_energy(occ in -1.0..1.0f64, virt in -1.0..1.0f64) {
        let ints = fixture("h4_sto3g_beta94.fcidump");
        let plan = EncodingPlan::new(Mapping::Parity, true, 8, 2, 2).unwrap();
        let s = spec(AnsatzKind::Puccd, 4, 2);
        let a = compile_ansatz(&s, &plan).unwrap();
        let mut oo = OoObjective::new(&ints, &a, &plan, Evolution::Trotter).unwrap();
        let theta = vec![0.0; a.n_parameters];
        let base = oo.energy(&theta, &[0.0; 6]).unwrap();
        let mut k = DMatrix::zeros(4, 4);
        k[(0, 1)] = occ;
        k[(1, 0)] = -occ;
        k[(2, 3)] = virt;
        k[(3, 2)] = -virt;
        let params = KappaMatrix::from_matrix(k).unwrap().parameters();
        prop_assert!((oo.energy(&theta, &params).unwrap() - base).abs() < 1e-10);
    }
}

#[test]
fn uncorrelated_hubbard_reference_is_exact() {
    let ints = build_hubbard(&HubbardSpec {
        n_sites: 6,
        t: -1.0,
        u: 0.0,
        periodic: true,
        filling: (3, 3),
    })
    .unwrap();
    let exact = exact_ground(&ints).unwrap().energy;
    let plan = EncodingPlan::new(Mapping::Parity, true, 12, 3, 3).unwrap();
    let h = plan.encode(&build_hamiltonian(&ints)).unwrap();
    for kind in KINDS {
        let a = compile_ansatz(&spec(kind, 6, 3), &plan).unwrap();
        let e = ansatz_energy(&h, &a, &vec![0.0; a.n_parameters], Evolution::Trotter).unwrap();
        assert!((e - exact).abs() < 1e-9, "{}", kind.name());
    }
}
