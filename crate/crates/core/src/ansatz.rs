//! Excitation lists and parameter sharing for the UCC ansatz family.
//!
//! Spin orbitals use block order (`spin_orbital`): spatial `p` spin up is mode
//! `p`, spin down is `p + n_orbitals`. All ansatze share spatial amplitudes
//! between the two spins.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::{spin_orbital, FermionOperator, Ladder, Spin};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnsatzKind {
    Uccsd,
    Puccd,
    Uccd0,
    Uccd0Full,
    /// Hand-built excitation lists.
    Custom,
}

impl AnsatzKind {
    pub fn name(self) -> &'static str {
        match self {
            AnsatzKind::Uccsd => "uccsd",
            AnsatzKind::Puccd => "puccd",
            AnsatzKind::Uccd0 => "uccd0",
            AnsatzKind::Uccd0Full => "uccd0_full",
            AnsatzKind::Custom => "custom",
        }
    }
}

impl FromStr for AnsatzKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uccsd" => Ok(AnsatzKind::Uccsd),
            "puccd" => Ok(AnsatzKind::Puccd),
            "uccd0" => Ok(AnsatzKind::Uccd0),
            "uccd0_full" => Ok(AnsatzKind::Uccd0Full),
            other => Err(Error::Config(format!("unknown ansatz {other:?}"))),
        }
    }
}

/// Closed-shell active space: orbitals `0..n_occ` doubly occupied.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ActiveSpace {
    pub n_orbitals: usize,
    pub n_occ: usize,
}

impl ActiveSpace {
    pub fn new(n_orbitals: usize, n_occ: usize) -> Result<Self> {
        if n_occ == 0 || n_occ >= n_orbitals {
            return Err(Error::domain(format!(
                "active space needs 0 < n_occ < n_orbitals, got {n_occ} of {n_orbitals}"
            )));
        }
        Ok(ActiveSpace { n_orbitals, n_occ })
    }

    pub fn n_virt(&self) -> usize {
        self.n_orbitals - self.n_occ
    }

    fn occupied(&self) -> std::ops::Range<usize> {
        0..self.n_occ
    }

    fn virtuals(&self) -> std::ops::Range<usize> {
        self.n_occ..self.n_orbitals
    }

    fn up(&self, p: usize) -> usize {
        spin_orbital(p, Spin::Up, self.n_orbitals)
    }

    fn down(&self, p: usize) -> usize {
        spin_orbital(p, Spin::Down, self.n_orbitals)
    }
}

/// One excitation `t`; its generator is `weight·θ_group·(t − t†)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Excitation {
    pub ops: Vec<Ladder>,
    pub group: usize,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzSpec {
    pub kind: AnsatzKind,
    pub include_singles: bool,
    pub n_orbitals: usize,
    pub n_parameters: usize,
    pub excitations: Vec<Excitation>,
}

/// Assigns group ids in order of first appearance.
struct Builder {
    groups: BTreeMap<Vec<usize>, usize>,
    excitations: Vec<Excitation>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            groups: BTreeMap::new(),
            excitations: Vec::new(),
        }
    }

    fn push(&mut self, key: Vec<usize>, ops: Vec<Ladder>, weight: f64) {
        let next = self.groups.len();
        let group = *self.groups.entry(key).or_insert(next);
        self.excitations.push(Excitation { ops, group, weight });
    }

    fn finish(self, kind: AnsatzKind, include_singles: bool, n_orbitals: usize) -> AnsatzSpec {
        AnsatzSpec {
            kind,
            include_singles,
            n_orbitals,
            n_parameters: self.groups.len(),
            excitations: self.excitations,
        }
    }
}

fn c(m: usize) -> Ladder {
    Ladder::create(m)
}

fn a(m: usize) -> Ladder {
    Ladder::annihilate(m)
}

fn push_singles(b: &mut Builder, s: &ActiveSpace) {
    for i in s.occupied() {
        for m in s.virtuals() {
            for (to, from) in [(s.up(m), s.up(i)), (s.down(m), s.down(i))] {
                b.push(vec![0, i, m], vec![c(to), a(from)], 1.0);
            }
        }
    }
}

/// Singles plus mixed-spin and same-spin doubles.
pub fn uccsd_excitations(space: &ActiveSpace) -> AnsatzSpec {
    let s = space;
    let mut b = Builder::new();
    push_singles(&mut b, s);
    let pairs: Vec<(usize, usize)> = s.virtuals().flat_map(|m| s.occupied().map(move |i| (m, i))).collect();
    for &(m, i) in &pairs {
        for &(n, j) in &pairs {
            let key = if (m, i) <= (n, j) {
                vec![1, m, i, n, j]
            } else {
                vec![1, n, j, m, i]
            };
            b.push(key, vec![c(s.up(m)), c(s.down(n)), a(s.up(i)), a(s.down(j))], 1.0);
        }
    }
    for m in s.virtuals() {
        for n in m + 1..s.n_orbitals {
            for i in s.occupied() {
                for j in i + 1..s.n_occ {
                    for spin in [Spin::Up, Spin::Down] {
                        let so = |p| spin_orbital(p, spin, s.n_orbitals);
                        b.push(vec![2, m, n, i, j], vec![c(so(m)), c(so(n)), a(so(i)), a(so(j))], 1.0);
                    }
                }
            }
        }
    }
    b.finish(AnsatzKind::Uccsd, true, s.n_orbitals)
}

/// Pair doubles `a†_{m↑}a†_{m↓}a_{i↑}a_{i↓}`, optionally preceded by singles.
pub fn puccd_excitations(space: &ActiveSpace, include_singles: bool) -> AnsatzSpec {
    let s = space;
    let mut b = Builder::new();
    if include_singles {
        push_singles(&mut b, s);
    }
    for i in s.occupied() {
        for m in s.virtuals() {
            b.push(
                vec![1, i, m],
                vec![c(s.up(m)), c(s.down(m)), a(s.up(i)), a(s.down(i))],
                1.0,
            );
        }
    }
    b.finish(AnsatzKind::Puccd, include_singles, s.n_orbitals)
}

/// Singlet doubles, one parameter per unordered `{m,n}`, `{i,j}` pair.
///
/// With `full == false` each group contributes the representative
/// `a†_{m↑}a†_{n↓}a_{j↑}a_{i↓}`; otherwise every distinct product in
/// `(a†_{m↓}a†_{n↑} + a†_{n↓}a†_{m↑})(a_{j↑}a_{i↓} + a_{i↑}a_{j↓})`.
pub fn uccd0_excitations(space: &ActiveSpace, full: bool) -> AnsatzSpec {
    let s = space;
    let mut b = Builder::new();
    for i in s.occupied() {
        for j in i..s.n_occ {
            for m in s.virtuals() {
                for n in m..s.n_orbitals {
                    let key = vec![i, j, m, n];
                    if !full {
                        b.push(key, vec![c(s.up(m)), c(s.down(n)), a(s.up(j)), a(s.down(i))], 1.0);
                        continue;
                    }
                    let mut seen: Vec<Vec<Ladder>> = Vec::new();
                    for (p, q) in [(m, n), (n, m)] {
                        for (k, l) in [(j, i), (i, j)] {
                            let ops = vec![c(s.down(p)), c(s.up(q)), a(s.up(k)), a(s.down(l))];
                            if !seen.contains(&ops) {
                                seen.push(ops.clone());
                                b.push(key.clone(), ops, 1.0);
                            }
                        }
                    }
                }
            }
        }
    }
    let kind = if full { AnsatzKind::Uccd0Full } else { AnsatzKind::Uccd0 };
    b.finish(kind, false, s.n_orbitals)
}

/// Builds the spec for `kind`; `include_singles` only affects pUCCD.
pub fn build_ansatz(kind: AnsatzKind, space: &ActiveSpace, include_singles: bool) -> Result<AnsatzSpec> {
    match kind {
        AnsatzKind::Uccsd => Ok(uccsd_excitations(space)),
        AnsatzKind::Puccd => Ok(puccd_excitations(space, include_singles)),
        AnsatzKind::Uccd0 => Ok(uccd0_excitations(space, false)),
        AnsatzKind::Uccd0Full => Ok(uccd0_excitations(space, true)),
        AnsatzKind::Custom => Err(Error::domain("custom ansatze are built with AnsatzSpec::custom")),
    }
}

/// Same-spin (triplet) doubles, `a†_{mσ}a†_{nσ}a_{jσ}a_{iσ}` with `m<n`, `i<j`,
/// both spins sharing one parameter. Provided for completeness only.
pub fn triplet_doubles(space: &ActiveSpace) -> AnsatzSpec {
    let s = space;
    let mut b = Builder::new();
    for i in s.occupied() {
        for j in i + 1..s.n_occ {
            for m in s.virtuals() {
                for n in m + 1..s.n_orbitals {
                    b.push(
                        vec![i, j, m, n],
                        vec![c(s.up(m)), c(s.up(n)), a(s.up(j)), a(s.up(i))],
                        1.0,
                    );
                    b.push(
                        vec![i, j, m, n],
                        vec![c(s.down(m)), c(s.down(n)), a(s.down(j)), a(s.down(i))],
                        1.0,
                    );
                }
            }
        }
    }
    b.finish(AnsatzKind::Custom, false, s.n_orbitals)
}

impl AnsatzSpec {
    /// One parameter per supplied excitation.
    pub fn custom(n_orbitals: usize, excitations: Vec<Vec<Ladder>>) -> Self {
        let excitations: Vec<Excitation> = excitations
            .into_iter()
            .enumerate()
            .map(|(group, ops)| Excitation {
                ops,
                group,
                weight: 1.0,
            })
            .collect();
        AnsatzSpec {
            kind: AnsatzKind::Custom,
            include_singles: false,
            n_orbitals,
            n_parameters: excitations.len(),
            excitations,
        }
    }

    pub fn n_modes(&self) -> usize {
        2 * self.n_orbitals
    }

    /// `weight·(t − t†)` for excitation `k`, without the parameter.
    pub fn generator(&self, k: usize) -> FermionOperator {
        let e = &self.excitations[k];
        let w = Complex64::new(e.weight, 0.0);
        let mut op = FermionOperator::zero(self.n_modes());
        op.add_term(e.ops.clone(), w).expect("excitation modes in range");
        let t = op.simplify();
        t.add(&t.adjoint().scale(Complex64::new(-1.0, 0.0)))
            .expect("same mode count")
    }

    /// `Σ_k weight_k θ_{group(k)} (t_k − t_k†)`.
    pub fn cluster_operator(&self, theta: &[f64]) -> Result<FermionOperator> {
        if theta.len() != self.n_parameters {
            return Err(Error::domain(format!(
                "expected {} amplitudes, got {}",
                self.n_parameters,
                theta.len()
            )));
        }
        let mut op = FermionOperator::zero(self.n_modes());
        for (k, e) in self.excitations.iter().enumerate() {
            let th = theta[e.group];
            if th == 0.0 {
                continue;
            }
            for (ops, coeff) in self.generator(k).terms() {
                op.add_term(ops.to_vec(), coeff * th)?;
            }
        }
        Ok(op.simplify())
    }
}

impl fmt::Display for AnsatzSpec {
    /// One line per excitation: `group weight [ladders]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.excitations {
            let body: Vec<String> = e
                .ops
                .iter()
                .map(|l| format!("{}{}", l.mode, if l.dagger { '+' } else { '-' }))
                .collect();
            writeln!(f, "{} {} [{}]", e.group, e.weight, body.join(" "))?;
        }
        Ok(())
    }
}
