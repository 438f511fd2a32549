//! Sparse second-quantized operators.
//!
//! Spin orbitals are flattened in block order: all spin-up orbitals first, then
//! all spin-down ones, so spin orbital `r + n_orbitals` is the down partner of
//! spatial orbital `r`. The two-qubit parity reduction depends on this layout.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::COEFF_EPS;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Up,
    Down,
}

/// Flattened spin-orbital index for a spatial orbital and spin.
pub fn spin_orbital(spatial: usize, spin: Spin, n_orbitals: usize) -> usize {
    match spin {
        Spin::Up => spatial,
        Spin::Down => spatial + n_orbitals,
    }
}

/// A single creation (`dagger == true`) or annihilation operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ladder {
    pub mode: usize,
    pub dagger: bool,
}

impl Ladder {
    pub const fn create(mode: usize) -> Self {
        Ladder { mode, dagger: true }
    }

    pub const fn annihilate(mode: usize) -> Self {
        Ladder { mode, dagger: false }
    }

    fn adjoint(self) -> Self {
        Ladder {
            mode: self.mode,
            dagger: !self.dagger,
        }
    }
}

/// Shorthand for building ladder strings: `(mode, true)` is a creator.
pub fn ladders(ops: &[(usize, bool)]) -> Vec<Ladder> {
    ops.iter().map(|&(mode, dagger)| Ladder { mode, dagger }).collect()
}

/// Sum of ladder-operator strings with complex coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct FermionOperator {
    n_modes: usize,
    terms: BTreeMap<Vec<Ladder>, Complex64>,
}

impl FermionOperator {
    pub fn zero(n_modes: usize) -> Self {
        FermionOperator {
            n_modes,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n_modes: usize) -> Self {
        let mut op = Self::zero(n_modes);
        op.terms.insert(Vec::new(), Complex64::new(1.0, 0.0));
        op
    }

    /// Single product term, stored as given (not normal-ordered).
    pub fn from_term(n_modes: usize, ops: Vec<Ladder>, coeff: Complex64) -> Result<Self> {
        let mut op = Self::zero(n_modes);
        op.add_term(ops, coeff)?;
        Ok(op)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[Ladder], Complex64)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    pub fn coefficient(&self, ops: &[Ladder]) -> Complex64 {
        self.terms.get(ops).copied().unwrap_or_default()
    }

    /// Accumulates a raw product term. Call [`simplify`](Self::simplify) to
    /// bring the operator into canonical form.
    pub fn add_term(&mut self, ops: Vec<Ladder>, coeff: Complex64) -> Result<()> {
        if let Some(l) = ops.iter().find(|l| l.mode >= self.n_modes) {
            return Err(Error::domain(format!(
                "mode {} out of range for {} spin orbitals",
                l.mode, self.n_modes
            )));
        }
        *self.terms.entry(ops).or_default() += coeff;
        Ok(())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= factor;
        }
        out.simplify()
    }

    /// Normal-ordered canonical form: creators left of annihilators, each block
    /// in descending mode order; coefficients below `COEFF_EPS` are dropped.
    pub fn simplify(&self) -> Self {
        let mut acc: HashMap<Vec<Ladder>, Complex64> = HashMap::new();
        for (ops, &c) in &self.terms {
            if c.norm() < COEFF_EPS {
                continue;
            }
            normal_order_into(ops.clone(), c, &mut acc);
        }
        let terms = acc.into_iter().filter(|(_, c)| c.norm() >= COEFF_EPS).collect();
        FermionOperator {
            n_modes: self.n_modes,
            terms,
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n_modes != other.n_modes {
            return Err(Error::domain(format!(
                "operator mode counts differ: {} vs {}",
                self.n_modes, other.n_modes
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (ops, &c) in &other.terms {
            *out.terms.entry(ops.clone()).or_default() += c;
        }
        Ok(out.simplify())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.n_modes);
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                let mut ops = Vec::with_capacity(a.len() + b.len());
                ops.extend_from_slice(a);
                ops.extend_from_slice(b);
                *out.terms.entry(ops).or_default() += ca * cb;
            }
        }
        Ok(out.simplify())
    }

    /// Reverses every string, flips dagger flags and conjugates coefficients.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.n_modes);
        for (ops, &c) in &self.terms {
            let rev: Vec<Ladder> = ops.iter().rev().map(|l| l.adjoint()).collect();
            *out.terms.entry(rev).or_default() += c.conj();
        }
        out.simplify()
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        let ab = self.multiply(other)?;
        let ba = other.multiply(self)?;
        ab.sub(&ba)
    }

    /// True when every coefficient of the canonical form is below `tol`.
    pub fn is_zero(&self, tol: f64) -> bool {
        self.simplify().terms.values().all(|c| c.norm() < tol)
    }

    /// Largest coefficient difference between the canonical forms.
    pub fn max_difference(&self, other: &Self) -> Result<f64> {
        let diff = self.sub(other)?;
        Ok(diff.terms.values().map(|c| c.norm()).fold(0.0, f64::max))
    }

    /// Number of fermion-number changes in every term is zero and the up/down
    /// counts are conserved separately.
    pub fn conserves_spin_numbers(&self, n_orbitals: usize) -> bool {
        self.terms.keys().all(|ops| {
            let mut d_up = 0i64;
            let mut d_down = 0i64;
            for l in ops {
                let delta = if l.dagger { 1 } else { -1 };
                if l.mode < n_orbitals {
                    d_up += delta;
                } else {
                    d_down += delta;
                }
            }
            d_up == 0 && d_down == 0
        })
    }

    /// Dense matrix on the 2^n occupation basis (bit p = occupation of mode p),
    /// using the Jordan-Wigner sign convention. Intended for small systems.
    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        if self.n_modes > 12 {
            return Err(Error::Capability(format!(
                "dense fermion matrix limited to 12 modes, got {}",
                self.n_modes
            )));
        }
        let dim = 1usize << self.n_modes;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for (ops, &c) in &self.terms {
            for col in 0..dim {
                if let Some((row, sign)) = apply_string(ops, col) {
                    m[(row, col)] += c * sign;
                }
            }
        }
        Ok(m)
    }
}

/// Applies a ladder string (rightmost first) to an occupation bitstring.
fn apply_string(ops: &[Ladder], mut state: usize) -> Option<(usize, f64)> {
    let mut sign = 1.0;
    for l in ops.iter().rev() {
        let bit = 1usize << l.mode;
        let occupied = state & bit != 0;
        if occupied == l.dagger {
            return None;
        }
        if (state & (bit - 1)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        state ^= bit;
    }
    Some((state, sign))
}

fn normal_order_into(ops: Vec<Ladder>, coeff: Complex64, acc: &mut HashMap<Vec<Ladder>, Complex64>) {
    let mut stack = vec![(ops, coeff)];
    'outer: while let Some((mut ops, mut c)) = stack.pop() {
        for i in 1..ops.len() {
            let mut j = i;
            while j > 0 {
                let left = ops[j - 1];
                let right = ops[j];
                if right.dagger && !left.dagger {
                    ops.swap(j - 1, j);
                    c = -c;
                    if right.mode == left.mode {
                        let mut contracted = ops.clone();
                        contracted.drain(j - 1..=j);
                        stack.push((contracted, -c));
                    }
                } else if right.dagger == left.dagger {
                    if right.mode == left.mode {
                        continue 'outer;
                    } else if right.mode > left.mode {
                        ops.swap(j - 1, j);
                        c = -c;
                    } else {
                        break;
                    }
                } else {
                    break;
                }
                j -= 1;
            }
        }
        *acc.entry(ops).or_default() += c;
    }
}

/// `Σ_r a†_{rσ} a_{rσ}` over the spatial orbitals of one spin.
pub fn number_operator(spin: Spin, n_orbitals: usize) -> FermionOperator {
    let n_modes = 2 * n_orbitals;
    let mut op = FermionOperator::zero(n_modes);
    for r in 0..n_orbitals {
        let p = spin_orbital(r, spin, n_orbitals);
        op.terms
            .insert(vec![Ladder::create(p), Ladder::annihilate(p)], Complex64::new(1.0, 0.0));
    }
    op
}

fn format_complex(c: Complex64) -> String {
    format!("({}{:+}j)", c.re, c.im)
}

impl fmt::Display for FermionOperator {
    /// One term per line: `coef * [3+ 1+ 0- 2-]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (ops, c) in &self.terms {
            let body: Vec<String> = ops
                .iter()
                .map(|l| format!("{}{}", l.mode, if l.dagger { '+' } else { '-' }))
                .collect();
            writeln!(f, "{} * [{}]", format_complex(*c), body.join(" "))?;
        }
        Ok(())
    }
}
