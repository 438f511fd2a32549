//! Pauli strings as (x, z) bitmasks and sparse sums of them.
//!
//! Qubit `q` carries `I` for (x,z) = (0,0), `X` for (1,0), `Z` for (0,1) and
//! `Y` for (1,1). A string denotes the Hermitian tensor product of those single
//! qubit matrices, so `P = i^{|x&z|} X^x Z^z`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::COEFF_EPS;

pub const MAX_QUBITS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    pub x: u64,
    pub z: u64,
}

const I_POW: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

/// `i^k` for any integer `k`.
pub fn i_pow(k: i64) -> Complex64 {
    I_POW[k.rem_euclid(4) as usize]
}

impl PauliString {
    pub const IDENTITY: PauliString = PauliString { x: 0, z: 0 };

    pub fn new(x: u64, z: u64) -> Self {
        PauliString { x, z }
    }

    pub fn single(qubit: usize, p: Pauli) -> Self {
        let mut s = Self::IDENTITY;
        s.set(qubit, p);
        s
    }

    /// Builds a string from `(qubit, Pauli)` pairs.
    pub fn from_ops(ops: &[(usize, Pauli)]) -> Self {
        let mut s = Self::IDENTITY;
        for &(q, p) in ops {
            s.set(q, p);
        }
        s
    }

    /// Parses a label such as `"ZIXY"`, leftmost character = highest qubit.
    pub fn from_label(label: &str) -> Result<Self> {
        let n = label.chars().count();
        if n > MAX_QUBITS {
            return Err(Error::domain("Pauli label longer than 64 qubits"));
        }
        let mut s = Self::IDENTITY;
        for (k, ch) in label.chars().enumerate() {
            let q = n - 1 - k;
            let p = match ch {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => return Err(Error::domain(format!("invalid Pauli symbol {other:?}"))),
            };
            s.set(q, p);
        }
        Ok(s)
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        Pauli::from_bits(self.x >> qubit & 1 == 1, self.z >> qubit & 1 == 1)
    }

    pub fn set(&mut self, qubit: usize, p: Pauli) {
        let (x, z) = p.bits();
        let bit = 1u64 << qubit;
        self.x = (self.x & !bit) | if x { bit } else { 0 };
        self.z = (self.z & !bit) | if z { bit } else { 0 };
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    /// `self · other = phase · result`.
    pub fn multiply(&self, other: &PauliString) -> (Complex64, PauliString) {
        let result = PauliString {
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        };
        let k = self.y_count() as i64 + other.y_count() as i64 - result.y_count() as i64
            + 2 * (self.z & other.x).count_ones() as i64;
        (i_pow(k), result)
    }

    /// Action on a computational basis state: `P|b⟩ = phase |b ⊕ x⟩`.
    #[inline]
    pub fn apply_to_basis(&self, basis: usize) -> (usize, Complex64) {
        let sign = (basis as u64 & self.z).count_ones() as i64 * 2;
        (basis ^ self.x as usize, i_pow(self.y_count() as i64 + sign))
    }

    /// Removes the given qubits and packs the remaining ones downwards.
    pub fn remove_qubits(&self, removed: &[usize]) -> PauliString {
        let mut sorted = removed.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut x = self.x;
        let mut z = self.z;
        for &q in sorted.iter().rev() {
            x = compress_bit(x, q);
            z = compress_bit(z, q);
        }
        PauliString { x, z }
    }

    pub fn label(&self, n_qubits: usize) -> String {
        (0..n_qubits).rev().map(|q| self.get(q).symbol()).collect()
    }
}

/// Deletes bit `q` from `v`, shifting higher bits down by one.
pub(crate) fn compress_bit(v: u64, q: usize) -> u64 {
    let low = v & ((1u64 << q) - 1);
    let high = if q + 1 >= 64 { 0 } else { (v >> (q + 1)) << q };
    low | high
}

/// Inserts `bit` at position `q`, shifting bits at and above `q` up by one.
pub(crate) fn expand_bit(v: usize, q: usize, bit: bool) -> usize {
    let low = v & ((1usize << q) - 1);
    let high = (v >> q) << (q + 1);
    low | high | (usize::from(bit) << q)
}

/// Sparse weighted sum of Pauli strings on a fixed register.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliOperator {
    n_qubits: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

impl PauliOperator {
    pub fn zero(n_qubits: usize) -> Self {
        assert!(n_qubits <= MAX_QUBITS, "at most 64 qubits supported");
        PauliOperator {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(n_qubits: usize) -> Self {
        let mut op = Self::zero(n_qubits);
        op.terms.insert(PauliString::IDENTITY, Complex64::new(1.0, 0.0));
        op
    }

    pub fn from_terms(n_qubits: usize, terms: impl IntoIterator<Item = (PauliString, Complex64)>) -> Self {
        let mut acc: HashMap<PauliString, Complex64> = HashMap::new();
        for (p, c) in terms {
            *acc.entry(p).or_default() += c;
        }
        Self::from_map(n_qubits, acc)
    }

    pub(crate) fn from_map(n_qubits: usize, acc: HashMap<PauliString, Complex64>) -> Self {
        let terms = acc.into_iter().filter(|(_, c)| c.norm() >= COEFF_EPS).collect();
        PauliOperator { n_qubits, terms }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, p: &PauliString) -> Complex64 {
        self.terms.get(p).copied().unwrap_or_default()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::from_terms(self.n_qubits, self.terms.iter().map(|(p, c)| (*p, c * factor)))
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::domain(format!(
                "qubit counts differ: {} vs {}",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self::from_terms(
            self.n_qubits,
            self.terms.iter().chain(other.terms.iter()).map(|(p, c)| (*p, *c)),
        ))
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut acc: HashMap<PauliString, Complex64> = HashMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let (phase, p) = a.multiply(b);
                *acc.entry(p).or_default() += phase * ca * cb;
            }
        }
        Ok(Self::from_map(self.n_qubits, acc))
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        let ab = self.multiply(other)?;
        let ba = other.multiply(self)?;
        ab.add(&ba.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_terms(self.n_qubits, self.terms.iter().map(|(p, c)| (*p, c.conj())))
    }

    /// Hermitian iff every coefficient is real (strings are Hermitian).
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() < tol)
    }

    pub fn max_difference(&self, other: &Self) -> Result<f64> {
        let diff = self.add(&other.scale(Complex64::new(-1.0, 0.0)))?;
        Ok(diff.terms.values().map(|c| c.norm()).fold(0.0, f64::max))
    }

    /// Sum of absolute coefficients; bounds the spectral norm.
    pub fn one_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    /// Dense matrix in the computational basis, qubit 0 least significant.
    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        if self.n_qubits > 14 {
            return Err(Error::Capability(format!(
                "dense Pauli matrix limited to 14 qubits, got {}",
                self.n_qubits
            )));
        }
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for (p, c) in &self.terms {
            for col in 0..dim {
                let (row, phase) = p.apply_to_basis(col);
                m[(row, col)] += c * phase;
            }
        }
        Ok(m)
    }
}

impl fmt::Display for PauliOperator {
    /// One term per line: `(-0.5+0j) ZIXY`, leftmost symbol = highest qubit.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, c) in &self.terms {
            writeln!(f, "({}{:+}j) {}", c.re, c.im, p.label(self.n_qubits))?;
        }
        Ok(())
    }
}
