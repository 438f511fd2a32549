//! Trotterized unitary coupled-cluster ansatze (UCCSD, pair UCCD, singlet UCCD0
//! and its full variant) evaluated with a statevector simulator inside VQE and
//! orbital-optimized VQE loops.
//!
//! The pipeline runs from molecular integrals (FCIDUMP or the Hubbard chain)
//! through second quantization, fermion-to-qubit encodings with optional qubit
//! reduction, ansatz compilation into Pauli-string exponentials, and a
//! quasi-Newton driver. An independent determinant-space diagonalizer supplies
//! reference energies.

pub mod analysis;
pub mod ansatz;
pub mod encoding;
pub mod error;
pub mod exact;
pub mod fermion;
pub mod hamiltonian;
pub mod optimize;
pub mod runner;
pub mod state;
pub mod vqe;

pub use error::{Error, Result};

/// Magnitude below which operator coefficients are discarded.
pub const COEFF_EPS: f64 = 1e-12;
