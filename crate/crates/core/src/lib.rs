//! Exact statevector simulation of the Bernstein-Vazirani algorithm on
//! d-level qudits.
//!
//! A hidden string `s ∈ {0,…,d−1}^n` sits behind a [`LinearOracle`] that
//! answers `f_s(x) = s·x mod d`. The quantum driver recovers `s` with a
//! single oracle application (Fourier sampling plus phase kickback onto a
//! `|φ⟩` ancilla); the classical driver needs `n` queries. A dense-matrix
//! reference in [`verification`] cross-checks the strided kernels.
//!
//! ```
//! use quditbv::{run_quantum_bv, Dimension, DigitString, LinearOracle};
//!
//! let d = Dimension::new(3).unwrap();
//! let secret = DigitString::new(vec![1, 2], d).unwrap();
//! let mut oracle = LinearOracle::new(secret.clone());
//! let report = run_quantum_bv(&mut oracle).unwrap();
//! assert_eq!(report.recovered, secret);
//! assert_eq!(report.oracle_queries, 1);
//! ```

pub mod algorithm;
pub mod cli;
mod error;
pub mod gates;
pub mod oracle;
pub mod state;
pub mod verification;

pub use algorithm::{
    build_psi, bv_circuit, measure_register, prepare_phi, run_classical_bv, run_quantum_bv,
    BvStates, MeasurementOutcome, Mode, RunReport,
};
pub use error::{Error, Result};
pub use gates::{
    apply_local_gate, apply_sum, dense_operator, fourier_matrix, FourierDirection, GateMatrix,
};
pub use oracle::LinearOracle;
pub use state::{
    basis_state, decode_index, encode_digits, inner_product, tensor, AmplitudeBudget, DigitString,
    Dimension, Statevector,
};
pub use verification::CheckResult;

pub use num_complex::Complex64;
