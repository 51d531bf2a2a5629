//! Macroscopic superposition diagnostics for pure qubit states.
//!
//! The central quantity is `e_max`, the largest eigenvalue of the
//! variance–covariance matrix of all single-site Pauli operators. It sets the
//! largest fluctuation of any additive operator, and its growth with the
//! number of qubits `L` separates states with macroscopic superpositions
//! (`e_max ∝ L`) from those without (`e_max = O(1)`). The crate evaluates it
//! along Grover's search, fits its scaling over families of states, and checks
//! closed-form results for the magnetization moments.

pub mod analytic;
pub mod catalog;
pub mod cli;
pub mod error;
pub mod grover;
pub mod linalg;
pub mod pindex;
pub mod random;
pub mod report;
pub mod statevector;
pub mod vcm;

pub use error::{Error, Result};
pub use grover::GroverInstance;
pub use statevector::{PauliAxis, PureState};
pub use vcm::{compute_vcm, Vcm};
