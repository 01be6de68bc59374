//! Measurement-setting generation for Pauli-decomposed Hamiltonians.
//!
//! The crate covers the full readout pipeline for energy estimation:
//!
//! * [`pauli`]: bit-packed Pauli strings and compatibility predicates,
//! * [`hamiltonian`]: the weighted Pauli decomposition and its text format,
//! * [`guarantees`]: tail bounds, truncation and weight functions,
//! * [`schemes`]: ShadowGrouping, random Pauli settings and a brute-force oracle,
//! * [`simulator`]: a dense statevector backend for desk-scale benchmarks,
//! * [`estimation`]: grouped-mean and single-shot estimators plus the benchmark loop.

pub mod error;
pub mod estimation;
pub mod guarantees;
pub mod hamiltonian;
pub mod pauli;
pub mod rng;
pub mod schemes;
pub mod simulator;

pub use error::{Error, Result};
pub use hamiltonian::{parse_hamiltonian, Term, WeightedHamiltonian};
pub use pauli::{Pauli, PauliString};
