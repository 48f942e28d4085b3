//! Statevector simulation, Hamiltonian construction and staged VQE training
//! for graph-coloring benchmarks.

pub mod ansatz;
pub mod bench;
pub mod error;
pub mod optimize;
pub mod pauli;
pub mod problems;
pub mod rng;
pub mod simulator;
pub mod strategies;

pub use error::{Error, Result};
