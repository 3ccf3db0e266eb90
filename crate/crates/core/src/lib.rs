//! Conservation laws, symmetry sectors and encoded gates for exchange-coupled qubits.
//!
//! The crate checks which operators a set of control Hamiltonians conserves,
//! proves gates unreachable when they break a conserved quantity, splits the
//! Hilbert space into invariant sectors, decides encoded universality from the
//! dimension of the dynamical Lie algebra, and searches for pulse sequences
//! that act as a requested gate on a code space.

pub mod config;
pub mod encoding;
pub mod error;
pub mod lie;
pub mod matrix;
pub mod runner;
pub mod spin;
pub mod suite;
pub mod symmetry;
pub mod synthesis;

pub use error::{Error, Result};
