//! Multi-well potentials from multi-Gaussian ground states.
//!
//! Potentials are built by quasi-exact inversion `V = E + psi''/psi` of a
//! Gaussian superposition, then solved numerically with a finite-difference
//! tridiagonal eigensolver. Units: `H = -d^2/dr^2 + V(r)`.

pub mod analysis;
pub mod ansatz;
pub mod cli;
pub mod config;
pub mod csvfmt;
pub mod error;
pub mod fd;
pub mod numeric;
pub mod potential;
pub mod qes;
pub mod rect;
pub mod verify;

pub use error::{Error, Result};
