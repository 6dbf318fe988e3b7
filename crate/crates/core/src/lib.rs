//! Single-electron spectra on a torus in a uniform magnetic field of
//! arbitrary orientation, including the curvature-induced geometric
//! potential and the magnetic geometric potential that couples mean
//! curvature to the surface-normal component of the vector potential.
//!
//! The pipeline is
//! [`geometry`] → [`field`] → [`basis`] → [`hamiltonian`] → [`solver`],
//! with [`oracle`] providing an independent finite-difference check and
//! [`sweep`] / [`config`] driving flux sweeps and composition tables.
//!
//! Energies are the dimensionless eigenvalues `eps` of the surface operator
//! whose kinetic part is `+d^2/dtheta^2 + ...`; the physical energy is
//! `E = -eps * hbar^2 / (2 m a^2)`, so the ground state is the state with the
//! *largest* `eps`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod config;
pub mod error;
pub mod field;
pub mod geometry;
pub mod hamiltonian;
pub mod oracle;
pub mod par;
pub mod quadrature;
pub mod solver;
pub mod sweep;
pub mod trig;

pub use error::{Error, Result};

pub use num_complex::Complex64;
