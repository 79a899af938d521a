//! Solvers for one-dimensional cavity QED models in the long-wavelength limit.
//!
//! The crate is `no_std` (it needs `alloc`). It provides the discretization
//! layer, exact coupled light-matter Hamiltonians in the Coulomb and
//! length gauges, the photon-free effective Hamiltonian, the photon-coupled
//! homogeneous-electron-gas basis, Kohn-Sham photon-exchange functionals and
//! real-time propagation with delta-kick spectroscopy.
//!
//! All quantities are in Hartree atomic units.

#![no_std]

extern crate alloc;

pub mod dynamics;
pub mod error;
pub mod exact_qed;
pub mod grid;
pub mod linalg;
pub mod pheg;
pub mod photon_free;
pub mod qedft;

pub use error::{Error, Result};
