//! Exact one-electron cavity QED in truncated Fock spaces.

mod fock;
mod hamiltonian;
mod matter;
mod modes;
mod observables;

pub use fock::FockSpace;
pub use hamiltonian::{
    build_pf_hamiltonian, build_pzw_hamiltonian, build_pzw_selfpol_hamiltonian, ground_state, selfpol_ground_state,
    selfpol_potential, CoupledGroundState, CoupledHamiltonian, FockTruncation, PfForm, PhotonFrame, SolveOptions,
};
pub use matter::{MatterSpace, Momentum};
pub use modes::{dress_modes, lambda_from_ratio, CavityMode, ModeSet};
pub use observables::{
    density, dipole_and_variance, excitation_distribution, ladder_norm, matter_probabilities, photon_number,
    total_photon_number,
};
