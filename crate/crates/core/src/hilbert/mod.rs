//! Full Hilbert-space simulation of the chain.

pub mod evolve;
pub mod lindblad;
pub mod pauli;
pub mod state;
pub mod trajectory;

pub use evolve::{evolve, ChainHamiltonian, EvolutionMethod, Evolver};
pub use lindblad::{chi, chi_mode, lindblad_evolve, lindblad_trajectory, DensityMatrix};
pub use pauli::{Pauli, PauliString};
pub use state::{apply_pauli, cz_network, fidelity, StateVector};
pub use trajectory::{trajectory_sample, Jump};
