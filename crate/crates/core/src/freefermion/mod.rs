//! Majorana-mode picture of the chain: operator algebra, mode propagation,
//! arrival classification and closed-form dephasing results.

pub mod arrival;
pub mod dephasing;
pub mod majorana;
pub mod propagator;

pub use arrival::{classify_arrival, ArrivalClassification, TermArrival};
pub use dephasing::{chi_decay, error_budget, BudgetReport};
pub use majorana::{
    jordan_wigner, pauli_to_fermion, FermionOperator, MajoranaIndex, MajoranaMonomial, DEFAULT_TERM_CAP,
    PRUNE_THRESHOLD,
};
pub use propagator::{mode_propagator, propagate, propagate_capped, ModePropagator};
