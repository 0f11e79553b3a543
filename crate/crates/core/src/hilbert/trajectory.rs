//! Stochastic unravelling of the dephasing channel: Z jumps arrive as
//! independent Poisson processes of rate `gamma` on every site, with exact
//! unitary evolution in between.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::evolve::Evolver;
use super::pauli::{Pauli, PauliString};
use super::state::StateVector;
use crate::error::{invalid, Result};
use crate::rng::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    pub time: f64,
    /// 1-based site.
    pub site: usize,
}

/// Jump times and sites for one trajectory, sorted by time.
pub fn sample_jumps(n_sites: usize, gamma: f64, duration: f64, seed: u64, stream: u64) -> Result<Vec<Jump>> {
    if !(gamma >= 0.0) || !(duration >= 0.0) {
        return Err(invalid("gamma and duration must be non-negative"));
    }
    let mut jumps = Vec::new();
    if gamma == 0.0 || duration == 0.0 {
        return Ok(jumps);
    }
    let mut rng = stream_rng(seed, stream);
    // Superposition of N rate-gamma processes: total rate N gamma, uniform site.
    let rate = gamma * n_sites as f64;
    let mut time = 0.0;
    loop {
        let u: f64 = rng.gen();
        time += -(1.0 - u).ln() / rate;
        if time > duration {
            break;
        }
        jumps.push(Jump { time, site: rng.gen_range(1..=n_sites) });
    }
    Ok(jumps)
}

/// Evolve `state` for `duration` with the given jump record applied.
pub fn apply_jumps(evolver: &Evolver, state: &StateVector, jumps: &[Jump], duration: f64, tol: f64) -> Result<StateVector> {
    let n = state.n_sites();
    let mut current = state.clone();
    let mut now = 0.0;
    for jump in jumps {
        current = evolver.evolve(&current, jump.time - now, tol)?;
        current.apply_pauli_in_place(&PauliString::single(n, jump.site, Pauli::Z)?)?;
        now = jump.time;
    }
    evolver.evolve(&current, duration - now, tol)
}

/// One trajectory of length `duration` seeded by `seed`.
pub fn trajectory_sample(
    evolver: &Evolver,
    state: &StateVector,
    gamma: f64,
    duration: f64,
    seed: u64,
) -> Result<(StateVector, Vec<Jump>)> {
    let jumps = sample_jumps(state.n_sites(), gamma, duration, seed, 0)?;
    let out = apply_jumps(evolver, state, &jumps, duration, 1e-12)?;
    Ok((out, jumps))
}
