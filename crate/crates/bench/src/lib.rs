//! Benchmark fixtures shared by the criterion targets.

use mrint::models::Model;
use mrint::SpaceSpec;

/// Two-atom Buck-Sukumar model at the headline parameters.
pub fn bs_model(n_atoms: usize, delta: f64, cutoff: usize) -> Model {
    Model::bs(3.02, 1.0, delta, SpaceSpec::new(cutoff, n_atoms, 1).unwrap()).unwrap()
}
