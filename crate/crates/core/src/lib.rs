//! Generalized Schmidt numbers, Schmidt coefficients and entanglement of
//! formation for multipartite pure and mixed states.
//!
//! The crate is organized bottom-up:
//!
//! - [`tensor`]: dense states, reductions, spectra, numerical rank.
//! - [`bipartite`]: Schmidt decomposition, entanglement entropy, PPT test.
//! - [`partition`]: finest product factorization of a pure state.
//! - [`schmidt_number`]: the multipartite Schmidt number for pure states
//!   and its convex roof for mixed states.
//! - [`ensemble`]: pure-state ensembles of a density matrix and the
//!   searches over them.
//! - [`coefficients`]: multipartite Schmidt coefficients and the
//!   generalized entanglement of formation.
//! - [`states`]: W, GHZ and Acín-form states plus seeded random generators.
//!
//! Party indices are 1-based in the public API.

pub mod bipartite;
pub mod coefficients;
pub mod ensemble;
mod error;
mod optim;
pub mod partition;
mod range;
pub mod schmidt_number;
pub mod states;
pub mod tensor;

use serde::{Deserialize, Serialize};

pub use bipartite::{
    entanglement_entropy, mixed_bipartite_schmidt_number, ppt_entangled, ppt_test,
    schmidt_decompose, PptVerdict, SchmidtDecomposition,
};
pub use coefficients::{
    generalized_eof, max_entropy_ensemble_element, mixed_generalized_eof,
    pure_schmidt_coefficients, CoefficientSet, EofInterval, EnsembleElement,
};
pub use ensemble::{ensemble_search, EnsembleCandidate};
pub use error::{Error, Result};
pub use partition::{
    enumerate_bipartitions, factorize, local_rank_vector, Factor, PartitionStructure,
    SeparabilityLabel,
};
pub use schmidt_number::{
    mixed_schmidt_number, pure_schmidt_number, slocc_rank_check, SchmidtNumberResult,
};
pub use tensor::{
    numerical_rank, reduce, scaled_root, spectrum, DensityMatrix, DimensionProfile, PureState,
    Reduce, Spectrum, SubsystemSet, C64, CMatrix, CVector,
};

/// Budget for the seeded searches over pure-state ensembles.
///
/// Every search is a deterministic function of `(input, seed, budget)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            restarts: 64,
            iterations: 500,
            seed: 0,
        }
    }
}

/// Numerical settings shared by every analysis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    /// Relative eigenvalue cutoff for ranks, see [`numerical_rank`].
    pub rank_tol: f64,
    pub budget: SearchBudget,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            rank_tol: tensor::DEFAULT_RANK_TOL,
            budget: SearchBudget::default(),
        }
    }
}

impl Settings {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.budget.seed = seed;
        self
    }
}
