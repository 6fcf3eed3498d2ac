//! Labeled-basis complex linear algebra.

mod bipartite;
mod entropy;
mod fock;
mod operator;
mod state;

pub use bipartite::{BipartiteIndexer, Side};
pub use entropy::{
    coherent_information, entropy_from_spectrum, hermitian_eigenvalues, matrix_entropy,
    partial_trace, pure_coherent_information, schmidt_probabilities, shannon_entropy,
    von_neumann_entropy, LogBase, EIGENVALUE_CLIP,
};
pub use fock::{binomial, fock_enumerate, FockBasis};
pub use operator::{
    ground_state, ground_state_with, evolve, evolve_with, HermitianOperator, SolverPath,
    SparseHermitian, DENSE_LIMIT,
};
pub use state::{DensityMatrix, StateVector};

/// Tolerance on normalization and Hermiticity of states.
pub const STATE_TOL: f64 = 1e-10;
