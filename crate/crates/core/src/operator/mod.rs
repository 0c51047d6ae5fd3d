//! Pauli-string algebra and dense Hermitian linear algebra.

mod dense;
mod pauli;
mod spectrum;

use num_complex::Complex64 as C64;

use crate::error::Result;

pub use dense::{check_capacity, hs_inner, to_dense, DenseOperator, HERMITIAN_TOL, MAX_DENSE_SITES};
pub use pauli::{commutator, pauli_product, OperatorSum, Pauli, PauliString, PauliTerm, MAX_SYMBOLIC_SITES};
pub use spectrum::{
    eig_hermitian, eigenvalues_hermitian, fix_phase, ground_energy, ground_state, lanczos_lowest, operator_norm,
    GroundState, RitzPairs, Spectrum, DEGENERACY_TOL, DENSE_GROUND_STATE_MAX_DIM, KRYLOV_RESIDUAL_TOL,
};

/// Anything that can act on a state vector.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, input: &[C64], output: &mut [C64]);
    fn to_dense(&self) -> Result<DenseOperator>;
}

impl LinearOperator for OperatorSum {
    fn dim(&self) -> usize {
        1usize << self.sites()
    }

    fn apply(&self, input: &[C64], output: &mut [C64]) {
        OperatorSum::apply(self, input, output)
    }

    fn to_dense(&self) -> Result<DenseOperator> {
        to_dense(self)
    }
}
