//! Complex matrix arithmetic, the fixed Dirac/Pauli/spin-1 algebras, and matrix
//! functions that stay valid for pseudo-Hermitian (non-normal) inputs.
//!
//! Natural units (ħ = c = 1) throughout the crate.

mod algebra;
mod expm;
mod matrix;
mod spectral;

pub use algebra::{
    dirac_matrices, levi_civita, pauli_rho, rho3_metric, spin1_matrices, DiracAlgebra, PauliRho,
    SpinOneMatrices,
};
pub use expm::{expm_pade13, mat_exp, MatrixExponential};
pub use matrix::{anticommutator, c, commutator, ComplexMatrix, C64, I, ONE, ZERO};
pub use spectral::{spectral, spectral_named, spectral_with_known_spectrum, SpectralDecomposition, MAX_CONDITION};
