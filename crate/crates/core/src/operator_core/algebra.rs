//! Fixed matrix algebras: Dirac matrices in the Dirac basis, the Pauli ρ matrices
//! acting on the two-component (particle/antiparticle) index, and the spin-1 matrices.

use super::matrix::{c, ComplexMatrix, I, ONE, ZERO};

/// Dirac matrices in the standard (Dirac) representation.
///
/// `beta = diag(I₂, −I₂)`, `alpha[i]` has `σ_i` in both off-diagonal blocks,
/// `gamma[i] = beta·alpha[i]` and `sigma_big[i] = diag(σ_i, σ_i)`.
#[derive(Debug, Clone)]
pub struct DiracAlgebra {
    pub alpha: [ComplexMatrix; 3],
    pub beta: ComplexMatrix,
    pub gamma: [ComplexMatrix; 3],
    pub sigma_big: [ComplexMatrix; 3],
}

/// The three Pauli matrices, named ρ when they act on the two-component index.
#[derive(Debug, Clone)]
pub struct PauliRho {
    pub rho1: ComplexMatrix,
    pub rho2: ComplexMatrix,
    pub rho3: ComplexMatrix,
}

impl PauliRho {
    pub fn all(&self) -> [&ComplexMatrix; 3] {
        [&self.rho1, &self.rho2, &self.rho3]
    }
}

/// Spin-1 matrices with entries `(S_i)_{jk} = −i ε_{ijk}`.
#[derive(Debug, Clone)]
pub struct SpinOneMatrices {
    pub s: [ComplexMatrix; 3],
}

pub fn pauli_rho() -> PauliRho {
    PauliRho {
        rho1: ComplexMatrix::from_row_major(&[ZERO, ONE, ONE, ZERO]),
        rho2: ComplexMatrix::from_row_major(&[ZERO, -I, I, ZERO]),
        rho3: ComplexMatrix::from_row_major(&[ONE, ZERO, ZERO, -ONE]),
    }
}

fn block2x2(tl: &ComplexMatrix, tr: &ComplexMatrix, bl: &ComplexMatrix, br: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(4, |i, j| {
        let (bi, bj) = (i / 2, j / 2);
        let block = match (bi, bj) {
            (0, 0) => tl,
            (0, 1) => tr,
            (1, 0) => bl,
            _ => br,
        };
        block.get(i % 2, j % 2)
    })
}

pub fn dirac_matrices() -> DiracAlgebra {
    let sigma = pauli_rho();
    let sigma = sigma.all();
    let zero = ComplexMatrix::zeros(2);
    let id = ComplexMatrix::identity(2);

    let beta = block2x2(&id, &zero, &zero, &(-&id));
    let alpha = [0, 1, 2].map(|k| block2x2(&zero, sigma[k], sigma[k], &zero));
    let gamma = [0, 1, 2].map(|k| &beta * &alpha[k]);
    let sigma_big = [0, 1, 2].map(|k| block2x2(sigma[k], &zero, &zero, sigma[k]));

    DiracAlgebra { alpha, beta, gamma, sigma_big }
}

/// Levi-Civita symbol on {0, 1, 2}.
pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

pub fn spin1_matrices() -> SpinOneMatrices {
    let s = [0, 1, 2].map(|i| ComplexMatrix::from_fn(3, |j, k| c(0.0, -levi_civita(i, j, k))));
    SpinOneMatrices { s }
}

/// `ρ₃ ⊗ I_k`: the charge-form metric on a two-component representation with `k` inner states.
pub fn rho3_metric(inner: usize) -> ComplexMatrix {
    pauli_rho().rho3.kron(&ComplexMatrix::identity(inner))
}
