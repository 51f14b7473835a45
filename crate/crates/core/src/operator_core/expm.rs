//! Matrix exponential with two routes: the eigenbasis when it is well conditioned, and
//! scaling-and-squaring with a degree-13 Padé approximant otherwise.

use nalgebra::DMatrix;

use super::matrix::{ComplexMatrix, C64};
use super::spectral::{spectral, SpectralDecomposition};

/// Padé [13/13] numerator coefficients for exp.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// 1-norm bound under which the [13/13] approximant reaches double precision.
const THETA_13: f64 = 5.371920351148152;

/// `exp(A)` by scaling and squaring with the degree-13 Padé approximant.
pub fn expm_pade13(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.dim();
    let norm = a.norm_1();
    let squarings = if norm > THETA_13 { (norm / THETA_13).log2().ceil() as i32 } else { 0 };
    let a = a.as_dmatrix() * C64::new(0.5_f64.powi(squarings), 0.0);

    let id = DMatrix::<C64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = |k: usize| C64::new(PADE13[k], 0.0);

    let inner_u = &a6 * (&a6 * b(13) + &a4 * b(11) + &a2 * b(9));
    let u = &a * (inner_u + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &id * b(1));
    let inner_v = &a6 * (&a6 * b(12) + &a4 * b(10) + &a2 * b(8));
    let v = inner_v + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &id * b(0);

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).expect("Padé denominator is nonsingular for scaled input");
    for _ in 0..squarings {
        r = &r * &r;
    }
    ComplexMatrix::from_dmatrix(r).expect("square")
}

/// Reusable `s ↦ exp(sA)` for a fixed `A`; the eigenbasis is computed once.
#[derive(Debug, Clone)]
pub enum MatrixExponential {
    Spectral(SpectralDecomposition),
    Pade(ComplexMatrix),
}

impl MatrixExponential {
    pub fn new(a: &ComplexMatrix) -> Self {
        match spectral(a) {
            Ok(decomposition) => MatrixExponential::Spectral(decomposition),
            Err(_) => MatrixExponential::Pade(a.clone()),
        }
    }

    pub fn eval(&self, s: C64) -> ComplexMatrix {
        match self {
            MatrixExponential::Spectral(d) => d.map(|lambda| (lambda * s).exp()),
            MatrixExponential::Pade(a) => expm_pade13(&a.scale(s)),
        }
    }

    pub fn is_spectral(&self) -> bool {
        matches!(self, MatrixExponential::Spectral(_))
    }
}

/// `exp(sA)`.
pub fn mat_exp(a: &ComplexMatrix, s: C64) -> ComplexMatrix {
    MatrixExponential::new(a).eval(s)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::super::algebra::pauli_rho;
    use super::super::matrix::{c, ONE, ZERO};
    use super::*;

    /// Truncated Taylor series with many terms; fine for small norms.
    fn taylor_exp(a: &ComplexMatrix) -> ComplexMatrix {
        let mut term = ComplexMatrix::identity(a.dim());
        let mut sum = term.clone();
        for k in 1..60 {
            term = (&term * a).scale_re(1.0 / k as f64);
            sum += &term;
        }
        sum
    }

    #[test]
    fn rho3_times_i_pi_is_minus_identity() {
        let e = mat_exp(&pauli_rho().rho3, c(0.0, PI));
        assert!(e.approx_eq(&ComplexMatrix::identity(2).scale_re(-1.0), 1e-15));
    }

    #[test]
    fn zero_matrix_exponentiates_to_identity() {
        let e = mat_exp(&ComplexMatrix::zeros(4), c(0.3, -2.0));
        assert!(e.approx_eq(&ComplexMatrix::identity(4), 1e-15));
    }

    #[test]
    fn pade_matches_taylor_and_handles_jordan_blocks() {
        let a = ComplexMatrix::from_row_major(&[
            c(0.3, 0.1), c(-0.2, 0.4), c(0.0, 0.0),
            c(0.1, 0.0), c(-0.5, 0.2), c(0.3, -0.3),
            c(0.2, 0.2), c(0.0, 0.1), c(0.4, 0.0),
        ]);
        assert!(expm_pade13(&a).approx_eq(&taylor_exp(&a), 1e-14));

        // exp of a Jordan block [[1, 1], [0, 1]] is e·[[1, 1], [0, 1]].
        let j = ComplexMatrix::from_row_major(&[ONE, ONE, ZERO, ONE]);
        let expected = j.scale_re(std::f64::consts::E);
        assert!(!MatrixExponential::new(&j).is_spectral());
        assert!(mat_exp(&j, ONE).approx_eq(&expected, 1e-13));
    }

    #[test]
    fn scaling_and_squaring_for_large_norm() {
        let a = pauli_rho().rho1.scale(c(0.0, 40.0));
        // exp(iθρ₁) = cos θ + i sin θ ρ₁
        let expected = &ComplexMatrix::identity(2).scale_re(40.0_f64.cos())
            + &pauli_rho().rho1.scale(c(0.0, 40.0_f64.sin()));
        assert!(expm_pade13(&a).approx_eq(&expected, 1e-12));
    }
}
