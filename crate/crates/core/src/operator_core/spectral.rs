//! Eigendecomposition of small diagonalizable complex matrices, including
//! non-normal (pseudo-Hermitian) ones with degenerate eigenvalues.
//!
//! Eigenvalues come from a complex Schur factorization. Numerically coincident
//! eigenvalues are merged into clusters and each cluster's eigenspace is taken as
//! the null space of `A − λI` from an SVD, which stays well defined for
//! semisimple degeneracies where triangular back-substitution does not.

use std::cmp::Ordering;

use nalgebra::linalg::{Schur, SVD};
use nalgebra::{DMatrix, DVector};

use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

/// Condition estimates above this make the eigenbasis unusable.
pub const MAX_CONDITION: f64 = 1e8;

/// Relative gap under which two Schur eigenvalues are treated as one.
const CLUSTER_TOL: f64 = 1e-7;

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Sorted by descending real part, then descending imaginary part.
    pub eigenvalues: Vec<C64>,
    /// Unit-norm eigenvectors as columns, in eigenvalue order.
    pub right_eigenvectors: ComplexMatrix,
    pub inverse_of_eigenvector_matrix: ComplexMatrix,
    /// `‖V‖₁ ‖V⁻¹‖₁`.
    pub condition_estimate: f64,
    /// One `(λ, P_λ)` per distinct eigenvalue, in eigenvalue order.
    pub projectors: Vec<(C64, ComplexMatrix)>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `f(A) = Σ f(λ) P_λ`.
    pub fn map(&self, f: impl Fn(C64) -> C64) -> ComplexMatrix {
        let n = self.dim();
        self.projectors.iter().fold(ComplexMatrix::zeros(n), |mut acc, (lambda, p)| {
            acc += &p.scale(f(*lambda));
            acc
        })
    }

    /// Spectral projector onto the eigenvalues selected by `keep`.
    pub fn projector(&self, keep: impl Fn(C64) -> bool) -> ComplexMatrix {
        self.map(|z| if keep(z) { C64::new(1.0, 0.0) } else { ZERO })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|z| z)
    }
}

fn compare_eigenvalues(a: &C64, b: &C64, tol: f64) -> Ordering {
    if (a.re - b.re).abs() > tol {
        b.re.partial_cmp(&a.re).unwrap_or(Ordering::Equal)
    } else {
        b.im.partial_cmp(&a.im).unwrap_or(Ordering::Equal)
    }
}

/// Rotate a vector so its first largest-modulus component is real and positive, and
/// give it unit Euclidean norm.
fn normalize_phase(mut v: DVector<C64>) -> DVector<C64> {
    let norm = v.norm();
    let max = v.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()));
    if let Some(pivot) = v.iter().find(|z| z.norm() >= max * (1.0 - 1e-9)).copied() {
        let phase = pivot.conj() / pivot.norm();
        v.iter_mut().for_each(|z| *z *= phase / norm);
    }
    v
}

/// Spectral projectors per cluster. With two distinct eigenvalues the projectors are
/// the Lagrange interpolants `P₁ = (A − λ₂)/(λ₁ − λ₂)`, `P₂ = I − P₁`, which avoid the
/// eigenvector matrix and its conditioning entirely; otherwise `P_k = V_k W_k`.
fn cluster_projectors(
    a: &ComplexMatrix,
    clusters: &[(C64, usize)],
    v: &ComplexMatrix,
    w: &ComplexMatrix,
) -> Vec<(C64, ComplexMatrix)> {
    let n = a.dim();
    let id = ComplexMatrix::identity(n);
    match clusters {
        [(only, _)] => vec![(*only, id)],
        [(l1, _), (l2, _)] => {
            let p1 = (a - &id.scale(*l2)).scale(C64::new(1.0, 0.0) / (l1 - l2));
            let p2 = &id - &p1;
            vec![(*l1, p1), (*l2, p2)]
        }
        _ => {
            let mut start = 0;
            clusters
                .iter()
                .map(|(lambda, mult)| {
                    let p = ComplexMatrix::from_fn(n, |i, j| {
                        (start..start + mult).map(|k| v.get(i, k) * w.get(k, j)).sum()
                    });
                    start += mult;
                    (*lambda, p)
                })
                .collect()
        }
    }
}

pub fn spectral(a: &ComplexMatrix) -> Result<SpectralDecomposition> {
    spectral_named(a, "input")
}

/// Like [`spectral`] but errors name the matrix with `label`.
pub fn spectral_named(a: &ComplexMatrix, label: &str) -> Result<SpectralDecomposition> {
    decompose(a, label, None)
}

/// Decomposition of a matrix whose distinct eigenvalues are known in closed form.
///
/// The Schur eigenvalues must agree with `known` to a relative `1e-8`; they are then
/// replaced by the exact values before the projectors are formed.
pub fn spectral_with_known_spectrum(
    a: &ComplexMatrix,
    label: &str,
    known: &[C64],
) -> Result<SpectralDecomposition> {
    decompose(a, label, Some(known))
}

fn decompose(a: &ComplexMatrix, label: &str, known: Option<&[C64]>) -> Result<SpectralDecomposition> {
    let n = a.dim();
    let m = a.as_dmatrix();
    if !a.is_finite() {
        return Err(Error::Parameter(format!("{label} has non-finite entries")));
    }
    let scale = a.max_abs().max(f64::MIN_POSITIVE);

    // The QR iteration occasionally stalls at a stopping tolerance of exactly ε; a
    // slightly looser one converges with the same accuracy.
    let schur = (0..7)
        .find_map(|k| Schur::try_new(m.clone(), f64::EPSILON * f64::from(1u32 << k), 1_000))
        .ok_or_else(|| Error::NotDiagonalizable { matrix: label.to_string(), residual: f64::NAN })?;
    let raw = schur
        .eigenvalues()
        .ok_or_else(|| Error::NotDiagonalizable { matrix: label.to_string(), residual: f64::NAN })?;

    // Merge numerically coincident eigenvalues.
    let tol = CLUSTER_TOL * scale.max(1.0);
    let mut clusters: Vec<(C64, usize)> = Vec::new();
    for lambda in raw.iter() {
        match clusters.iter_mut().find(|(center, _)| (center - lambda).norm() <= tol) {
            Some((center, count)) => {
                *center = (*center * *count as f64 + lambda) / (*count as f64 + 1.0);
                *count += 1;
            }
            None => clusters.push((*lambda, 1)),
        }
    }
    if let Some(known) = known {
        for (center, _) in clusters.iter_mut() {
            let nearest = known
                .iter()
                .min_by(|x, y| (*x - *center).norm().partial_cmp(&(*y - *center).norm()).unwrap_or(Ordering::Equal))
                .ok_or_else(|| Error::Parameter("empty known spectrum".into()))?;
            let gap = (nearest - *center).norm();
            if gap > 1e-8 * scale.max(nearest.norm()) {
                return Err(Error::NotDiagonalizable { matrix: label.to_string(), residual: gap / scale });
            }
            *center = *nearest;
        }
        let distinct = clusters.len();
        clusters.dedup_by(|x, y| x.0 == y.0);
        if clusters.len() != distinct {
            return Err(Error::NotDiagonalizable { matrix: label.to_string(), residual: f64::NAN });
        }
    }
    clusters.sort_by(|x, y| compare_eigenvalues(&x.0, &y.0, tol));

    let mut eigenvalues = Vec::with_capacity(n);
    let mut columns = Vec::with_capacity(n);
    for (lambda, mult) in &clusters {
        let shifted = m - DMatrix::identity(n, n) * *lambda;
        let svd = SVD::new(shifted, false, true);
        let v_t = svd.v_t.expect("requested V^H");
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            svd.singular_values[i].partial_cmp(&svd.singular_values[j]).unwrap_or(Ordering::Equal)
        });
        for &idx in order.iter().take(*mult) {
            let col = v_t.row(idx).adjoint();
            columns.push(normalize_phase(col));
            eigenvalues.push(*lambda);
        }
    }

    let v = ComplexMatrix::from_columns(&columns);
    let w = v.try_inverse().map_err(|_| Error::IllConditioned {
        matrix: label.to_string(),
        condition: f64::INFINITY,
    })?;
    let condition_estimate = v.norm_1() * w.norm_1();
    if !(condition_estimate <= MAX_CONDITION) {
        return Err(Error::IllConditioned { matrix: label.to_string(), condition: condition_estimate });
    }

    let projectors = cluster_projectors(a, &clusters, &v, &w);
    let decomposition = SpectralDecomposition {
        eigenvalues,
        right_eigenvectors: v,
        inverse_of_eigenvector_matrix: w,
        condition_estimate,
        projectors,
    };
    // Both routes must reproduce A and the projectors must be idempotent; a defective
    // matrix fails at least one of these.
    let via_vectors = ComplexMatrix::from_fn(n, |i, j| {
        (0..n).map(|k| decomposition.right_eigenvectors.get(i, k) * decomposition.eigenvalues[k]
            * decomposition.inverse_of_eigenvector_matrix.get(k, j)).sum()
    });
    let idempotence = decomposition
        .projectors
        .iter()
        .map(|(_, p)| (p * p).max_abs_diff(p) / p.max_abs().max(1.0))
        .fold(0.0, f64::max);
    let residual = (via_vectors.max_abs_diff(a) / scale)
        .max(decomposition.reconstruct().max_abs_diff(a) / scale)
        .max(idempotence);
    if !(residual <= 1e-6) {
        return Err(Error::NotDiagonalizable { matrix: label.to_string(), residual });
    }
    Ok(decomposition)
}
