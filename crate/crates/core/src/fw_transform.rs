//! Foldy-Wouthuysen (FW) transformation per momentum mode.
//!
//! `T` maps a mode Hamiltonian onto `ρ̃₃·E` (β·E for Dirac). For Dirac `T` is the
//! familiar unitary rotation; for GFV and ST it is pseudo-unitary with respect to
//! `ρ̃₃`, so `T⁻¹ = ρ̃₃ T† ρ̃₃`.
//!
//! The FW transformation is unique only up to rotations inside each energy sector.
//! The gauge used here: the columns of `T⁻¹` are built sector by sector from
//! `Λ±e_j` by pivoted Gram-Schmidt in the metric, each normalized to metric norm ±1
//! with its pivot component real and positive. Column `c` pivots on `e_c` whenever
//! that candidate is not much weaker than the best one, so diagonal entries are
//! positive where possible. For Dirac this reproduces the closed
//! form `((E + m) + βα·p)/√(2E(E + m))` exactly.

use nalgebra::DVector;

use crate::dynamics::energy_projectors;
use crate::error::{Error, Result};
use crate::operator_core::{c, commutator, dirac_matrices, levi_civita, ComplexMatrix, C64, I};
use crate::representations::{Momentum, ModeOperators, RepresentationKind};

#[derive(Debug, Clone)]
pub struct FwTransform {
    /// `T`.
    pub forward: ComplexMatrix,
    /// `T⁻¹`.
    pub inverse: ComplexMatrix,
    pub kind: RepresentationKind,
    /// `true` for GFV and ST, where `T⁻¹ = ρ̃₃ T† ρ̃₃` rather than `T†`.
    pub is_pseudo_unitary: bool,
}

impl FwTransform {
    /// `T O T⁻¹`.
    pub fn apply(&self, op: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.forward.check_same_dim(op)?;
        Ok(&(&self.forward * op) * &self.inverse)
    }

    /// `T⁻¹ O T`.
    pub fn apply_inverse(&self, op: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.forward.check_same_dim(op)?;
        Ok(&(&self.inverse * op) * &self.forward)
    }

    /// `max |T T⁻¹ − I|`.
    pub fn inverse_residual(&self) -> f64 {
        (&self.forward * &self.inverse).max_abs_diff(&ComplexMatrix::identity(self.forward.dim()))
    }

    /// Deviation of `T⁻¹` from `T†` (Dirac) or `ρ̃₃ T† ρ̃₃` (GFV, ST).
    pub fn unitarity_residual(&self) -> f64 {
        let adj = self.forward.adjoint();
        let expected = if self.is_pseudo_unitary {
            let m = self.kind.metric();
            &(&m * &adj) * &m
        } else {
            adj
        };
        self.inverse.max_abs_diff(&expected)
    }
}

/// `T O T⁻¹`.
pub fn transform_operator(t: &FwTransform, op: &ComplexMatrix) -> Result<ComplexMatrix> {
    t.apply(op)
}

/// FW transformation of a mode: the closed form for Dirac, the sector construction otherwise.
pub fn fw_diagonalize(mode: &ModeOperators) -> Result<FwTransform> {
    match mode.kind {
        RepresentationKind::Dirac => Ok(dirac_fw_closed_form(mode.mass, mode.momentum)),
        _ => spectral_fw_transform(mode),
    }
}

/// `((E + m) ± βα·p)/√(2E(E + m))`.
pub fn dirac_fw_closed_form(m: f64, p: Momentum) -> FwTransform {
    let d = dirac_matrices();
    let e = (m * m + p.iter().map(|x| x * x).sum::<f64>()).sqrt();
    let alpha_p = d.alpha.iter().zip(p).fold(ComplexMatrix::zeros(4), |acc, (a, pk)| &acc + &a.scale_re(pk));
    let odd = &d.beta * &alpha_p;
    let even = ComplexMatrix::identity(4).scale_re(e + m);
    let norm = 1.0 / (2.0 * e * (e + m)).sqrt();
    FwTransform {
        forward: (&even + &odd).scale_re(norm),
        inverse: (&even - &odd).scale_re(norm),
        kind: RepresentationKind::Dirac,
        is_pseudo_unitary: false,
    }
}

/// Sector-by-sector construction from the energy projectors; used for every kind
/// (and as the cross-check of the Dirac closed form).
pub fn spectral_fw_transform(mode: &ModeOperators) -> Result<FwTransform> {
    let n = mode.dim();
    let half = n / 2;
    let metric = mode.metric();
    let projectors = energy_projectors(mode)?;
    let label = || format!("H[{}]", mode.descriptor());

    let mut columns: Vec<DVector<C64>> = Vec::with_capacity(n);
    let mut signs = Vec::with_capacity(n);
    for projector in [&projectors.lambda_plus, &projectors.lambda_minus] {
        let mut sector: Vec<DVector<C64>> = Vec::with_capacity(half);
        let mut used = vec![false; n];
        while sector.len() < half {
            let diagonal = columns.len() + sector.len();
            let candidates: Vec<(usize, DVector<C64>, f64)> = (0..n)
                .filter(|&j| !used[j])
                .map(|j| {
                    let mut u = projector.column(j);
                    for q in &sector {
                        let overlap = metric_inner(&metric, q, &u) / metric_inner(&metric, q, q);
                        u -= q * overlap;
                    }
                    let size = metric_inner(&metric, &u, &u).re.abs();
                    (j, u, size)
                })
                .collect();
            let largest = candidates.iter().map(|x| x.2).fold(0.0, f64::max);
            // Pivot on the column's own diagonal index unless it is much weaker than the
            // best candidate; otherwise on the largest (lowest index among near-ties).
            let own = candidates.iter().position(|x| x.0 == diagonal && x.2 >= 0.25 * largest);
            let pick = own.or_else(|| candidates.iter().position(|x| x.2 >= largest * (1.0 - 1e-9)));
            let best = pick.map(|i| candidates[i].clone());
            let (j, u, size) = best.ok_or_else(|| Error::NotDiagonalizable { matrix: label(), residual: f64::NAN })?;
            if size <= 1e-12 {
                return Err(Error::NotDiagonalizable { matrix: label(), residual: size });
            }
            used[j] = true;
            let sign = metric_inner(&metric, &u, &u).re.signum();
            let pivot = u[j];
            let phase = pivot.conj() / pivot.norm();
            sector.push(u * (phase / size.sqrt()));
            signs.push(sign);
        }
        columns.extend(sector);
    }

    // V†MV = D with D the sector signs, so V⁻¹ = D V† M.
    let v = ComplexMatrix::from_columns(&columns);
    let d = ComplexMatrix::diagonal(&signs.iter().map(|&s| c(s, 0.0)).collect::<Vec<_>>());
    let t = &(&d * &v.adjoint()) * &metric;
    let expected_signs = match mode.kind {
        RepresentationKind::Dirac => ComplexMatrix::identity(n),
        _ => mode.kind.sector_sign(),
    };
    if !d.approx_eq(&expected_signs, 0.0) {
        return Err(Error::NotDiagonalizable { matrix: label(), residual: d.max_abs_diff(&expected_signs) });
    }
    Ok(FwTransform { forward: t, inverse: v, kind: mode.kind, is_pseudo_unitary: mode.kind != RepresentationKind::Dirac })
}

fn metric_inner(metric: &ComplexMatrix, a: &DVector<C64>, b: &DVector<C64>) -> C64 {
    a.dotc(&metric.apply(b))
}

/// `T H T⁻¹`.
pub fn fw_hamiltonian(mode: &ModeOperators, t: &FwTransform) -> Result<ComplexMatrix> {
    t.apply(&mode.hamiltonian)
}

/// Velocity operator of the FW representation, `i[H_FW, r]`.
///
/// The transported velocity `T v_i T⁻¹` still has a part odd in `ρ̃₃` (the image of the
/// trembling term); the FW position differs from the transported one by exactly the
/// amount that cancels it. What remains is the sector-diagonal part
/// `(X + ρ̃₃Xρ̃₃)/2` of `X = T v_i T⁻¹`.
pub fn fw_velocity(mode: &ModeOperators, t: &FwTransform) -> Result<[ComplexMatrix; 3]> {
    let sign = mode.kind.sector_sign();
    let even = |v: &ComplexMatrix| -> Result<ComplexMatrix> {
        let x = t.apply(v)?;
        Ok((&x + &(&(&sign * &x) * &sign)).scale_re(0.5))
    };
    let [a, b, c] = &mode.velocity;
    Ok([even(a)?, even(b)?, even(c)?])
}

/// `p_i H_FW⁻¹ = ρ̃₃ p_i / E`, what the FW velocity must reduce to.
pub fn fw_velocity_expected(mode: &ModeOperators) -> [ComplexMatrix; 3] {
    let sign = mode.kind.sector_sign();
    mode.momentum.map(|pk| sign.scale_re(pk / mode.energy))
}

/// Residuals of one FW transformation, all as max-abs entry differences.
#[derive(Debug, Clone, Copy)]
pub struct FwResiduals {
    /// `T T⁻¹ − I`.
    pub inverse: f64,
    /// `T⁻¹ − T†` or `T⁻¹ − ρ̃₃T†ρ̃₃`.
    pub unitarity: f64,
    /// `T H T⁻¹ − ρ̃₃E`.
    pub hamiltonian: f64,
    /// `v_FW − p H_FW⁻¹`.
    pub velocity: f64,
    /// `[H_FW, v_FW]`.
    pub commutator: f64,
}

pub fn fw_residuals(mode: &ModeOperators, t: &FwTransform) -> Result<FwResiduals> {
    let h_fw = fw_hamiltonian(mode, t)?;
    let exact = mode.kind.sector_sign().scale_re(mode.energy);
    let v_fw = fw_velocity(mode, t)?;
    let expected = fw_velocity_expected(mode);
    let mut velocity = 0.0_f64;
    let mut comm = 0.0_f64;
    for k in 0..3 {
        velocity = velocity.max(v_fw[k].max_abs_diff(&expected[k]));
        comm = comm.max(commutator(&h_fw, &v_fw[k])?.max_abs());
    }
    Ok(FwResiduals {
        inverse: t.inverse_residual(),
        unitarity: t.unitarity_residual(),
        hamiltonian: h_fw.max_abs_diff(&exact),
        velocity,
        commutator: comm,
    })
}

/// Matrix part of the Dirac mean position operator at fixed momentum:
/// `X_i = r_i + matrix_part[i]`.
#[derive(Debug, Clone)]
pub struct MeanPositionOperator {
    pub matrix_part: [ComplexMatrix; 3],
    /// `ε = √(m² + p²)`.
    pub epsilon: f64,
    pub mass: f64,
    pub momentum: Momentum,
}

/// `−(Σ×p)_i/(2ε(ε+m)) + iγ_i/(2ε) − i(γ·p)p_i/(2ε²(ε+m))`.
pub fn mean_position_matrix(m: f64, p: Momentum) -> Result<MeanPositionOperator> {
    let eps = (m * m + p.iter().map(|x| x * x).sum::<f64>()).sqrt();
    if !(eps > 0.0) || !eps.is_finite() || m < 0.0 {
        return Err(Error::DegenerateMode { mass: m, momentum: (eps * eps - m * m).max(0.0).sqrt() });
    }
    let d = dirac_matrices();
    let gamma_p = d.gamma.iter().zip(p).fold(ComplexMatrix::zeros(4), |acc, (g, pk)| &acc + &g.scale_re(pk));
    let matrix_part = [0, 1, 2].map(|i| {
        let mut sigma_cross_p = ComplexMatrix::zeros(4);
        for j in 0..3 {
            for k in 0..3 {
                let eps_ijk = levi_civita(i, j, k);
                if eps_ijk != 0.0 {
                    sigma_cross_p += &d.sigma_big[j].scale_re(eps_ijk * p[k]);
                }
            }
        }
        let spin = sigma_cross_p.scale_re(-1.0 / (2.0 * eps * (eps + m)));
        let odd = d.gamma[i].scale(c(0.0, 1.0 / (2.0 * eps)));
        let correction = gamma_p.scale(c(0.0, -p[i] / (2.0 * eps * eps * (eps + m))));
        &(&spin + &odd) + &correction
    });
    Ok(MeanPositionOperator { matrix_part, epsilon: eps, mass: m, momentum: p })
}

/// `i[H_D, X_i] = α_i + i[H_D, matrix_part_i]`, the velocity of the mean position.
///
/// At fixed momentum `i[H, r_i] = ∂H/∂p_i`, which is `α_i` for Dirac.
pub fn mean_position_velocity(mode: &ModeOperators, x: &MeanPositionOperator) -> Result<[ComplexMatrix; 3]> {
    if mode.kind != RepresentationKind::Dirac {
        return Err(Error::Unsupported("the mean position operator is defined for the Dirac representation only".into()));
    }
    let mut out = mode.velocity.clone();
    for (v, xm) in out.iter_mut().zip(&x.matrix_part) {
        *v += &commutator(&mode.hamiltonian, xm)?.scale(I);
    }
    Ok(out)
}
