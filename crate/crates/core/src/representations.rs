//! Per-momentum-mode Hamiltonians and velocity operators for the Dirac,
//! generalized Feshbach-Villars (GFV) and Sakata-Taketani (ST) representations.
//!
//! At fixed momentum eigenvalue `p` every operator is a small matrix. The
//! Feshbach-Villars form is GFV with `N = m`. GFV and ST Hamiltonians are not
//! Hermitian but pseudo-Hermitian with respect to `ρ̃₃` (`ρ₃` or `ρ₃ ⊗ I₃`); states
//! in those representations are paired with that indefinite charge form.

use std::fmt;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::operator_core::{
    anticommutator, c, dirac_matrices, pauli_rho, rho3_metric, spectral_with_known_spectrum, spin1_matrices, ComplexMatrix,
    SpectralDecomposition, C64, I,
};

pub type Momentum = [f64; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RepresentationKind {
    Dirac,
    Gfv,
    SakataTaketani,
}

impl RepresentationKind {
    pub const ALL: [RepresentationKind; 3] =
        [RepresentationKind::Dirac, RepresentationKind::Gfv, RepresentationKind::SakataTaketani];

    pub fn dim(self) -> usize {
        match self {
            RepresentationKind::Dirac => 4,
            RepresentationKind::Gfv => 2,
            RepresentationKind::SakataTaketani => 6,
        }
    }

    /// The metric `M` of the expectation inner product: identity for Dirac, `ρ̃₃` otherwise.
    pub fn metric(self) -> ComplexMatrix {
        match self {
            RepresentationKind::Dirac => ComplexMatrix::identity(4),
            RepresentationKind::Gfv => rho3_metric(1),
            RepresentationKind::SakataTaketani => rho3_metric(3),
        }
    }

    /// `ρ̃₃`, the sign pattern of the diagonal FW Hamiltonian (β for Dirac).
    pub fn sector_sign(self) -> ComplexMatrix {
        match self {
            RepresentationKind::Dirac => dirac_matrices().beta,
            RepresentationKind::Gfv => rho3_metric(1),
            RepresentationKind::SakataTaketani => rho3_metric(3),
        }
    }

    pub fn default_metric(self) -> Metric {
        match self {
            RepresentationKind::Dirac => Metric::Euclidean,
            _ => Metric::ChargeForm,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RepresentationKind::Dirac => "Dirac",
            RepresentationKind::Gfv => "GFV",
            RepresentationKind::SakataTaketani => "SakataTaketani",
        }
    }
}

impl fmt::Display for RepresentationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for RepresentationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dirac" => Ok(RepresentationKind::Dirac),
            "gfv" | "fv" | "feshbach-villars" => Ok(RepresentationKind::Gfv),
            "st" | "sakatataketani" | "sakata-taketani" | "proca" => Ok(RepresentationKind::SakataTaketani),
            other => Err(Error::Parameter(format!("unknown representation kind '{other}'"))),
        }
    }
}

/// Everything that identifies a mode apart from its matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeDescriptor {
    pub kind: RepresentationKind,
    pub mass: f64,
    pub momentum: Momentum,
    pub gfv_n: Option<f64>,
}

impl fmt::Display for ModeDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [px, py, pz] = self.momentum;
        write!(f, "kind={} m={} p=({px},{py},{pz})", self.kind, self.mass)?;
        if let Some(n) = self.gfv_n {
            write!(f, " N={n}")?;
        }
        Ok(())
    }
}

/// One momentum mode's operator set.
#[derive(Debug, Clone)]
pub struct ModeOperators {
    pub kind: RepresentationKind,
    pub mass: f64,
    pub momentum: Momentum,
    /// Present only for GFV.
    pub gfv_n: Option<f64>,
    pub hamiltonian: ComplexMatrix,
    pub velocity: [ComplexMatrix; 3],
    /// `√(m² + p²)`.
    pub energy: f64,
}

fn momentum_sq(p: &Momentum) -> f64 {
    p.iter().map(|x| x * x).sum()
}

fn check_mode(m: f64, p: &Momentum) -> Result<f64> {
    if !m.is_finite() || m < 0.0 {
        return Err(Error::Parameter(format!("mass must be finite and non-negative, got {m}")));
    }
    if p.iter().any(|x| !x.is_finite()) {
        return Err(Error::Parameter(format!("momentum must be finite, got {p:?}")));
    }
    let energy = (m * m + momentum_sq(p)).sqrt();
    if energy == 0.0 {
        return Err(Error::DegenerateMode { mass: m, momentum: momentum_sq(p).sqrt() });
    }
    Ok(energy)
}

/// Reason massless spin-1 modes are refused.
pub const MASSLESS_ST_MESSAGE: &str =
    "the Sakata-Taketani transformation cannot be carried out for a massless spin-1 particle";

pub fn build_dirac(m: f64, p: Momentum) -> Result<ModeOperators> {
    let energy = check_mode(m, &p)?;
    let d = dirac_matrices();
    let mut h = d.beta.scale_re(m);
    for (alpha, pk) in d.alpha.iter().zip(p) {
        h += &alpha.scale_re(pk);
    }
    Ok(ModeOperators {
        kind: RepresentationKind::Dirac,
        mass: m,
        momentum: p,
        gfv_n: None,
        hamiltonian: h,
        velocity: d.alpha,
        energy,
    })
}

/// `H = ρ₃(p² + m² + N²)/2N + iρ₂(p² + m² − N²)/2N`, `v_i = (ρ₃ + iρ₂) p_i / N`.
pub fn build_gfv(m: f64, p: Momentum, n: f64) -> Result<ModeOperators> {
    if !n.is_finite() || n <= 0.0 {
        return Err(Error::Parameter(format!("GFV parameter N must be positive, got {n}")));
    }
    let energy = check_mode(m, &p)?;
    let rho = pauli_rho();
    let e2 = m * m + momentum_sq(&p);
    let diag = (e2 + n * n) / (2.0 * n);
    let off = (e2 - n * n) / (2.0 * n);
    let h = &rho.rho3.scale_re(diag) + &rho.rho2.scale(c(0.0, off));
    let nilpotent = &rho.rho3 + &rho.rho2.scale(I);
    let velocity = p.map(|pk| nilpotent.scale_re(pk / n));
    Ok(ModeOperators {
        kind: RepresentationKind::Gfv,
        mass: m,
        momentum: p,
        gfv_n: Some(n),
        hamiltonian: h,
        velocity,
        energy,
    })
}

/// Feshbach-Villars form: GFV with `N = m`.
pub fn build_fv(m: f64, p: Momentum) -> Result<ModeOperators> {
    build_gfv(m, p, m)
}

/// `S·p`.
fn spin_dot(s: &[ComplexMatrix; 3], p: &Momentum) -> ComplexMatrix {
    s.iter().zip(p).fold(ComplexMatrix::zeros(3), |acc, (si, pk)| &acc + &si.scale_re(*pk))
}

/// `H = ρ₃ m − iρ₂ (S·p)²/m + (ρ₃ + iρ₂) p²/2m` on (ρ-space) ⊗ (spin space).
///
/// The velocity is the momentum derivative of `H`, i.e. `i[H, r_i]` at fixed mode:
/// `v_i = −iρ₂ {S_i, S·p}/m + (ρ₃ + iρ₂) p_i/m`.
pub fn build_st(m: f64, p: Momentum) -> Result<ModeOperators> {
    if m == 0.0 {
        return Err(Error::Unsupported(MASSLESS_ST_MESSAGE.to_string()));
    }
    let energy = check_mode(m, &p)?;
    let rho = pauli_rho();
    let s = spin1_matrices().s;
    let id3 = ComplexMatrix::identity(3);
    let sp = spin_dot(&s, &p);
    let sp2 = &sp * &sp;
    let p2 = momentum_sq(&p);
    let nilpotent = &rho.rho3 + &rho.rho2.scale(I);
    let minus_i_rho2 = rho.rho2.scale(-I);

    let h = &(&rho.rho3.kron(&id3.scale_re(m)) + &minus_i_rho2.kron(&sp2.scale_re(1.0 / m)))
        + &nilpotent.kron(&id3.scale_re(p2 / (2.0 * m)));

    let velocity = [0, 1, 2].map(|k| {
        let spin_part = anticommutator(&s[k], &sp).expect("3x3").scale_re(1.0 / m);
        &minus_i_rho2.kron(&spin_part) + &nilpotent.kron(&id3.scale_re(p[k] / m))
    });

    Ok(ModeOperators {
        kind: RepresentationKind::SakataTaketani,
        mass: m,
        momentum: p,
        gfv_n: None,
        hamiltonian: h,
        velocity,
        energy,
    })
}

impl ModeOperators {
    /// Dispatch on kind; `gfv_n` is required for GFV and ignored otherwise.
    pub fn build(kind: RepresentationKind, m: f64, p: Momentum, gfv_n: Option<f64>) -> Result<Self> {
        match kind {
            RepresentationKind::Dirac => build_dirac(m, p),
            RepresentationKind::Gfv => {
                let n = gfv_n.ok_or_else(|| Error::Parameter("GFV requires the parameter N".into()))?;
                build_gfv(m, p, n)
            }
            RepresentationKind::SakataTaketani => build_st(m, p),
        }
    }

    pub fn descriptor(&self) -> ModeDescriptor {
        ModeDescriptor { kind: self.kind, mass: self.mass, momentum: self.momentum, gfv_n: self.gfv_n }
    }

    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    pub fn metric(&self) -> ComplexMatrix {
        self.kind.metric()
    }

    /// Eigendecomposition of `H`, with the numerically found spectrum snapped onto the
    /// exact `{+E, −E}`.
    pub fn spectral(&self) -> Result<SpectralDecomposition> {
        let e = self.energy;
        spectral_with_known_spectrum(&self.hamiltonian, &format!("H[{}]", self.descriptor()), &[c(e, 0.0), c(-e, 0.0)])
    }

    /// `H⁻¹`, which equals `H / E²` because `H² = E²` for every free mode.
    pub fn inverse_hamiltonian(&self) -> Result<ComplexMatrix> {
        self.hamiltonian.try_inverse()
    }
}

/// Which inner product a state's expectations use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Euclidean,
    /// `ρ̃₃` on two-component representations; the identity on Dirac spinors.
    ChargeForm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    pub components: DVector<C64>,
    pub metric: Metric,
}

impl QuantumState {
    /// A state in `kind` with that representation's default metric.
    pub fn new(kind: RepresentationKind, components: DVector<C64>) -> Result<Self> {
        if components.len() != kind.dim() {
            return Err(Error::Shape { left: components.len(), right: kind.dim() });
        }
        Ok(QuantumState { components, metric: kind.default_metric() })
    }

    pub fn with_metric(components: DVector<C64>, metric: Metric) -> Self {
        QuantumState { components, metric }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn metric_matrix(&self) -> ComplexMatrix {
        let n = self.dim();
        match self.metric {
            Metric::ChargeForm if n % 2 == 0 && n != 4 => rho3_metric(n / 2),
            _ => ComplexMatrix::identity(n),
        }
    }

    /// `⟨self|M|other⟩`.
    pub fn inner(&self, other: &DVector<C64>) -> C64 {
        self.components.dotc(&self.metric_matrix().apply(other))
    }

    /// `⟨ψ|M|ψ⟩`, real up to rounding.
    pub fn norm(&self) -> f64 {
        self.inner(&self.components).re
    }
}

/// Split a Klein-Gordon value pair into GFV components:
/// `φ = (ψ + iψ̇/N)/2`, `χ = (ψ − iψ̇/N)/2`, with `i_dpsi_dt` the value of `i∂ψ/∂t`.
pub fn gfv_split(psi: C64, i_dpsi_dt: C64, n: f64) -> Result<QuantumState> {
    check_n(n)?;
    let phi = (psi + i_dpsi_dt / n) * 0.5;
    let chi = (psi - i_dpsi_dt / n) * 0.5;
    QuantumState::new(RepresentationKind::Gfv, DVector::from_vec(vec![phi, chi]))
}

/// Recover `(ψ, i∂ψ/∂t)` from GFV components at parameter `N`.
pub fn gfv_merge(state: &QuantumState, n: f64) -> Result<(C64, C64)> {
    check_n(n)?;
    if state.dim() != 2 {
        return Err(Error::Shape { left: state.dim(), right: 2 });
    }
    let (phi, chi) = (state.components[0], state.components[1]);
    Ok((phi + chi, (phi - chi) * n))
}

fn check_n(n: f64) -> Result<()> {
    if !n.is_finite() || n <= 0.0 {
        return Err(Error::Parameter(format!("GFV parameter N must be positive, got {n}")));
    }
    Ok(())
}

/// The 2×2 map taking GFV components at `N₁` to components at `N₂`.
pub fn gfv_rebase_matrix(n1: f64, n2: f64) -> Result<ComplexMatrix> {
    check_n(n1)?;
    check_n(n2)?;
    let r = n1 / n2;
    let a = c(0.5 * (1.0 + r), 0.0);
    let b = c(0.5 * (1.0 - r), 0.0);
    Ok(ComplexMatrix::from_row_major(&[a, b, b, a]))
}

pub fn gfv_rebase(state: &QuantumState, n1: f64, n2: f64) -> Result<QuantumState> {
    let (psi, i_dpsi_dt) = gfv_merge(state, n1)?;
    let mut out = gfv_split(psi, i_dpsi_dt, n2)?;
    out.metric = state.metric;
    Ok(out)
}

/// `⟨ψ|M O|ψ⟩ / ⟨ψ|M|ψ⟩`.
pub fn charge_expectation(state: &QuantumState, observable: &ComplexMatrix) -> Result<C64> {
    if observable.dim() != state.dim() {
        return Err(Error::Shape { left: state.dim(), right: observable.dim() });
    }
    let norm = state.inner(&state.components);
    let scale = state.components.norm_squared();
    if norm.norm() <= 1e-14 * scale || scale == 0.0 {
        return Err(Error::NullNorm(norm.re));
    }
    Ok(state.inner(&observable.apply(&state.components)) / norm)
}

/// `M H† M`, which equals `H` for a pseudo-Hermitian Hamiltonian.
pub fn pseudo_adjoint(kind: RepresentationKind, op: &ComplexMatrix) -> ComplexMatrix {
    let m = kind.metric();
    &(&m * &op.adjoint()) * &m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator_core::{spectral, ONE, ZERO};

    fn anticomm_residual(mode: &ModeOperators) -> f64 {
        (0..3)
            .map(|k| {
                let ac = anticommutator(&mode.velocity[k], &mode.hamiltonian).unwrap();
                let target = ComplexMatrix::identity(mode.dim()).scale_re(2.0 * mode.momentum[k]);
                ac.max_abs_diff(&target)
            })
            .fold(0.0, f64::max)
    }

    fn sorted_re(mode: &ModeOperators) -> Vec<f64> {
        spectral(&mode.hamiltonian).unwrap().eigenvalues.iter().map(|z| z.re).collect()
    }

    #[test]
    fn dirac_at_rest_is_beta() {
        let mode = build_dirac(1.0, [0.0; 3]).unwrap();
        let d = dirac_matrices();
        assert_eq!(mode.hamiltonian, d.beta);
        assert_eq!(mode.velocity, d.alpha);
        assert_eq!(sorted_re(&mode), vec![1.0, 1.0, -1.0, -1.0]);
    }

    #[test]
    fn dirac_three_four_five() {
        let mode = build_dirac(3.0, [4.0, 0.0, 0.0]).unwrap();
        assert_eq!(mode.energy, 5.0);
        for (got, want) in sorted_re(&mode).iter().zip([5.0, 5.0, -5.0, -5.0]) {
            assert!((got - want).abs() < 1e-13);
        }
        let ac = anticommutator(&mode.velocity[0], &mode.hamiltonian).unwrap();
        assert!(ac.approx_eq(&ComplexMatrix::identity(4).scale_re(8.0), 1e-14));
    }

    #[test]
    fn massless_dirac_at_rest_is_degenerate() {
        assert!(matches!(build_dirac(0.0, [0.0; 3]), Err(Error::DegenerateMode { .. })));
        assert!(matches!(build_gfv(0.0, [0.0; 3], 1.0), Err(Error::DegenerateMode { .. })));
    }

    #[test]
    fn gfv_with_n_equal_m_is_feshbach_villars() {
        let (m, p) = (2.0, [0.5, -1.0, 0.25]);
        let mode = build_fv(m, p).unwrap();
        let rho = pauli_rho();
        let p2 = momentum_sq(&p);
        let expected = &rho.rho3.scale_re(m) + &(&rho.rho3 + &rho.rho2.scale(I)).scale_re(p2 / (2.0 * m));
        assert!(mode.hamiltonian.approx_eq(&expected, 1e-15));
    }

    #[test]
    fn massless_gfv_at_n_equal_p_is_diagonal() {
        let mode = build_gfv(0.0, [0.0, 2.0, 0.0], 2.0).unwrap();
        assert_eq!(mode.hamiltonian, pauli_rho().rho3.scale_re(2.0));
        assert_eq!(sorted_re(&mode), vec![2.0, -2.0]);
    }

    #[test]
    fn gfv_spectrum_is_n_independent() {
        let mode = build_gfv(3.0, [0.0, 4.0, 0.0], 17.0).unwrap();
        for (got, want) in sorted_re(&mode).iter().zip([5.0, -5.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        let ac = anticommutator(&mode.velocity[1], &mode.hamiltonian).unwrap();
        assert!(ac.approx_eq(&ComplexMatrix::identity(2).scale_re(8.0), 1e-13));
    }

    #[test]
    fn gfv_rejects_nonpositive_n() {
        assert!(matches!(build_gfv(1.0, [1.0, 0.0, 0.0], 0.0), Err(Error::Parameter(_))));
        assert!(matches!(build_gfv(1.0, [1.0, 0.0, 0.0], -2.0), Err(Error::Parameter(_))));
        assert!(matches!(gfv_split(ONE, ONE, 0.0), Err(Error::Parameter(_))));
    }

    #[test]
    fn st_at_rest() {
        let mode = build_st(1.0, [0.0; 3]).unwrap();
        assert_eq!(mode.hamiltonian, rho3_metric(3));
        for v in &mode.velocity {
            assert_eq!(v.max_abs(), 0.0);
        }
    }

    #[test]
    fn st_reference_mode() {
        let mode = build_st(3.0, [0.0, 0.0, 4.0]).unwrap();
        let ac = anticommutator(&mode.velocity[2], &mode.hamiltonian).unwrap();
        assert!(ac.approx_eq(&ComplexMatrix::identity(6).scale_re(8.0), 1e-13));
        for (got, want) in sorted_re(&mode).iter().zip([5.0, 5.0, 5.0, -5.0, -5.0, -5.0]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn massless_st_is_unsupported() {
        let err = build_st(0.0, [1.0, 0.0, 0.0]).unwrap_err();
        assert!(err.is_unsupported_physics());
        assert!(err.to_string().contains("cannot be carried out for a massless spin-1 particle"));
    }

    #[test]
    fn st_velocity_matches_finite_difference_of_h() {
        let (m, p) = (1.7, [0.4, -1.3, 2.2]);
        let mode = build_st(m, p).unwrap();
        let h = 1e-5;
        for k in 0..3 {
            let mut plus = p;
            let mut minus = p;
            plus[k] += h;
            minus[k] -= h;
            let fd = (&build_st(m, plus).unwrap().hamiltonian - &build_st(m, minus).unwrap().hamiltonian)
                .scale_re(1.0 / (2.0 * h));
            assert!(mode.velocity[k].approx_eq(&fd, 1e-8), "axis {k}");
        }
    }

    #[test]
    fn pseudo_hermiticity() {
        let p = [0.3, 1.1, -2.0];
        for mode in [build_gfv(1.5, p, 0.7).unwrap(), build_st(1.5, p).unwrap(), build_dirac(1.5, p).unwrap()] {
            let back = pseudo_adjoint(mode.kind, &mode.hamiltonian);
            assert!(back.approx_eq(&mode.hamiltonian, 1e-14), "{}", mode.kind);
        }
        let d = build_dirac(1.5, p).unwrap();
        assert!(d.hamiltonian.adjoint().approx_eq(&d.hamiltonian, 0.0));
        assert!(anticomm_residual(&d) < 1e-14);
    }

    #[test]
    fn gfv_split_examples() {
        let n = 2.5;
        let up = gfv_split(ONE, c(n, 0.0), n).unwrap();
        assert_eq!(up.components.as_slice(), &[ONE, ZERO]);
        let down = gfv_split(ONE, c(-n, 0.0), n).unwrap();
        assert_eq!(down.components.as_slice(), &[ZERO, ONE]);

        // Plane wave: iψ̇ = Eψ gives φ/χ = (N + E)/(N − E).
        let (e, psi) = (1.3, c(0.2, -0.7));
        let s = gfv_split(psi, psi * e, n).unwrap();
        let ratio = s.components[0] / s.components[1];
        assert!((ratio - c((n + e) / (n - e), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn gfv_rebase_examples() {
        let (n1, n2) = (1.5, 4.0);
        let s = QuantumState::new(RepresentationKind::Gfv, DVector::from_vec(vec![ONE, ZERO])).unwrap();
        assert_eq!(gfv_rebase(&s, n1, n1).unwrap(), s);
        let r = gfv_rebase(&s, n1, n2).unwrap();
        assert!((r.components[0] - c((n2 + n1) / (2.0 * n2), 0.0)).norm() < 1e-15);
        assert!((r.components[1] - c((n2 - n1) / (2.0 * n2), 0.0)).norm() < 1e-15);
        let t = gfv_rebase_matrix(n1, n2).unwrap();
        assert!(t.apply(&s.components).iter().zip(r.components.iter()).all(|(a, b)| (a - b).norm() < 1e-15));
    }

    #[test]
    fn gfv_rebase_carries_eigenstates() {
        let (m, p, n1, n2) = (1.0, [0.7, 0.0, 0.0], 0.5, 3.0);
        let h1 = build_gfv(m, p, n1).unwrap();
        let h2 = build_gfv(m, p, n2).unwrap();
        let s1 = spectral(&h1.hamiltonian).unwrap();
        let u1 = QuantumState::new(RepresentationKind::Gfv, s1.right_eigenvectors.column(0)).unwrap();
        let u2 = gfv_rebase(&u1, n1, n2).unwrap();
        let hu = h2.hamiltonian.apply(&u2.components);
        let e = h1.energy;
        assert!((hu - u2.components.scale(e)).norm() < 1e-13);
    }

    #[test]
    fn expectation_examples() {
        let s = QuantumState::new(RepresentationKind::Gfv, DVector::from_vec(vec![c(0.3, 0.1), c(-1.0, 0.4)]))
            .unwrap();
        let one = charge_expectation(&s, &ComplexMatrix::identity(2)).unwrap();
        assert!((one - ONE).norm() < 1e-15);

        let mode = build_gfv(2.0, [1.0, 1.0, 0.0], 0.9).unwrap();
        let sp = spectral(&mode.hamiltonian).unwrap();
        let plus = QuantumState::new(RepresentationKind::Gfv, sp.right_eigenvectors.column(0)).unwrap();
        let e = charge_expectation(&plus, &mode.hamiltonian).unwrap();
        assert!((e - c(mode.energy, 0.0)).norm() < 1e-12);

        let dirac = build_dirac(3.0, [4.0, 0.0, 0.0]).unwrap();
        let sp = spectral(&dirac.hamiltonian).unwrap();
        let plus = QuantumState::new(RepresentationKind::Dirac, sp.right_eigenvectors.column(0)).unwrap();
        let v = charge_expectation(&plus, &dirac.velocity[0]).unwrap();
        assert!((v - c(0.8, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn null_charge_norm_is_an_error() {
        let s = QuantumState::new(RepresentationKind::Gfv, DVector::from_vec(vec![ONE, ONE])).unwrap();
        assert!(matches!(charge_expectation(&s, &ComplexMatrix::identity(2)), Err(Error::NullNorm(_))));
    }
}
