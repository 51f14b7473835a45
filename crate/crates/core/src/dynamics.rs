//! Heisenberg-picture dynamics of a single mode: acceleration, brute-force operator
//! evolution, the closed-form trembling solutions, energy-sector projectors and
//! expectation-value trajectories.
//!
//! The closed forms are read as matrix identities at fixed momentum. With
//! `{v_i, H} = 2p_i` the Heisenberg equation `dv_i/dt = 2i(p_i − v_i H)` integrates to
//!
//! ```text
//! v_i(t)  = p_i H⁻¹ + (v_i(0) − p_i H⁻¹) e^{−2iHt}
//! Δr_i(t) = p_i H⁻¹ t + (i/2)(v_i(0) − p_i H⁻¹)(e^{−2iHt} − 1) H⁻¹
//! ```
//!
//! with every function of `H` acting from the right. On an energy eigenvector this
//! reduces to the scalar formula with `H → ±E`.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::fit::{fit_tones, ToneFit};
use crate::operator_core::{c, commutator, ComplexMatrix, MatrixExponential, C64, I};
use crate::representations::{charge_expectation, ModeDescriptor, ModeOperators, QuantumState};

/// Number of samples on the default trajectory grid.
pub const DEFAULT_SAMPLES: usize = 512;

/// `a_i = i[H, v_i]`.
pub fn acceleration(mode: &ModeOperators) -> [ComplexMatrix; 3] {
    mode.velocity.each_ref().map(|v| commutator(&mode.hamiltonian, v).expect("same mode").scale(I))
}

/// `2i(p_i − v_i H)`, the right-hand side the acceleration must equal.
pub fn acceleration_identity(mode: &ModeOperators) -> [ComplexMatrix; 3] {
    let id = ComplexMatrix::identity(mode.dim());
    [0, 1, 2].map(|k| {
        let vh = &mode.velocity[k] * &mode.hamiltonian;
        (&id.scale_re(mode.momentum[k]) - &vh).scale(c(0.0, 2.0))
    })
}

/// `s ↦ exp(sH)` through the mode's exact-spectrum decomposition, falling back to
/// the general matrix exponential.
pub fn mode_exponential(mode: &ModeOperators) -> MatrixExponential {
    match mode.spectral() {
        Ok(decomposition) => MatrixExponential::Spectral(decomposition),
        Err(_) => MatrixExponential::new(&mode.hamiltonian),
    }
}

/// Brute-force `exp(iHt) O exp(−iHt)` with the eigenbasis of `H` computed once.
#[derive(Debug, Clone)]
pub struct HeisenbergEvolver {
    dim: usize,
    exp: MatrixExponential,
}

impl HeisenbergEvolver {
    pub fn new(mode: &ModeOperators) -> Self {
        HeisenbergEvolver { dim: mode.dim(), exp: mode_exponential(mode) }
    }

    pub fn evolve(&self, observable: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
        if observable.dim() != self.dim {
            return Err(Error::Shape { left: self.dim, right: observable.dim() });
        }
        let forward = self.exp.eval(c(0.0, t));
        let backward = self.exp.eval(c(0.0, -t));
        Ok(&(&forward * observable) * &backward)
    }

    /// `exp(−iHt)`.
    pub fn propagator(&self, t: f64) -> ComplexMatrix {
        self.exp.eval(c(0.0, -t))
    }
}

pub fn evolve_heisenberg(mode: &ModeOperators, observable: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    HeisenbergEvolver::new(mode).evolve(observable, t)
}

/// Precomputed pieces of the closed-form solutions for one mode.
#[derive(Debug, Clone)]
pub struct ClosedForm {
    momentum: [f64; 3],
    inverse_h: ComplexMatrix,
    /// `v_i(0) − p_i H⁻¹`, the oscillating part of the velocity.
    oscillating: [ComplexMatrix; 3],
    exp: MatrixExponential,
}

impl ClosedForm {
    pub fn new(mode: &ModeOperators) -> Result<Self> {
        let inverse_h = mode.inverse_hamiltonian()?;
        let oscillating = [0, 1, 2].map(|k| &mode.velocity[k] - &inverse_h.scale_re(mode.momentum[k]));
        Ok(ClosedForm {
            momentum: mode.momentum,
            inverse_h,
            oscillating,
            exp: mode_exponential(mode),
        })
    }

    /// `e^{−2iHt}`.
    fn phase(&self, t: f64) -> ComplexMatrix {
        self.exp.eval(c(0.0, -2.0 * t))
    }

    pub fn velocity(&self, t: f64) -> [ComplexMatrix; 3] {
        let phase = self.phase(t);
        [0, 1, 2].map(|k| &self.inverse_h.scale_re(self.momentum[k]) + &(&self.oscillating[k] * &phase))
    }

    pub fn displacement(&self, t: f64) -> [ComplexMatrix; 3] {
        let n = self.inverse_h.dim();
        let phase_minus_one = &self.phase(t) - &ComplexMatrix::identity(n);
        let tail = &phase_minus_one * &self.inverse_h;
        [0, 1, 2].map(|k| {
            let drift = self.inverse_h.scale_re(self.momentum[k] * t);
            let trembling = (&self.oscillating[k] * &tail).scale(c(0.0, 0.5));
            &drift + &trembling
        })
    }
}

pub fn velocity_closed_form(mode: &ModeOperators, t: f64) -> Result<[ComplexMatrix; 3]> {
    Ok(ClosedForm::new(mode)?.velocity(t))
}

pub fn displacement_closed_form(mode: &ModeOperators, t: f64) -> Result<[ComplexMatrix; 3]> {
    Ok(ClosedForm::new(mode)?.displacement(t))
}

/// Spectral projectors onto the `+E` and `−E` eigenspaces of a mode Hamiltonian.
#[derive(Debug, Clone)]
pub struct EnergyProjectors {
    pub lambda_plus: ComplexMatrix,
    pub lambda_minus: ComplexMatrix,
}

pub fn energy_projectors(mode: &ModeOperators) -> Result<EnergyProjectors> {
    let decomposition = mode.spectral()?;
    let positive = decomposition.eigenvalues.iter().filter(|z| z.re > 0.0).count();
    if 2 * positive != mode.dim() {
        return Err(Error::NotDiagonalizable {
            matrix: format!("H[{}]", mode.descriptor()),
            residual: f64::NAN,
        });
    }
    Ok(EnergyProjectors {
        lambda_plus: decomposition.projector(|z| z.re > 0.0),
        lambda_minus: decomposition.projector(|z| z.re < 0.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    Velocity(usize),
    /// Displacement `r(t) − r(0)`.
    Displacement(usize),
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observable::Velocity(k) => write!(f, "v{}", k + 1),
            Observable::Displacement(k) => write!(f, "dr{}", k + 1),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub samples: Vec<C64>,
    pub observable: Observable,
    pub mode: ModeDescriptor,
}

impl Trajectory {
    /// Fit `A + B e^{−iΩt} + C e^{iΩt}` to the samples.
    pub fn fit_frequency(&self) -> Result<ToneFit> {
        fit_tones(&self.times, &self.samples)
    }
}

/// `n` uniform samples over `[0, 10π/E]`: ten trembling periods.
pub fn default_time_grid(energy: f64, n: usize) -> Vec<f64> {
    uniform_grid(10.0 * PI / energy, n)
}

pub fn uniform_grid(t_max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Expectations of the closed-form velocity or displacement in `state` at each time.
pub fn expectation_trajectory(
    mode: &ModeOperators,
    state: &QuantumState,
    observable: Observable,
    times: &[f64],
) -> Result<Trajectory> {
    if state.dim() != mode.dim() {
        return Err(Error::Shape { left: state.dim(), right: mode.dim() });
    }
    let axis = match observable {
        Observable::Velocity(k) | Observable::Displacement(k) => k,
    };
    if axis > 2 {
        return Err(Error::Parameter(format!("axis index {axis} out of range")));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Parameter("trajectory times must be strictly increasing".into()));
    }
    let closed = ClosedForm::new(mode)?;
    let samples = times
        .iter()
        .map(|&t| {
            let op = match observable {
                Observable::Velocity(k) => closed.velocity(t)[k].clone(),
                Observable::Displacement(k) => closed.displacement(t)[k].clone(),
            };
            charge_expectation(state, &op)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory { times: times.to_vec(), samples, observable, mode: mode.descriptor() })
}

#[cfg(test)]
mod tests {
    use nalgebra::DVector;

    use super::*;
    use crate::operator_core::{dirac_matrices, mat_exp, pauli_rho, ONE};
    use crate::representations::{build_dirac, build_gfv, build_st, RepresentationKind};

    fn max_diff3(a: &[ComplexMatrix; 3], b: &[ComplexMatrix; 3]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x.max_abs_diff(y)).fold(0.0, f64::max)
    }

    #[test]
    fn dirac_trembles_at_rest() {
        let mode = build_dirac(1.0, [0.0; 3]).unwrap();
        let d = dirac_matrices();
        let a = acceleration(&mode);
        for k in 0..3 {
            assert!(a[k].approx_eq(&d.gamma[k].scale(c(0.0, 2.0)), 1e-15));
            assert!(a[k].max_abs() > 1.0);
        }
        assert!(max_diff3(&a, &acceleration_identity(&mode)) < 1e-15);
    }

    #[test]
    fn st_acceleration_identity() {
        let mode = build_st(3.0, [0.0, 0.0, 4.0]).unwrap();
        assert!(max_diff3(&acceleration(&mode), &acceleration_identity(&mode)) < 1e-12);
    }

    #[test]
    fn projected_acceleration_vanishes() {
        for n in [0.5, 1.0, 2.0, 17.0] {
            let mode = build_gfv(1.0, [0.6, -0.2, 0.9], n).unwrap();
            let lp = energy_projectors(&mode).unwrap().lambda_plus;
            for a in acceleration(&mode) {
                assert!((&(&lp * &a) * &lp).max_abs() < 1e-12, "N = {n}");
            }
        }
    }

    #[test]
    fn heisenberg_trivial_cases() {
        let mode = build_gfv(1.2, [0.3, 0.4, 0.0], 0.7).unwrap();
        let ev = HeisenbergEvolver::new(&mode);
        assert!(ev.evolve(&mode.velocity[0], 0.0).unwrap().approx_eq(&mode.velocity[0], 1e-14));
        assert!(ev.evolve(&mode.hamiltonian, 3.7).unwrap().approx_eq(&mode.hamiltonian, 1e-12));
        assert!(ev.evolve(&ComplexMatrix::identity(3), 1.0).is_err());
    }

    #[test]
    fn closed_form_velocity_examples() {
        let mode = build_dirac(3.0, [4.0, 0.0, 0.0]).unwrap();
        let cf = ClosedForm::new(&mode).unwrap();
        assert!(max_diff3(&cf.velocity(0.0), &mode.velocity) < 1e-15);
        assert!(max_diff3(&cf.velocity(PI / mode.energy), &mode.velocity) < 1e-13);
        for t in [0.1, PI / 5.0] {
            let brute = evolve_heisenberg(&mode, &mode.velocity[0], t).unwrap();
            assert!(cf.velocity(t)[0].approx_eq(&brute, 1e-10));
        }
    }

    #[test]
    fn exp_at_half_period_is_minus_identity() {
        let mode = build_dirac(3.0, [4.0, 0.0, 0.0]).unwrap();
        let e = mat_exp(&mode.hamiltonian, c(0.0, -PI / 5.0));
        assert!(e.approx_eq(&ComplexMatrix::identity(4).scale_re(-1.0), 1e-14));
    }

    #[test]
    fn displacement_starts_at_zero_with_velocity_slope() {
        let mode = build_st(1.3, [0.2, -0.5, 0.7]).unwrap();
        let cf = ClosedForm::new(&mode).unwrap();
        for d in cf.displacement(0.0) {
            assert!(d.max_abs() < 1e-15);
        }
        let h = 1e-6;
        let plus = cf.displacement(h);
        let minus = cf.displacement(-h);
        for k in 0..3 {
            let slope = (&plus[k] - &minus[k]).scale_re(1.0 / (2.0 * h));
            assert!(slope.approx_eq(&mode.velocity[k], 1e-6));
        }
    }

    #[test]
    fn projector_examples() {
        let mode = build_dirac(1.0, [0.0; 3]).unwrap();
        let p = energy_projectors(&mode).unwrap();
        let id = ComplexMatrix::identity(4);
        let beta = dirac_matrices().beta;
        assert!(p.lambda_plus.approx_eq(&(&id + &beta).scale_re(0.5), 1e-14));
        assert!(p.lambda_minus.approx_eq(&(&id - &beta).scale_re(0.5), 1e-14));

        let mode = build_gfv(0.0, [0.0, 0.0, 3.0], 3.0).unwrap();
        let p = energy_projectors(&mode).unwrap();
        let rho3 = pauli_rho().rho3;
        let id = ComplexMatrix::identity(2);
        assert!(p.lambda_plus.approx_eq(&(&id + &rho3).scale_re(0.5), 1e-15));

        let mode = build_st(3.0, [0.0, 0.0, 4.0]).unwrap();
        let p = energy_projectors(&mode).unwrap();
        assert!((p.lambda_plus.trace() - c(3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn positive_energy_velocity_is_constant() {
        let mode = build_gfv(2.0, [1.5, 0.0, -0.5], 0.8).unwrap();
        let p = energy_projectors(&mode).unwrap();
        let psi = DVector::from_vec(vec![c(0.3, 0.2), c(-0.4, 1.0)]);
        let state = QuantumState::new(RepresentationKind::Gfv, p.lambda_plus.apply(&psi)).unwrap();
        let times = default_time_grid(mode.energy, 64);
        let traj = expectation_trajectory(&mode, &state, Observable::Velocity(0), &times).unwrap();
        let expected = c(1.5 / mode.energy, 0.0);
        for s in &traj.samples {
            assert!((s - expected).norm() < 1e-12, "{s}");
        }
    }

    #[test]
    fn mixed_state_velocity_oscillates_at_twice_the_energy() {
        let mode = build_dirac(1.0, [0.3, 0.0, 0.0]).unwrap();
        let p = energy_projectors(&mode).unwrap();
        let psi = DVector::from_vec(vec![ONE, c(0.2, 0.1), c(0.0, 0.5), c(0.7, 0.0)]);
        let plus = p.lambda_plus.apply(&psi);
        let minus = p.lambda_minus.apply(&psi);
        let mixed = plus.scale(1.0 / plus.norm()) + minus.scale(1.0 / minus.norm());
        let state = QuantumState::new(RepresentationKind::Dirac, mixed).unwrap();
        let times = default_time_grid(mode.energy, DEFAULT_SAMPLES);
        let traj = expectation_trajectory(&mode, &state, Observable::Velocity(0), &times).unwrap();
        let t0 = charge_expectation(&state, &mode.velocity[0]).unwrap();
        assert!((traj.samples[0] - t0).norm() < 1e-14);
        let fit = traj.fit_frequency().unwrap();
        assert!((fit.omega - 2.0 * mode.energy).abs() < 1e-8 * mode.energy, "{}", fit.omega);
        assert!(fit.residual < 1e-10);
    }

    #[test]
    fn trajectory_rejects_bad_input() {
        let mode = build_dirac(1.0, [0.0; 3]).unwrap();
        let state = QuantumState::new(RepresentationKind::Dirac, DVector::from_element(4, ONE)).unwrap();
        assert!(expectation_trajectory(&mode, &state, Observable::Velocity(3), &[0.0]).is_err());
        assert!(expectation_trajectory(&mode, &state, Observable::Velocity(0), &[1.0, 0.5]).is_err());
        let wrong = QuantumState::new(RepresentationKind::Gfv, DVector::from_element(2, ONE)).unwrap();
        assert!(expectation_trajectory(&mode, &wrong, Observable::Velocity(0), &[0.0]).is_err());
    }
}
