//! One-dimensional Gaussian wave packets on a momentum grid.
//!
//! Each grid point is a free mode with momentum `p_k ê_axis`; the packet carries one
//! spinor per mode. Evolution is exact per mode, `ψ_k(t) = e^{−iE_k t}Λ₊ψ_k + e^{iE_k t}Λ₋ψ_k`.
//! The position expectation uses `x = i∂/∂p`, applied by FFT differentiation on the
//! (periodic) grid; sums over the grid are pairwise so results do not depend on
//! evaluation order.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use rustfft::FftPlanner;

use crate::dynamics::energy_projectors;
use crate::error::{Error, Result};
use crate::fit::fit_drift_oscillation;
use crate::operator_core::{c, ComplexMatrix, C64};
use crate::representations::{gfv_rebase_matrix, Momentum, ModeOperators, QuantumState, RepresentationKind};

/// Default number of grid points.
pub const DEFAULT_GRID_POINTS: usize = 1024;
/// Default half-width of the grid in units of `σ_p`.
pub const DEFAULT_HALF_WIDTH: f64 = 12.0;
/// Largest envelope value tolerated at the grid edges, relative to the peak.
pub const EDGE_ENVELOPE: f64 = 1e-10;

/// Uniform momentum grid along one axis, symmetric about `center`:
/// `p_k = center + (k − (n − 1)/2)·spacing`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumGrid {
    pub axis: usize,
    pub center: f64,
    pub spacing: f64,
    pub n: usize,
}

impl MomentumGrid {
    pub fn new(axis: usize, center: f64, spacing: f64, n: usize) -> Result<Self> {
        if axis > 2 {
            return Err(Error::Parameter(format!("axis index {axis} out of range")));
        }
        if !(spacing > 0.0) || !spacing.is_finite() || !center.is_finite() {
            return Err(Error::Parameter(format!("invalid grid spacing {spacing} or center {center}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::Parameter(format!("grid size must be a power of two ≥ 8, got {n}")));
        }
        Ok(MomentumGrid { axis, center, spacing, n })
    }

    /// `n` points spanning `center ± half_width·σ_p`.
    pub fn covering(axis: usize, center: f64, sigma_p: f64, half_width: f64, n: usize) -> Result<Self> {
        MomentumGrid::new(axis, center, 2.0 * half_width * sigma_p / n as f64, n)
    }

    /// The default grid: 1024 points over `center ± 12σ_p`.
    pub fn default_for(axis: usize, center: f64, sigma_p: f64) -> Result<Self> {
        MomentumGrid::covering(axis, center, sigma_p, DEFAULT_HALF_WIDTH, DEFAULT_GRID_POINTS)
    }

    pub fn value(&self, k: usize) -> f64 {
        self.center + (k as f64 - 0.5 * (self.n - 1) as f64) * self.spacing
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.value(k)).collect()
    }

    pub fn momentum(&self, k: usize) -> Momentum {
        let mut p = [0.0; 3];
        p[self.axis] = self.value(k);
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Composition {
    PositiveOnly,
    NegativeOnly,
    /// Positive-energy weight `w₊ ∈ [0, 1]`; the negative sector gets `1 − w₊`.
    Mixed(f64),
}

impl Composition {
    /// `(w₊, w₋)`.
    pub fn weights(self) -> (f64, f64) {
        match self {
            Composition::PositiveOnly => (1.0, 0.0),
            Composition::NegativeOnly => (0.0, 1.0),
            Composition::Mixed(w) => (w, 1.0 - w),
        }
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Composition::PositiveOnly => f.write_str("positive"),
            Composition::NegativeOnly => f.write_str("negative"),
            Composition::Mixed(w) => write!(f, "mixed:{w}"),
        }
    }
}

impl FromStr for Composition {
    type Err = Error;

    /// `positive`, `negative` or `mixed:<w₊>` (bare `mixed` means `w₊ = 0.5`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "positive" | "positive_only" => return Ok(Composition::PositiveOnly),
            "negative" | "negative_only" => return Ok(Composition::NegativeOnly),
            "mixed" => return Ok(Composition::Mixed(0.5)),
            _ => {}
        }
        let w = s
            .strip_prefix("mixed:")
            .or_else(|| s.strip_prefix("mixed="))
            .and_then(|w| w.parse::<f64>().ok())
            .ok_or_else(|| Error::Parameter(format!("unknown composition '{s}'")))?;
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::Parameter(format!("mixed weight must lie in [0, 1], got {w}")));
        }
        Ok(Composition::Mixed(w))
    }
}

#[derive(Debug, Clone)]
pub struct WavePacket {
    pub grid: MomentumGrid,
    pub kind: RepresentationKind,
    pub mass: f64,
    pub gfv_n: Option<f64>,
    pub sigma_p: f64,
    pub composition: Composition,
    /// One spinor per grid point.
    pub amplitudes: Vec<DVector<C64>>,
}

impl WavePacket {
    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    pub fn mode(&self, k: usize) -> Result<ModeOperators> {
        ModeOperators::build(self.kind, self.mass, self.grid.momentum(k), self.gfv_n)
    }

    pub fn state(&self, k: usize) -> QuantumState {
        QuantumState::with_metric(self.amplitudes[k].clone(), crate::representations::Metric::ChargeForm)
    }

    /// `Σ_k ⟨ψ_k|ρ̃₃|ψ_k⟩ Δp`.
    pub fn charge_norm(&self) -> f64 {
        let metric = self.kind.metric();
        let terms: Vec<f64> = self.amplitudes.iter().map(|psi| psi.dotc(&metric.apply(psi)).re).collect();
        pairwise_sum(&terms) * self.grid.spacing
    }
}

/// Sum by recursive halving, so the result depends only on the order of `values`.
pub fn pairwise_sum<T: Copy + Default + std::ops::Add<Output = T>>(values: &[T]) -> T {
    if values.len() <= 8 {
        return values.iter().fold(T::default(), |acc, &v| acc + v);
    }
    let (left, right) = values.split_at(values.len() / 2);
    pairwise_sum(left) + pairwise_sum(right)
}

fn unit_phase(z: C64) -> C64 {
    if z.norm() == 0.0 {
        c(1.0, 0.0)
    } else {
        z.conj() / z.norm()
    }
}

/// `Λe_j` scaled to metric norm ±1 with component `j` real and positive.
fn sector_vector(projector: &ComplexMatrix, metric: &ComplexMatrix, j: usize) -> Option<DVector<C64>> {
    let u = projector.column(j);
    let size = u.dotc(&metric.apply(&u)).re.abs();
    if size <= 1e-12 {
        return None;
    }
    let phase = unit_phase(u[j]);
    Some(u * (phase / size.sqrt()))
}

/// Index with the largest score, lowest index among near-ties.
fn best_index(scores: &[f64]) -> usize {
    let top = scores.iter().cloned().fold(0.0, f64::max);
    scores.iter().position(|&s| s >= top * (1.0 - 1e-9)).unwrap_or(0)
}

/// Gaussian packet `c_k ∝ exp(−(p_k − p₀)²/(4σ_p²))` along `grid.axis`, centered on
/// `grid.center`.
///
/// The per-mode spinors are fixed sector vectors `Λ±e_j` (one index per sector for the
/// whole grid, so the spinors vary smoothly with `p`). The positive index maximizes the
/// projected weight at the packet center; the negative one maximizes, among directions
/// with comparable projected weight, the enveloped coupling of the two sectors through
/// the velocity along the axis. The envelope is scaled so that `Σ_k |c_k|² Δp = 1`.
pub fn gaussian_packet(
    kind: RepresentationKind,
    mass: f64,
    gfv_n: Option<f64>,
    sigma_p: f64,
    grid: MomentumGrid,
    composition: Composition,
) -> Result<WavePacket> {
    if !(sigma_p > 0.0) || !sigma_p.is_finite() {
        return Err(Error::Parameter(format!("σ_p must be positive, got {sigma_p}")));
    }
    let (w_plus, w_minus) = composition.weights();
    if !(0.0..=1.0).contains(&w_plus) {
        return Err(Error::Parameter(format!("mixed weight must lie in [0, 1], got {w_plus}")));
    }
    let envelope = |p: f64| (-(p - grid.center).powi(2) / (4.0 * sigma_p * sigma_p)).exp();
    let edge = envelope(grid.value(0)).max(envelope(grid.value(grid.n - 1)));
    if edge > EDGE_ENVELOPE {
        return Err(Error::Parameter(format!(
            "grid too narrow: envelope is {edge:.3e} of its peak at the edges (limit {EDGE_ENVELOPE:e})"
        )));
    }

    let dim = kind.dim();
    let metric = kind.metric();
    let modes: Vec<ModeOperators> =
        (0..grid.n).map(|k| ModeOperators::build(kind, mass, grid.momentum(k), gfv_n)).collect::<Result<_>>()?;
    let projectors = modes.iter().map(energy_projectors).collect::<Result<Vec<_>>>()?;
    let center = grid.n / 2;

    let plus_scores: Vec<f64> = (0..dim)
        .map(|j| {
            let u = projectors[center].lambda_plus.column(j);
            u.dotc(&metric.apply(&u)).re.abs()
        })
        .collect();
    let j_plus = best_index(&plus_scores);
    let plus_vectors = sector_vectors(&projectors, &metric, j_plus, true)?;

    let weights: Vec<f64> = (0..grid.n).map(|k| envelope(grid.value(k)).powi(2)).collect();
    // Only directions that Λ₋ does not nearly annihilate: a weak Λ₋e_j turns into a
    // normalized vector whose sign can flip across the grid.
    let minus_sizes: Vec<f64> = (0..dim)
        .map(|j| {
            let u = projectors[center].lambda_minus.column(j);
            u.dotc(&metric.apply(&u)).re.abs()
        })
        .collect();
    let largest = minus_sizes.iter().cloned().fold(0.0, f64::max);
    let coupling_scores: Vec<f64> = (0..dim)
        .map(|j| {
            if minus_sizes[j] < 0.25 * largest {
                return 0.0;
            }
            let terms: Vec<f64> = (0..grid.n)
                .map(|k| {
                    sector_vector(&projectors[k].lambda_minus, &metric, j).map_or(0.0, |u| {
                        let vu = modes[k].velocity[grid.axis].apply(&u);
                        weights[k] * plus_vectors[k].dotc(&metric.apply(&vu)).norm()
                    })
                })
                .collect();
            pairwise_sum(&terms)
        })
        .collect();
    let j_minus = if coupling_scores.iter().any(|&s| s > 0.0) {
        best_index(&coupling_scores)
    } else {
        best_index(&minus_sizes)
    };
    let minus_vectors = sector_vectors(&projectors, &metric, j_minus, false)?;

    let envelope_norm = pairwise_sum(&weights) * grid.spacing;
    let scale = 1.0 / envelope_norm.sqrt();
    let (a, b) = (w_plus.sqrt(), w_minus.sqrt());
    let amplitudes = (0..grid.n)
        .map(|k| {
            let g = envelope(grid.value(k)) * scale;
            let mut psi = DVector::zeros(dim);
            if a > 0.0 {
                psi += &plus_vectors[k] * c(a * g, 0.0);
            }
            if b > 0.0 {
                psi += &minus_vectors[k] * c(b * g, 0.0);
            }
            psi
        })
        .collect();
    Ok(WavePacket { grid, kind, mass, gfv_n, sigma_p, composition, amplitudes })
}

fn sector_vectors(
    projectors: &[crate::dynamics::EnergyProjectors],
    metric: &ComplexMatrix,
    j: usize,
    positive: bool,
) -> Result<Vec<DVector<C64>>> {
    projectors
        .iter()
        .map(|p| {
            let proj = if positive { &p.lambda_plus } else { &p.lambda_minus };
            sector_vector(proj, metric, j).ok_or_else(|| {
                Error::Parameter(format!(
                    "sector vector Λ{}e_{j} vanishes on part of the grid",
                    if positive { "+" } else { "−" }
                ))
            })
        })
        .collect()
}

/// Single-mode state of the given composition, built from the same sector vectors as
/// packets: `Λ₊e_{j₊}` with the largest projected weight and the `Λ₋e_{j₋}` (of
/// comparable weight) most strongly coupled to it through the velocity.
pub fn mode_state(mode: &ModeOperators, composition: Composition) -> Result<QuantumState> {
    let (w_plus, w_minus) = composition.weights();
    if !(0.0..=1.0).contains(&w_plus) {
        return Err(Error::Parameter(format!("mixed weight must lie in [0, 1], got {w_plus}")));
    }
    let dim = mode.dim();
    let metric = mode.metric();
    let proj = energy_projectors(mode)?;
    let size = |p: &ComplexMatrix, j: usize| {
        let u = p.column(j);
        u.dotc(&metric.apply(&u)).re.abs()
    };
    let plus_sizes: Vec<f64> = (0..dim).map(|j| size(&proj.lambda_plus, j)).collect();
    let j_plus = best_index(&plus_sizes);
    let u_plus = sector_vector(&proj.lambda_plus, &metric, j_plus)
        .ok_or_else(|| Error::Parameter("positive-energy projector annihilates every basis vector".into()))?;
    let minus_sizes: Vec<f64> = (0..dim).map(|j| size(&proj.lambda_minus, j)).collect();
    let largest = minus_sizes.iter().cloned().fold(0.0, f64::max);
    let coupling: Vec<f64> = (0..dim)
        .map(|j| {
            if minus_sizes[j] < 0.25 * largest {
                return 0.0;
            }
            sector_vector(&proj.lambda_minus, &metric, j).map_or(0.0, |u| {
                mode.velocity.iter().map(|v| u_plus.dotc(&metric.apply(&v.apply(&u))).norm()).sum()
            })
        })
        .collect();
    let j_minus = if coupling.iter().any(|&x| x > 0.0) { best_index(&coupling) } else { best_index(&minus_sizes) };
    let u_minus = sector_vector(&proj.lambda_minus, &metric, j_minus)
        .ok_or_else(|| Error::Parameter("negative-energy projector annihilates every basis vector".into()))?;
    let psi = &u_plus * c(w_plus.sqrt(), 0.0) + &u_minus * c(w_minus.sqrt(), 0.0);
    QuantumState::new(mode.kind, psi)
}

#[derive(Debug, Clone)]
struct ModeSplit {
    energy: f64,
    lambda_plus: ComplexMatrix,
    lambda_minus: ComplexMatrix,
    hamiltonian: ComplexMatrix,
    plus: DVector<C64>,
    minus: DVector<C64>,
}

/// Exact evolution of a packet; the sector split of every mode is computed once.
#[derive(Debug, Clone)]
pub struct PacketEvolver {
    initial: WavePacket,
    modes: Vec<ModeSplit>,
}

impl PacketEvolver {
    pub fn new(packet: &WavePacket) -> Result<Self> {
        let modes = (0..packet.grid.n)
            .map(|k| {
                let mode = packet.mode(k)?;
                let proj = energy_projectors(&mode)?;
                let psi = &packet.amplitudes[k];
                Ok(ModeSplit {
                    energy: mode.energy,
                    plus: proj.lambda_plus.apply(psi),
                    minus: proj.lambda_minus.apply(psi),
                    lambda_plus: proj.lambda_plus,
                    lambda_minus: proj.lambda_minus,
                    hamiltonian: mode.hamiltonian,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PacketEvolver { initial: packet.clone(), modes })
    }

    pub fn initial(&self) -> &WavePacket {
        &self.initial
    }

    /// `ψ_k(t) = exp(−iH_k t) ψ_k` for every mode.
    pub fn evolve(&self, t: f64) -> WavePacket {
        let mut out = self.initial.clone();
        if t == 0.0 {
            return out;
        }
        for (psi, m) in out.amplitudes.iter_mut().zip(&self.modes) {
            let phase = C64::new(0.0, -m.energy * t).exp();
            *psi = &m.plus * phase + &m.minus * phase.conj();
        }
        out
    }

    /// `(W₊, W₋)`: `Σ_k |⟨Λ±ψ_k|ρ̃₃|Λ±ψ_k⟩| Δp` for the packet `state` (which must live on
    /// the same grid).
    pub fn sector_weights(&self, state: &WavePacket) -> Result<(f64, f64)> {
        self.check_same_grid(state)?;
        let metric = self.initial.kind.metric();
        let weight = |proj: &ComplexMatrix, psi: &DVector<C64>| {
            let u = proj.apply(psi);
            u.dotc(&metric.apply(&u)).re.abs()
        };
        let plus: Vec<f64> = self.modes.iter().zip(&state.amplitudes).map(|(m, psi)| weight(&m.lambda_plus, psi)).collect();
        let minus: Vec<f64> =
            self.modes.iter().zip(&state.amplitudes).map(|(m, psi)| weight(&m.lambda_minus, psi)).collect();
        let dp = state.grid.spacing;
        Ok((pairwise_sum(&plus) * dp, pairwise_sum(&minus) * dp))
    }

    /// `⟨H⟩` in the charge form.
    pub fn energy_expectation(&self, state: &WavePacket) -> Result<f64> {
        self.check_same_grid(state)?;
        let metric = self.initial.kind.metric();
        let terms: Vec<C64> = self
            .modes
            .iter()
            .zip(&state.amplitudes)
            .map(|(m, psi)| psi.dotc(&metric.apply(&m.hamiltonian.apply(psi))))
            .collect();
        let norm = state.charge_norm();
        check_norm(state, norm)?;
        Ok((pairwise_sum(&terms) * state.grid.spacing).re / norm)
    }

    fn check_same_grid(&self, state: &WavePacket) -> Result<()> {
        if state.grid != self.initial.grid || state.kind != self.initial.kind {
            return Err(Error::Parameter("packet does not belong to this evolver".into()));
        }
        Ok(())
    }
}

pub fn evolve_packet(packet: &WavePacket, t: f64) -> Result<WavePacket> {
    Ok(PacketEvolver::new(packet)?.evolve(t))
}

/// `max(W₊, W₋)/(W₊ + W₋)`: 1 for a sector-pure packet, ½ for an even mixture.
pub fn sector_purity(weights: (f64, f64)) -> f64 {
    let total = weights.0 + weights.1;
    if total == 0.0 {
        return f64::NAN;
    }
    weights.0.max(weights.1) / total
}

fn check_norm(packet: &WavePacket, norm: f64) -> Result<()> {
    let euclid: Vec<f64> = packet.amplitudes.iter().map(|psi| psi.norm_squared()).collect();
    let scale = pairwise_sum(&euclid) * packet.grid.spacing;
    if norm.abs() <= 1e-12 * scale || scale == 0.0 {
        return Err(Error::NullNorm(norm));
    }
    Ok(())
}

/// `∂/∂p` of every spinor component by FFT differentiation on the periodic grid.
fn spectral_derivative(packet: &WavePacket) -> Vec<DVector<C64>> {
    let n = packet.grid.n;
    let dim = packet.dim();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let dk = 2.0 * PI / (n as f64 * packet.grid.spacing);
    let mut out = vec![DVector::zeros(dim); n];
    let mut buffer = vec![C64::new(0.0, 0.0); n];
    for comp in 0..dim {
        for (b, psi) in buffer.iter_mut().zip(&packet.amplitudes) {
            *b = psi[comp];
        }
        forward.process(&mut buffer);
        for (j, b) in buffer.iter_mut().enumerate() {
            let freq = if j < n / 2 {
                j as f64
            } else if j > n / 2 {
                j as f64 - n as f64
            } else {
                0.0
            };
            *b *= C64::new(0.0, freq * dk / n as f64);
        }
        inverse.process(&mut buffer);
        for (o, b) in out.iter_mut().zip(&buffer) {
            o[comp] = *b;
        }
    }
    out
}

/// `⟨x⟩ = Σ_k ⟨ψ_k|ρ̃₃ i∂_p ψ_k⟩ / Σ_k ⟨ψ_k|ρ̃₃|ψ_k⟩` along the grid axis.
pub fn position_expectation(packet: &WavePacket) -> Result<f64> {
    let norm = packet.charge_norm();
    check_norm(packet, norm)?;
    let metric = packet.kind.metric();
    let derivative = spectral_derivative(packet);
    let terms: Vec<C64> = packet
        .amplitudes
        .iter()
        .zip(&derivative)
        .map(|(psi, d)| psi.dotc(&metric.apply(d)) * C64::new(0.0, 1.0))
        .collect();
    let x = pairwise_sum(&terms) * packet.grid.spacing / norm;
    if x.im.abs() > 1e-9 * (1.0 + x.re.abs()) {
        return Err(Error::Parameter(format!("position expectation has imaginary part {:e}", x.im)));
    }
    Ok(x.re)
}

/// Sampled packet observables.
#[derive(Debug, Clone)]
pub struct PacketTrajectory {
    pub times: Vec<f64>,
    pub x: Vec<f64>,
    pub norm: Vec<f64>,
    pub purity: Vec<f64>,
}

pub fn packet_trajectory(packet: &WavePacket, times: &[f64]) -> Result<PacketTrajectory> {
    let evolver = PacketEvolver::new(packet)?;
    let mut out = PacketTrajectory {
        times: times.to_vec(),
        x: Vec::with_capacity(times.len()),
        norm: Vec::with_capacity(times.len()),
        purity: Vec::with_capacity(times.len()),
    };
    for &t in times {
        let state = evolver.evolve(t);
        out.x.push(position_expectation(&state)?);
        out.norm.push(state.charge_norm());
        out.purity.push(sector_purity(evolver.sector_weights(&state)?));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy)]
pub struct ZbwFit {
    pub amplitude: f64,
    /// Angular frequency of the oscillation.
    pub frequency: f64,
    pub drift: f64,
    pub residual: f64,
}

/// Fit `x₀ + v·t + A·cos(ωt + φ)` to a position trajectory.
pub fn zbw_amplitude(times: &[f64], x: &[f64]) -> Result<ZbwFit> {
    let fit = fit_drift_oscillation(times, x)?;
    Ok(ZbwFit { amplitude: fit.amplitude, frequency: fit.omega, drift: fit.drift, residual: fit.residual })
}

/// Re-express a GFV packet at another `N`.
pub fn rebase_gfv_packet(packet: &WavePacket, n2: f64) -> Result<WavePacket> {
    let n1 = match (packet.kind, packet.gfv_n) {
        (RepresentationKind::Gfv, Some(n)) => n,
        _ => return Err(Error::Parameter("only GFV packets can be rebased".into())),
    };
    let t = gfv_rebase_matrix(n1, n2)?;
    let mut out = packet.clone();
    out.gfv_n = Some(n2);
    for psi in out.amplitudes.iter_mut() {
        *psi = t.apply(psi);
    }
    Ok(out)
}
