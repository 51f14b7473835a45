//! Least-squares extraction of a single oscillation frequency from sampled data.
//!
//! For each trial angular frequency the model is linear in its amplitudes, so the
//! amplitudes come from a linear least-squares solve and only the frequency is
//! searched: a dense scan locates the global basin, golden-section refines it.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::operator_core::C64;

const SCAN_POINTS: usize = 2048;
const REFINE_ITERS: usize = 100;

/// Fit of `offset + minus·e^{−iΩt} + plus·e^{+iΩt}` to complex samples.
#[derive(Debug, Clone, Copy)]
pub struct ToneFit {
    pub offset: C64,
    pub minus: C64,
    pub plus: C64,
    /// Angular frequency Ω.
    pub omega: f64,
    /// Root-mean-square residual.
    pub residual: f64,
}

/// Fit of `x₀ + v·t + A·cos(ωt + φ)` to real samples.
#[derive(Debug, Clone, Copy)]
pub struct DriftOscillationFit {
    pub offset: f64,
    pub drift: f64,
    pub amplitude: f64,
    pub omega: f64,
    pub phase: f64,
    pub residual: f64,
}

fn check_grid(times: &[f64], n_values: usize) -> Result<(f64, f64)> {
    if times.len() != n_values {
        return Err(Error::Fit { reason: format!("{} times for {} samples", times.len(), n_values), residual: f64::NAN });
    }
    if times.len() < 8 {
        return Err(Error::Fit { reason: "need at least 8 samples".into(), residual: f64::NAN });
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Fit { reason: "times must be strictly increasing".into(), residual: f64::NAN });
    }
    let span = times[times.len() - 1] - times[0];
    let dt = span / (times.len() - 1) as f64;
    // Two periods up to just below the Nyquist frequency of the mean spacing.
    let lo = 2.0 * std::f64::consts::TAU / span;
    let hi = 0.95 * std::f64::consts::PI / dt;
    Ok((lo, hi))
}

/// Normal-equation solve; the residual is formed explicitly from the solution.
fn lstsq(design: &DMatrix<f64>, rhs: &DVector<f64>) -> Option<(DVector<f64>, f64)> {
    let gram = design.transpose() * design;
    let x = gram.lu().solve(&(design.transpose() * rhs))?;
    let r = (design * &x - rhs).norm();
    Some((x, r))
}

fn lstsq_complex(design: &DMatrix<C64>, rhs: &DVector<C64>) -> Option<(DVector<C64>, f64)> {
    let gram = design.adjoint() * design;
    let x = gram.lu().solve(&(design.adjoint() * rhs))?;
    let r = (design * &x - rhs).norm();
    Some((x, r))
}

/// Golden-section minimization of a unimodal function on `[a, b]`.
fn golden_min(mut a: f64, mut b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let ratio = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..REFINE_ITERS {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2);
        }
        if (b - a).abs() <= 1e-15 * (a.abs() + b.abs()) {
            break;
        }
    }
    0.5 * (a + b)
}

fn search(lo: f64, hi: f64, objective: impl Fn(f64) -> f64) -> f64 {
    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let mut best = (lo, f64::INFINITY);
    for k in 0..SCAN_POINTS {
        let w = lo + step * k as f64;
        let r = objective(w);
        if r < best.1 {
            best = (w, r);
        }
    }
    let a = (best.0 - step).max(lo);
    let b = (best.0 + step).min(hi);
    golden_min(a, b, objective)
}

pub fn fit_tones(times: &[f64], samples: &[C64]) -> Result<ToneFit> {
    let (lo, hi) = check_grid(times, samples.len())?;
    let rhs = DVector::from_column_slice(samples);
    let design = |w: f64| {
        DMatrix::from_fn(times.len(), 3, |r, col| match col {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, -w * times[r]).exp(),
            _ => C64::new(0.0, w * times[r]).exp(),
        })
    };
    let objective = |w: f64| lstsq_complex(&design(w), &rhs).map_or(f64::INFINITY, |(_, r)| r);
    let omega = search(lo, hi, objective);
    let (x, r) = lstsq_complex(&design(omega), &rhs)
        .ok_or_else(|| Error::Fit { reason: "least-squares solve failed".into(), residual: f64::NAN })?;
    let residual = r / (times.len() as f64).sqrt();
    if !residual.is_finite() || x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Fit { reason: "non-finite fit".into(), residual });
    }
    Ok(ToneFit { offset: x[0], minus: x[1], plus: x[2], omega, residual })
}

/// Fit `x₀ + v·t + A·cos(ωt + φ)`. Fails when a non-negligible oscillation is found
/// but fewer than eight of its periods are covered by the samples.
pub fn fit_drift_oscillation(times: &[f64], x: &[f64]) -> Result<DriftOscillationFit> {
    let (lo, hi) = check_grid(times, x.len())?;
    let rhs = DVector::from_column_slice(x);
    let design = |w: f64| {
        DMatrix::from_fn(times.len(), 4, |r, col| match col {
            0 => 1.0,
            1 => times[r],
            2 => (w * times[r]).cos(),
            _ => (w * times[r]).sin(),
        })
    };
    let residual_of = |w: f64| lstsq(&design(w), &rhs).map_or(f64::INFINITY, |(_, r)| r);
    let omega = search(lo, hi, residual_of);
    let (coef, r) = lstsq(&design(omega), &rhs)
        .ok_or_else(|| Error::Fit { reason: "least-squares solve failed".into(), residual: f64::NAN })?;
    let residual = r / (times.len() as f64).sqrt();
    if !residual.is_finite() || coef.iter().any(|v| !v.is_finite()) {
        return Err(Error::Fit { reason: "non-finite fit".into(), residual });
    }
    // a cos + b sin = A cos(ωt + φ) with a = A cos φ, b = −A sin φ.
    let (a, b) = (coef[2], coef[3]);
    let amplitude = a.hypot(b);
    let phase = (-b).atan2(a);

    let span = times[times.len() - 1] - times[0];
    let scale = 1.0 + x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let periods = omega * span / std::f64::consts::TAU;
    if amplitude > 1e-9 * scale && periods < 8.0 {
        return Err(Error::Fit {
            reason: format!("oscillation found but only {periods:.2} periods sampled (need 8)"),
            residual,
        });
    }
    Ok(DriftOscillationFit { offset: coef[0], drift: coef[1], amplitude, omega, phase, residual })
}
