//! Frequency-domain view of Green's-function series.
//!
//! `S(ω_k) = dt Σ_{n<N} g(t_n) e^{−ηt_n} e^{iω_k t_n}` on `ω_k = 2πk/(N dt)`,
//! `k = −N/2 … N/2−1`, so a component `e^{−iεt}` peaks at `ω = ε`.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::greens::GreensSeries;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Ascending, spacing `2π/window`.
    pub omegas: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Effective window `N·dt`.
    pub window: f64,
    pub damping: f64,
    pub dt: f64,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn resolution(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.window
    }

    /// Width of the frequency grid, `2π/dt`.
    pub fn span(&self) -> f64 {
        self.resolution() * self.len() as f64
    }
}

/// Index of frequency `ω_k` in ascending order for FFT bin `j`.
fn shifted_index(j: usize, n: usize) -> usize {
    (j + n / 2) % n
}

fn fft_forward_plus(samples: &[Complex64]) -> Vec<Complex64> {
    // The inverse transform carries the e^{+i} kernel; it is unnormalized.
    let mut buf = samples.to_vec();
    FftPlanner::new().plan_fft_inverse(buf.len()).process(&mut buf);
    buf
}

fn fft_minus(samples: &[Complex64]) -> Vec<Complex64> {
    let mut buf = samples.to_vec();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    buf
}

/// Spectrum of `samples` taken at `t_n = n·dt`, already damped.
fn spectrum_of(samples: &[Complex64], dt: f64, damping: f64) -> Spectrum {
    let n = samples.len();
    let raw = fft_forward_plus(samples);
    let dw = 2.0 * std::f64::consts::PI / (n as f64 * dt);
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    for (j, v) in raw.into_iter().enumerate() {
        values[shifted_index(j, n)] = v * dt;
    }
    let omegas = (0..n).map(|i| (i as f64 - (n / 2) as f64) * dw).collect();
    Spectrum { omegas, values, window: n as f64 * dt, damping, dt }
}

/// Time samples `g(t_n)e^{−ηt_n}` recovered from a spectrum.
fn samples_of(s: &Spectrum) -> Vec<Complex64> {
    let n = s.len();
    let mut bins = vec![Complex64::new(0.0, 0.0); n];
    for (j, b) in bins.iter_mut().enumerate() {
        *b = s.values[shifted_index(j, n)];
    }
    fft_minus(&bins).into_iter().map(|v| v / (n as f64 * s.dt)).collect()
}

/// Transform of the first `N = round(window/dt)` samples of `g`.
pub fn transform(g: &GreensSeries, window: f64, damping: f64) -> Result<Spectrum> {
    let grid = g.grid();
    let dt = grid.dt();
    if !(window.is_finite() && window > 0.0) {
        return Err(Error::InvalidGrid(format!("window must be positive, got {window}")));
    }
    if !(damping.is_finite() && damping >= 0.0) {
        return Err(Error::InvalidGrid(format!("damping must be non-negative, got {damping}")));
    }
    let n = (window / dt).round() as usize;
    if n < 2 {
        return Err(Error::InvalidGrid(format!("window {window} holds fewer than two samples")));
    }
    if n > g.len() {
        return Err(Error::InvalidGrid(format!("window {window} needs {n} samples, series has {}", g.len())));
    }
    let samples: Vec<Complex64> = g.values()[..n]
        .iter()
        .enumerate()
        .map(|(k, v)| v * (-damping * k as f64 * dt).exp())
        .collect();
    Ok(spectrum_of(&samples, dt, damping))
}

/// `S'(ω) = S(ω + Ẽ0 − E0)` on the same grid, evaluated by trigonometric
/// interpolation (equivalently, transforming `e^{i(Ẽ0−E0)t}g(t)`).
pub fn energy_shift(s: &Spectrum, e0: f64, e0_tilde: f64) -> Result<Spectrum> {
    let delta = e0_tilde - e0;
    if !delta.is_finite() {
        return Err(Error::NonFinite("energy shift"));
    }
    if delta.abs() >= s.span() {
        return Err(Error::ShiftExceedsGrid { shift: delta, span: s.span() });
    }
    let samples: Vec<Complex64> = samples_of(s)
        .into_iter()
        .enumerate()
        .map(|(k, v)| v * Complex64::from_polar(1.0, delta * k as f64 * s.dt))
        .collect();
    Ok(spectrum_of(&samples, s.dt, s.damping))
}

/// Relative mismatch `|Σ|S_k|² − N dt² Σ|h_n|²| / Σ|S_k|²` for the damped
/// samples `h_n` the spectrum was built from.
pub fn parseval_residual(s: &Spectrum, g: &GreensSeries) -> f64 {
    let n = s.len();
    let freq: f64 = s.values.iter().map(|v| v.norm_sqr()).sum();
    let time: f64 = g.values()[..n]
        .iter()
        .enumerate()
        .map(|(k, v)| (v * (-s.damping * k as f64 * s.dt).exp()).norm_sqr())
        .sum::<f64>()
        * n as f64
        * s.dt
        * s.dt;
    (freq - time).abs() / freq.max(f64::MIN_POSITIVE)
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    pub omega: f64,
    pub height: f64,
}

/// Strict local maxima of `|Im S|` above `threshold`, refined by a parabola
/// through the peak bin and its neighbours.
pub fn find_poles(s: &Spectrum, threshold: f64) -> Vec<Pole> {
    let y: Vec<f64> = s.values.iter().map(|v| v.im.abs()).collect();
    let dw = s.resolution();
    let mut poles = Vec::new();
    for k in 1..y.len().saturating_sub(1) {
        let (l, c, r) = (y[k - 1], y[k], y[k + 1]);
        if c <= threshold || c <= l || c <= r {
            continue;
        }
        let curvature = l - 2.0 * c + r;
        let offset = if curvature != 0.0 { 0.5 * (l - r) / curvature } else { 0.0 };
        poles.push(Pole { omega: s.omegas[k] + offset * dw, height: c - 0.25 * (l - r) * offset });
    }
    poles
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greens::{Algorithm, GreensKind};
    use crate::grid::TimeGrid;
    use std::f64::consts::PI;

    fn series(f: impl Fn(f64) -> Complex64, t_max: f64, dt: f64) -> GreensSeries {
        let grid = TimeGrid::with_steps(dt, (t_max / dt).ceil() as usize).unwrap();
        let values = grid.times().into_iter().map(f).collect();
        GreensSeries::new("synthetic", GreensKind::Retarded, Algorithm::Exact, &grid, values).unwrap()
    }

    /// Direct evaluation of the defining sum.
    fn dft_at(g: &GreensSeries, n: usize, omega: f64) -> Complex64 {
        let dt = g.grid().dt();
        g.values()[..n].iter().enumerate().map(|(k, v)| v * Complex64::from_polar(dt, omega * k as f64 * dt)).sum()
    }

    #[test]
    fn matches_direct_sum_and_parseval() {
        let g = series(|t| Complex64::new((1.3 * t).cos(), (0.4 * t).sin() * 0.5), 8.0 * PI, 0.05);
        let s = transform(&g, 8.0 * PI, 0.0).unwrap();
        for k in [0, 7, s.len() / 2, s.len() - 1] {
            assert!((s.values[k] - dft_at(&g, s.len(), s.omegas[k])).norm() < 1e-9);
        }
        assert!(parseval_residual(&s, &g) < 1e-8);
    }

    #[test]
    fn single_tone_and_damping() {
        let w0 = 1.5;
        let g = series(|t| Complex64::new(0.0, -1.0) * Complex64::from_polar(1.0, -w0 * t), 8.0 * PI, 0.02);
        let s = transform(&g, 8.0 * PI, 0.0).unwrap();
        let poles = find_poles(&s, 1.0);
        assert_eq!(poles.len(), 1);
        assert!((poles[0].omega - w0).abs() < s.resolution());
        let damped = transform(&g, 8.0 * PI, 0.1).unwrap();
        let p = find_poles(&damped, 0.5);
        assert_eq!(p.len(), 1);
        assert!((p[0].omega - w0).abs() < s.resolution());
        assert!(p[0].height < poles[0].height);
    }

    #[test]
    fn flat_spectrum_has_no_poles() {
        let g = series(|t| if t == 0.0 { Complex64::new(0.0, 1.0) } else { Complex64::new(0.0, 0.0) }, 4.0, 0.01);
        assert!(find_poles(&transform(&g, 4.0, 0.0).unwrap(), 1e-6).is_empty());
    }

    #[test]
    fn nearby_peaks_resolved() {
        let grid = TimeGrid::with_steps(0.02, 1257).unwrap();
        let dw = 2.0 * PI / (1257.0 * 0.02);
        let (a, b) = (4.0 * dw, 7.0 * dw);
        let g = series(|t| Complex64::new(0.0, -1.0) * (Complex64::from_polar(1.0, -a * t) + Complex64::from_polar(1.0, -b * t)), 8.0 * PI, 0.02);
        let poles = find_poles(&transform(&g, grid.t_max(), 0.0).unwrap(), 5.0);
        assert_eq!(poles.len(), 2, "{poles:?}");
        assert!((poles[0].omega - a).abs() < 1e-9 && (poles[1].omega - b).abs() < 1e-9);
    }

    #[test]
    fn shift_matches_modulated_transform() {
        let g = series(|t| Complex64::new((0.9 * t).sin(), (2.1 * t).cos()) * (-0.05 * t).exp(), 8.0 * PI, 0.02);
        let s = transform(&g, 8.0 * PI, 0.0).unwrap();
        assert_eq!(energy_shift(&s, -4.0, -4.0).unwrap().values.len(), s.len());
        let identity = energy_shift(&s, -4.0, -4.0).unwrap();
        assert!(identity.values.iter().zip(&s.values).all(|(a, b)| (a - b).norm() < 1e-9));
        let delta = 0.09;
        let shifted = energy_shift(&s, -4.0, -4.0 + delta).unwrap();
        let modulated = series(
            |t| Complex64::new((0.9 * t).sin(), (2.1 * t).cos()) * (-0.05 * t).exp() * Complex64::from_polar(1.0, delta * t),
            8.0 * PI,
            0.02,
        );
        let direct = transform(&modulated, 8.0 * PI, 0.0).unwrap();
        let err = shifted.values.iter().zip(&direct.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
        let back = energy_shift(&shifted, -4.0 + delta, -4.0).unwrap();
        assert!(back.values.iter().zip(&s.values).all(|(a, b)| (a - b).norm() < 1e-9));
        assert!(matches!(energy_shift(&s, 0.0, 1e4), Err(Error::ShiftExceedsGrid { .. })));
    }

    #[test]
    fn window_must_fit() {
        let g = series(|_| Complex64::new(1.0, 0.0), 1.0, 0.1);
        assert!(transform(&g, 2.0, 0.0).is_err());
        assert!(transform(&g, 1.0, -1.0).is_err());
    }
}
