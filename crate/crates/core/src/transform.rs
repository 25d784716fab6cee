//! Discrete transforms matching `E(t_j) = Σ_m A_m e^{−iΩ_m t_j}`.
//!
//! Coefficient vectors are kept in FFT bin order: bin `m < n/2` holds detuning
//! `m·ΔΩ` and bin `m ≥ n/2` holds `(m − n)·ΔΩ`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[derive(Clone)]
pub struct SpectralTransform {
    points: usize,
    spacing: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SpectralTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralTransform")
            .field("points", &self.points)
            .field("spacing", &self.spacing)
            .finish()
    }
}

impl SpectralTransform {
    pub fn new(points: usize, spacing: f64) -> Self {
        let mut planner = FftPlanner::new();
        SpectralTransform {
            points,
            spacing,
            forward: planner.plan_fft_forward(points),
            inverse: planner.plan_fft_inverse(points),
        }
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn time_step(&self) -> f64 {
        2.0 * PI / (self.points as f64 * self.spacing)
    }

    pub fn bin_omega(&self, m: usize) -> f64 {
        let signed = if m < self.points / 2 {
            m as f64
        } else {
            m as f64 - self.points as f64
        };
        signed * self.spacing
    }

    /// Coefficients to time samples, in place.
    pub fn synthesize(&self, buffer: &mut [Complex64]) {
        self.forward.process(buffer);
    }

    /// Time samples to coefficients, in place.
    pub fn analyze(&self, buffer: &mut [Complex64]) {
        self.inverse.process(buffer);
        let scale = 1.0 / self.points as f64;
        buffer.iter_mut().for_each(|v| *v *= scale);
    }

    /// Riemann-sum inverse transform `Σ_k F(Ω_k) e^{−iΩ_k t_j} ΔΩ/2π` of values
    /// given in ascending grid order, returned on `t_j = j·Δt`.
    pub fn grid_to_time(&self, values: &[Complex64]) -> Vec<Complex64> {
        let n = self.points;
        let mut buffer = vec![Complex64::new(0.0, 0.0); n];
        for (k, &v) in values.iter().enumerate() {
            buffer[(k + n / 2) % n] = v;
        }
        self.synthesize(&mut buffer);
        let scale = self.spacing / (2.0 * PI);
        buffer.iter_mut().for_each(|v| *v *= scale);
        buffer
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analyze_inverts_synthesize() {
        let t = SpectralTransform::new(16, 0.5);
        let original: Vec<Complex64> = (0..16)
            .map(|i| Complex64::new(i as f64, -(i as f64) * 0.5))
            .collect();
        let mut buf = original.clone();
        t.synthesize(&mut buf);
        t.analyze(&mut buf);
        for (a, b) in buf.iter().zip(&original) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn single_bin_is_a_tone() {
        let t = SpectralTransform::new(32, 0.25);
        let mut buf = vec![Complex64::new(0.0, 0.0); 32];
        buf[30] = Complex64::new(1.0, 0.0);
        let omega = t.bin_omega(30);
        assert_eq!(omega, -0.5);
        t.synthesize(&mut buf);
        let dt = t.time_step();
        for (j, v) in buf.iter().enumerate() {
            let expected = Complex64::cis(-omega * j as f64 * dt);
            assert!((v - expected).norm() < 1e-12);
        }
    }
}
