//! Gaussian source synthesis and correlation estimators.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{circular_normal, derive_seed, FieldEngine, FieldSamples};
use crate::error::{Error, Result};
use crate::field::Spectrum;
use crate::stats::Moments;

/// Joint statistics of the signal and reference beams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    /// Classical maximum phase-sensitive cross-correlation, `E_R = E_S*`.
    PhaseSensitive,
    /// Maximum phase-insensitive cross-correlation, `E_R = E_S`.
    PhaseInsensitive,
    /// The `√(S(S+1))` quantum bound. Not reachable by a classical sampler.
    QuantumMaximum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldRealization {
    pub signal: FieldSamples,
    pub reference: FieldSamples,
    pub kind: SourceKind,
    /// Seed of the generator that produced the draw, when known.
    pub seed: Option<u64>,
}

impl FieldEngine {
    /// Draws one realisation of the source on this engine's grid.
    ///
    /// Bin `Ω_m` receives `√(S(Ω_m)ΔΩ/2π)·a_m` with `a_m` unit circular Gaussian,
    /// so `⟨E_S*(t+τ)E_S(t)⟩` is the Riemann sum of `F⁻¹[S](τ)`. The Nyquist bin
    /// is left empty.
    pub fn synthesize_source<R: Rng + ?Sized>(
        &self,
        spectrum: &Spectrum,
        kind: SourceKind,
        rng: &mut R,
    ) -> Result<FieldRealization> {
        if kind == SourceKind::QuantumMaximum {
            return Err(Error::QuantumSourceNotSampleable);
        }
        self.grid.check_coverage(spectrum)?;
        let n = self.grid.points();
        let bin = self.grid.spacing() / (2.0 * PI);
        let mut coefficients: Vec<Complex64> = (0..n)
            .map(|m| {
                let a = circular_normal(rng);
                if m == n / 2 {
                    Complex64::new(0.0, 0.0)
                } else {
                    a * (spectrum.density(self.transform.bin_omega(m)) * bin).sqrt()
                }
            })
            .collect();
        self.transform.synthesize(&mut coefficients);
        let signal = FieldSamples::new(self.time_step(), coefficients);
        let reference = match kind {
            SourceKind::PhaseSensitive => signal.conj(),
            _ => signal.clone(),
        };
        Ok(FieldRealization {
            signal,
            reference,
            kind,
            seed: None,
        })
    }

    pub fn synthesize_seeded(&self, spectrum: &Spectrum, kind: SourceKind, seed: u64) -> Result<FieldRealization> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut realization = self.synthesize_source(spectrum, kind, &mut rng)?;
        realization.seed = Some(seed);
        Ok(realization)
    }
}

/// Time average of `a(t + lag·dt)·b(t)` over `t_j`, `j ∈ range`, with periodic wrap.
pub fn lagged_product(a: &[Complex64], b: &[Complex64], lag: isize, range: std::ops::Range<usize>) -> Complex64 {
    let n = a.len() as isize;
    let count = range.len() as f64;
    let sum: Complex64 = range
        .map(|j| a[(j as isize + lag).rem_euclid(n) as usize] * b[j])
        .sum();
    sum / count
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationEstimate {
    pub mean: Complex64,
    pub std_error_re: f64,
    pub std_error_im: f64,
}

impl CorrelationEstimate {
    fn of(values: &[Complex64]) -> Self {
        let re = Moments::of(&values.iter().map(|v| v.re).collect::<Vec<_>>());
        let im = Moments::of(&values.iter().map(|v| v.im).collect::<Vec<_>>());
        CorrelationEstimate {
            mean: Complex64::new(re.mean, im.mean),
            std_error_re: re.std_error(),
            std_error_im: im.std_error(),
        }
    }

    /// Largest per-component deviation from `expected` in standard errors.
    pub fn sigmas_from(&self, expected: Complex64) -> f64 {
        let dre = (self.mean.re - expected.re).abs() / self.std_error_re;
        let dim = (self.mean.im - expected.im).abs() / self.std_error_im;
        let score = |d: f64| if d.is_nan() { 0.0 } else { d };
        score(dre).max(score(dim))
    }
}

/// Ensemble estimates at one lag `τ = lag·dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LagStatistics {
    pub lag: isize,
    pub tau: f64,
    /// `⟨E_S*(t+τ) E_S(t)⟩`
    pub auto: CorrelationEstimate,
    /// `⟨E_S(t+τ) E_R(t)⟩`
    pub phase_sensitive: CorrelationEstimate,
    /// `⟨E_S*(t+τ) E_R(t)⟩`
    pub phase_insensitive: CorrelationEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationStudy {
    pub trials: usize,
    pub lags: Vec<LagStatistics>,
    /// Ensemble mean of `E_S(0)` with its standard errors.
    pub signal_mean: CorrelationEstimate,
    pub reference_mean: CorrelationEstimate,
}

impl CorrelationStudy {
    /// Time-averaged estimators over whole records, averaged over `trials` draws.
    pub fn run(
        engine: &FieldEngine,
        spectrum: &Spectrum,
        kind: SourceKind,
        lags: &[isize],
        trials: usize,
        master_seed: u64,
    ) -> Result<Self> {
        let per_trial: Vec<(Vec<[Complex64; 3]>, Complex64, Complex64)> = (0..trials as u64)
            .into_par_iter()
            .map(|trial| {
                let f = engine.synthesize_seeded(spectrum, kind, derive_seed(master_seed, trial))?;
                let s = &f.signal.samples;
                let s_conj: Vec<Complex64> = s.iter().map(|v| v.conj()).collect();
                let r = &f.reference.samples;
                let all = 0..s.len();
                let values = lags
                    .iter()
                    .map(|&lag| {
                        [
                            lagged_product(&s_conj, s, lag, all.clone()),
                            lagged_product(s, r, lag, all.clone()),
                            lagged_product(&s_conj, r, lag, all.clone()),
                        ]
                    })
                    .collect();
                Ok((values, s[0], r[0]))
            })
            .collect::<Result<_>>()?;
        let dt = engine.time_step();
        let column = |i: usize, c: usize| -> Vec<Complex64> { per_trial.iter().map(|t| t.0[i][c]).collect() };
        let lags = lags
            .iter()
            .enumerate()
            .map(|(i, &lag)| LagStatistics {
                lag,
                tau: lag as f64 * dt,
                auto: CorrelationEstimate::of(&column(i, 0)),
                phase_sensitive: CorrelationEstimate::of(&column(i, 1)),
                phase_insensitive: CorrelationEstimate::of(&column(i, 2)),
            })
            .collect();
        Ok(CorrelationStudy {
            trials,
            lags,
            signal_mean: CorrelationEstimate::of(&per_trial.iter().map(|t| t.1).collect::<Vec<_>>()),
            reference_mean: CorrelationEstimate::of(&per_trial.iter().map(|t| t.2).collect::<Vec<_>>()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FreqGrid;

    #[test]
    fn quantum_source_is_rejected() {
        let engine = FieldEngine::new(FreqGrid::with_omega_max(256, 12.0).unwrap());
        let s = Spectrum::gaussian(1.0, 1.0).unwrap();
        assert_eq!(
            engine.synthesize_seeded(&s, SourceKind::QuantumMaximum, 1),
            Err(Error::QuantumSourceNotSampleable)
        );
    }

    #[test]
    fn narrow_grid_is_rejected() {
        let engine = FieldEngine::new(FreqGrid::with_omega_max(256, 2.0).unwrap());
        let s = Spectrum::gaussian(1.0, 1.0).unwrap();
        assert!(matches!(
            engine.synthesize_seeded(&s, SourceKind::PhaseSensitive, 1),
            Err(Error::GridTooNarrow { .. })
        ));
    }

    #[test]
    fn single_record_power_is_the_coefficient_sum() {
        // Parseval: the record average of |E|² equals Σ|A_m|².
        let engine = FieldEngine::new(FreqGrid::with_omega_max(512, 12.0).unwrap());
        let s = Spectrum::gaussian(2.0, 1.0).unwrap();
        let f = engine.synthesize_seeded(&s, SourceKind::PhaseSensitive, 9).unwrap();
        let mut coeffs = f.signal.samples.clone();
        engine.transform.analyze(&mut coeffs);
        let parseval: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        assert!((f.signal.mean_power() / parseval - 1.0).abs() < 1e-12);
        assert!(coeffs[256].norm() < 1e-12);
    }
}
