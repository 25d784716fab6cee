//! Monte Carlo realisation of the source, the optical train and balanced detection.
//!
//! Fields are periodic records on the time grid companion to a [`FreqGrid`], in
//! photon units (√(photons/s)). Because the synthesized processes are periodic
//! and stationary, filtering by multiplication in the transform domain is an
//! exact convolution; delays are limited to half the record so that they do not
//! wrap.
//!
//! Every trial draws from its own ChaCha stream seeded by [`derive_seed`], so
//! an ensemble is bit-identical however its trials are scheduled.

mod detect;
mod experiment;
mod source;

pub use detect::{michelson_detect, DetectionRecord, DetectorNoise};
pub use experiment::{
    run_snr_experiment, ChainSetup, Ensemble, MonteCarlo, NoiseSwitches, SnrExperiment,
    SnrExperimentSetup, TrialRecord,
};
pub use source::{lagged_product, CorrelationEstimate, CorrelationStudy, FieldRealization, LagStatistics, SourceKind};

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::field::{AmpMode, AmpResponse, FreqGrid, LayeredSample};
use crate::transform::SpectralTransform;

/// Uniformly sampled complex envelope, `samples[j] = E(j·dt)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSamples {
    pub dt: f64,
    pub samples: Vec<Complex64>,
}

impl FieldSamples {
    pub fn new(dt: f64, samples: Vec<Complex64>) -> Self {
        FieldSamples { dt, samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn record_length(&self) -> f64 {
        self.dt * self.samples.len() as f64
    }

    /// Time-averaged `|E|²`.
    pub fn mean_power(&self) -> f64 {
        self.samples.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.len() as f64
    }

    pub fn conj(&self) -> Self {
        FieldSamples {
            dt: self.dt,
            samples: self.samples.iter().map(|v| v.conj()).collect(),
        }
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        FieldSamples {
            dt: self.dt,
            samples: self.samples.iter().map(|v| v * factor).collect(),
        }
    }
}

/// SplitMix64 finaliser.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-trial seed from the master seed and the trial counter.
pub fn derive_seed(master: u64, trial: u64) -> u64 {
    mix(master ^ mix(trial.wrapping_mul(0xD1B5_4A32_D192_ED03)))
}

/// Unit-variance circular complex Gaussian, `⟨|a|²⟩ = 1`.
pub(crate) fn circular_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * FRAC_1_SQRT_2
}

/// Owns the transform plans for one grid and applies the optical elements.
#[derive(Debug, Clone)]
pub struct FieldEngine {
    grid: FreqGrid,
    transform: SpectralTransform,
}

impl FieldEngine {
    pub fn new(grid: FreqGrid) -> Self {
        FieldEngine {
            transform: SpectralTransform::new(grid.points(), grid.spacing()),
            grid,
        }
    }

    pub fn grid(&self) -> &FreqGrid {
        &self.grid
    }

    pub fn time_step(&self) -> f64 {
        self.grid.time_step()
    }

    pub fn record_length(&self) -> f64 {
        self.grid.record_length()
    }

    fn check_grid(&self, field: &FieldSamples) -> Result<()> {
        let dt = self.time_step();
        if field.len() != self.grid.points() || (field.dt - dt).abs() > 1e-12 * dt {
            return Err(Error::GridMismatch {
                left: field.len(),
                left_dt: field.dt,
                right: self.grid.points(),
                right_dt: dt,
            });
        }
        Ok(())
    }

    /// Multiplies the field's transform by `response(Ω)`.
    fn filter(&self, field: &FieldSamples, response: impl Fn(f64) -> Complex64) -> FieldSamples {
        let mut buf = field.samples.clone();
        self.transform.analyze(&mut buf);
        for (m, v) in buf.iter_mut().enumerate() {
            *v *= response(self.transform.bin_omega(m));
        }
        self.transform.synthesize(&mut buf);
        FieldSamples::new(field.dt, buf)
    }

    /// Reflection from the sample, `E_H = E ⋆ h`.
    ///
    /// `guard` is the extra margin (typically `6/Ω_S`) that the largest layer
    /// delay must leave inside half the record.
    pub fn apply_sample(&self, field: &FieldSamples, sample: &LayeredSample, guard: f64) -> Result<FieldSamples> {
        self.check_grid(field)?;
        let delay = sample.max_delay();
        let half_record = 0.5 * field.record_length();
        if delay + guard > half_record {
            return Err(Error::DelayExceedsGuardBand {
                delay,
                guard,
                half_record,
            });
        }
        Ok(self.filter(field, |omega| sample.response(omega)))
    }

    fn add_white_noise<R: Rng + ?Sized>(&self, field: &mut FieldSamples, rng: &mut R) {
        // ⟨w*(t+τ)w(t)⟩ = δ(τ) on a grid of step dt
        let scale = field.dt.recip().sqrt();
        for v in field.samples.iter_mut() {
            *v += circular_normal(rng) * scale;
        }
    }

    /// `E_C = [E* + w] ⋆ ν`, with `w` drawn only when `inject_noise` is set.
    pub fn conjugate_amplify<R: Rng + ?Sized>(
        &self,
        field: &FieldSamples,
        conjugator: &AmpResponse,
        inject_noise: bool,
        rng: &mut R,
    ) -> Result<FieldSamples> {
        conjugator.require_mode(AmpMode::Conjugating)?;
        self.check_grid(field)?;
        let mut input = field.conj();
        if inject_noise {
            self.add_white_noise(&mut input, rng);
        }
        Ok(self.filter(&input, |omega| conjugator.gain(omega)))
    }

    /// `[E + w] ⋆ g` for the phase-insensitive amplifier of the two-pass layout.
    /// The injected noise has the same unit density as the conjugator's.
    pub fn amplify<R: Rng + ?Sized>(
        &self,
        field: &FieldSamples,
        amplifier: &AmpResponse,
        inject_noise: bool,
        rng: &mut R,
    ) -> Result<FieldSamples> {
        amplifier.require_mode(AmpMode::PhaseInsensitive)?;
        self.check_grid(field)?;
        let mut input = field.clone();
        if inject_noise {
            self.add_white_noise(&mut input, rng);
        }
        Ok(self.filter(&input, |omega| amplifier.gain(omega)))
    }

    /// Transform of a reference field, reusable for many delays.
    pub fn reference_arm(&self, reference: &FieldSamples) -> Result<ReferenceArm> {
        self.check_grid(reference)?;
        let mut coefficients = reference.samples.clone();
        self.transform.analyze(&mut coefficients);
        Ok(ReferenceArm {
            dt: reference.dt,
            coefficients,
        })
    }

    /// `E_R(t − T)·e^{iω₀T}`: the delayed reference in the signal arm's baseband frame.
    pub fn delayed_reference(&self, arm: &ReferenceArm, delay: f64, carrier: f64) -> FieldSamples {
        let carrier_phase = Complex64::cis(carrier * delay);
        let mut buf: Vec<Complex64> = arm
            .coefficients
            .iter()
            .enumerate()
            .map(|(m, &a)| a * Complex64::cis(self.transform.bin_omega(m) * delay) * carrier_phase)
            .collect();
        self.transform.synthesize(&mut buf);
        FieldSamples::new(arm.dt, buf)
    }
}

#[derive(Debug, Clone)]
pub struct ReferenceArm {
    dt: f64,
    coefficients: Vec<Complex64>,
}
