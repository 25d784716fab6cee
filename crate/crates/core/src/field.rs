//! Physical parameter types and their evaluation on frequency grids.
//!
//! Frequencies are baseband detunings `omega` from the optical carrier, and
//! every spectral quantity follows the inverse-transform convention
//! `f(t) = ∫ dΩ/2π F(Ω) e^{-iΩt}`, so a component at detuning `Ω` oscillates
//! at optical frequency `ω₀ + Ω`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance on the evenness of tabulated spectra.
pub const EVENNESS_TOLERANCE: f64 = 1e-12;
/// Default bound on `S(Ω_max)/S(0)` for a grid to count as covering the spectrum.
pub const DEFAULT_COVERAGE_CUTOFF: f64 = 1e-8;
/// An amplifier is broadband once its bandwidth reaches this multiple of `Ω_S`.
pub const DEFAULT_BROADBAND_FACTOR: f64 = 20.0;
pub const ELECTRON_CHARGE: f64 = 1.602_176_634e-19;

/// Common power spectrum `S(Ω)` of the signal and reference envelopes.
#[derive(Debug, Clone, PartialEq)]
pub enum Spectrum {
    /// `P_S·√(2π/Ω_S²)·exp(−Ω²/2Ω_S²)`, which integrates to `P_S` photons/s.
    Gaussian { power: f64, bandwidth: f64 },
    Tabulated(TabulatedSpectrum),
}

/// Piecewise-linear spectrum through sorted `(Ω, S)` nodes, zero outside the table.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedSpectrum {
    omega: Vec<f64>,
    density: Vec<f64>,
}

impl TabulatedSpectrum {
    pub fn new(mut points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidParameter {
                name: "points",
                reason: "a tabulated spectrum needs at least two nodes".into(),
            });
        }
        for &(omega, value) in &points {
            if !omega.is_finite() || !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "points",
                    reason: format!("non-finite node ({omega}, {value})"),
                });
            }
            if value < 0.0 {
                return Err(Error::NegativeDensity { omega, value });
            }
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        if points.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidParameter {
                name: "points",
                reason: "duplicate frequency nodes".into(),
            });
        }
        let table = TabulatedSpectrum {
            omega: points.iter().map(|p| p.0).collect(),
            density: points.iter().map(|p| p.1).collect(),
        };
        for (&omega, &left) in table.omega.iter().zip(&table.density) {
            let right = table.interpolate(-omega);
            let scale = left.abs().max(right.abs());
            if (left - right).abs() > EVENNESS_TOLERANCE * scale {
                return Err(Error::AsymmetricSpectrum { omega, left, right });
            }
        }
        Ok(table)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.omega.iter().copied().zip(self.density.iter().copied())
    }

    fn interpolate(&self, omega: f64) -> f64 {
        let n = self.omega.len();
        if omega < self.omega[0] || omega > self.omega[n - 1] {
            return 0.0;
        }
        let hi = self.omega.partition_point(|&x| x < omega);
        if hi < n && self.omega[hi] == omega {
            return self.density[hi];
        }
        let lo = hi - 1;
        let frac = (omega - self.omega[lo]) / (self.omega[hi] - self.omega[lo]);
        self.density[lo] + frac * (self.density[hi] - self.density[lo])
    }

    /// Trapezoid moments `(∫S dΩ/2π, ∫Ω²S dΩ/2π)` of the interpolant.
    fn moments(&self) -> (f64, f64) {
        let mut zeroth = 0.0;
        let mut second = 0.0;
        for i in 1..self.omega.len() {
            let h = self.omega[i] - self.omega[i - 1];
            let (a, b) = (self.density[i - 1], self.density[i]);
            zeroth += 0.5 * h * (a + b);
            second += 0.5 * h * (a * self.omega[i - 1].powi(2) + b * self.omega[i].powi(2));
        }
        (zeroth / (2.0 * PI), second / (2.0 * PI))
    }
}

impl Spectrum {
    pub fn gaussian(power: f64, bandwidth: f64) -> Result<Self> {
        positive("power", power)?;
        positive("bandwidth", bandwidth)?;
        Ok(Spectrum::Gaussian { power, bandwidth })
    }

    pub fn tabulated(points: Vec<(f64, f64)>) -> Result<Self> {
        TabulatedSpectrum::new(points).map(Spectrum::Tabulated)
    }

    pub fn density(&self, omega: f64) -> f64 {
        match self {
            Spectrum::Gaussian { power, bandwidth } => {
                power * (2.0 * PI).sqrt() / bandwidth
                    * (-omega * omega / (2.0 * bandwidth * bandwidth)).exp()
            }
            Spectrum::Tabulated(t) => t.interpolate(omega),
        }
    }

    pub fn peak_density(&self) -> f64 {
        self.density(0.0)
    }

    /// Total photon flux `∫S dΩ/2π`.
    pub fn power(&self) -> f64 {
        match self {
            Spectrum::Gaussian { power, .. } => *power,
            Spectrum::Tabulated(t) => t.moments().0,
        }
    }

    /// `Ω_S` for the Gaussian form, the rms width of the table otherwise.
    pub fn bandwidth(&self) -> f64 {
        match self {
            Spectrum::Gaussian { bandwidth, .. } => *bandwidth,
            Spectrum::Tabulated(t) => {
                let (zeroth, second) = t.moments();
                (second / zeroth).sqrt()
            }
        }
    }
}

/// Uniform detuning grid `Ω_k = (k − n/2)·ΔΩ`, `k = 0..n`, covering `[−Ω_max, Ω_max)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreqGrid {
    points: usize,
    spacing: f64,
    coverage_cutoff: f64,
}

impl FreqGrid {
    pub fn new(points: usize, spacing: f64) -> Result<Self> {
        if points < 2 || !points.is_power_of_two() {
            return Err(Error::InvalidParameter {
                name: "points",
                reason: format!("grid size must be a power of two >= 2, got {points}"),
            });
        }
        positive("spacing", spacing)?;
        Ok(FreqGrid {
            points,
            spacing,
            coverage_cutoff: DEFAULT_COVERAGE_CUTOFF,
        })
    }

    pub fn with_omega_max(points: usize, omega_max: f64) -> Result<Self> {
        positive("omega_max", omega_max)?;
        Self::new(points, 2.0 * omega_max / points as f64)
    }

    pub fn with_coverage_cutoff(mut self, cutoff: f64) -> Result<Self> {
        if !(cutoff > 0.0 && cutoff < 1.0) {
            return Err(Error::InvalidParameter {
                name: "coverage_cutoff",
                reason: format!("must lie in (0, 1), got {cutoff}"),
            });
        }
        self.coverage_cutoff = cutoff;
        Ok(self)
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn coverage_cutoff(&self) -> f64 {
        self.coverage_cutoff
    }

    pub fn omega_max(&self) -> f64 {
        self.points as f64 * self.spacing / 2.0
    }

    pub fn omega(&self, k: usize) -> f64 {
        (k as f64 - (self.points / 2) as f64) * self.spacing
    }

    pub fn omegas(&self) -> Vec<f64> {
        (0..self.points).map(|k| self.omega(k)).collect()
    }

    /// Companion time step `Δt = 2π/(n·ΔΩ)`.
    pub fn time_step(&self) -> f64 {
        2.0 * PI / (self.points as f64 * self.spacing)
    }

    /// Period of the companion time grid, `2π/ΔΩ`.
    pub fn record_length(&self) -> f64 {
        2.0 * PI / self.spacing
    }

    /// Same `Ω_max`, twice the points.
    pub fn refined(&self) -> Self {
        FreqGrid {
            points: self.points * 2,
            spacing: self.spacing / 2.0,
            coverage_cutoff: self.coverage_cutoff,
        }
    }

    pub fn check_coverage(&self, spectrum: &Spectrum) -> Result<()> {
        let peak = spectrum.peak_density();
        if peak <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "spectrum",
                reason: "S(0) must be positive".into(),
            });
        }
        let edge = spectrum.density(self.omega_max()).max(spectrum.density(-self.omega_max()));
        let ratio = edge / peak;
        if ratio < self.coverage_cutoff {
            Ok(())
        } else {
            Err(Error::GridTooNarrow {
                ratio,
                cutoff: self.coverage_cutoff,
            })
        }
    }
}

pub fn eval_spectrum(spectrum: &Spectrum, grid: &FreqGrid) -> Result<Vec<f64>> {
    grid.check_coverage(spectrum)?;
    Ok((0..grid.points())
        .map(|k| spectrum.density(grid.omega(k)))
        .collect())
}

/// One discrete reflector.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub reflectivity: Complex64,
    /// Round-trip group delay `T_j`.
    pub delay: f64,
    /// Taylor coefficients `[b₁, b₂, …]` of `β(Ω) = Σ b_k Ω^k / k!`.
    pub dispersion: Vec<f64>,
}

impl Layer {
    pub fn mirror(reflectivity: Complex64, delay: f64) -> Self {
        Layer {
            reflectivity,
            delay,
            dispersion: Vec::new(),
        }
    }

    pub fn with_dispersion(mut self, coefficients: Vec<f64>) -> Self {
        self.dispersion = coefficients;
        self
    }

    pub fn dispersion_phase(&self, omega: f64) -> f64 {
        taylor_phase(&self.dispersion, omega)
    }

    pub fn response(&self, omega: f64, carrier: f64) -> Complex64 {
        let phase = (carrier + omega) * self.delay + self.dispersion_phase(omega);
        self.reflectivity * Complex64::cis(phase)
    }
}

/// `Σ_k c_k Ω^k / k!` with `c_k = coefficients[k − 1]`.
pub fn taylor_phase(coefficients: &[f64], omega: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for (i, &b) in coefficients.iter().enumerate() {
        term *= omega / (i + 1) as f64;
        sum += b * term;
    }
    sum
}

/// Discrete-reflector sample, `H(Ω) = Σ_j r_j exp(i[(ω₀+Ω)T_j + β_j(Ω)])`.
#[derive(Debug, Clone, PartialEq)]
pub struct LayeredSample {
    carrier: f64,
    layers: Vec<Layer>,
}

impl LayeredSample {
    pub fn new(carrier: f64, layers: Vec<Layer>) -> Result<Self> {
        if !carrier.is_finite() {
            return Err(Error::InvalidParameter {
                name: "carrier",
                reason: "must be finite".into(),
            });
        }
        for layer in &layers {
            let r = layer.reflectivity;
            if !(r.re.is_finite() && r.im.is_finite()) || r.norm() > 1.0 + 1e-15 {
                return Err(Error::InvalidParameter {
                    name: "reflectivity",
                    reason: format!("|r| must not exceed 1, got {}", r.norm()),
                });
            }
            if !layer.delay.is_finite() || layer.dispersion.iter().any(|b| !b.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "layer",
                    reason: "delay and dispersion coefficients must be finite".into(),
                });
            }
        }
        Ok(LayeredSample { carrier, layers })
    }

    pub fn single_mirror(reflectivity: Complex64, delay: f64, carrier: f64) -> Result<Self> {
        Self::new(carrier, vec![Layer::mirror(reflectivity, delay)])
    }

    pub fn empty(carrier: f64) -> Self {
        LayeredSample {
            carrier,
            layers: Vec::new(),
        }
    }

    pub fn carrier(&self) -> f64 {
        self.carrier
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Layers of `self` followed by those of `other`; carriers must agree.
    pub fn concat(&self, other: &LayeredSample) -> Result<Self> {
        if self.carrier != other.carrier {
            return Err(Error::InvalidParameter {
                name: "carrier",
                reason: "cannot join samples with different carriers".into(),
            });
        }
        let mut layers = self.layers.clone();
        layers.extend(other.layers.iter().cloned());
        Ok(LayeredSample {
            carrier: self.carrier,
            layers,
        })
    }

    /// True when every `|r_j|` is at most `threshold`; the weak-mirror analytics assume this.
    pub fn is_weakly_reflecting(&self, threshold: f64) -> bool {
        self.layers.iter().all(|l| l.reflectivity.norm() <= threshold)
    }

    /// Largest delay magnitude including the group delay from `b₁`.
    pub fn max_delay(&self) -> f64 {
        self.layers
            .iter()
            .map(|l| (l.delay + l.dispersion.first().copied().unwrap_or(0.0)).abs())
            .fold(0.0, f64::max)
    }

    pub fn response(&self, omega: f64) -> Complex64 {
        self.layers
            .iter()
            .map(|l| l.response(omega, self.carrier))
            .sum()
    }
}

pub fn eval_sample_response(sample: &LayeredSample, grid: &FreqGrid) -> Vec<Complex64> {
    (0..grid.points())
        .map(|k| sample.response(grid.omega(k)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmpMode {
    Conjugating,
    PhaseInsensitive,
}

impl fmt::Display for AmpMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AmpMode::Conjugating => "conjugating",
            AmpMode::PhaseInsensitive => "phase_insensitive",
        })
    }
}

/// Gaussian gain profile `gain·exp(−Ω²/4Ω_bw²)`. An infinite bandwidth gives a flat gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmpResponse {
    mode: AmpMode,
    peak_gain: Complex64,
    bandwidth: f64,
}

impl AmpResponse {
    pub fn new(mode: AmpMode, peak_gain: Complex64, bandwidth: f64) -> Result<Self> {
        if !(peak_gain.re.is_finite() && peak_gain.im.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "gain",
                reason: "must be finite".into(),
            });
        }
        if bandwidth.is_nan() || bandwidth <= 0.0 {
            return Err(Error::NonPositiveParameter {
                name: "bandwidth",
                value: bandwidth,
            });
        }
        Ok(AmpResponse {
            mode,
            peak_gain,
            bandwidth,
        })
    }

    pub fn conjugator(gain: Complex64, bandwidth: f64) -> Result<Self> {
        Self::new(AmpMode::Conjugating, gain, bandwidth)
    }

    pub fn phase_insensitive(gain: Complex64, bandwidth: f64) -> Result<Self> {
        Self::new(AmpMode::PhaseInsensitive, gain, bandwidth)
    }

    pub fn mode(&self) -> AmpMode {
        self.mode
    }

    pub fn peak_gain(&self) -> Complex64 {
        self.peak_gain
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn gain(&self, omega: f64) -> Complex64 {
        self.peak_gain * (-omega * omega / (4.0 * self.bandwidth * self.bandwidth)).exp()
    }

    pub fn is_broadband(&self, source_bandwidth: f64, factor: f64) -> bool {
        self.bandwidth >= factor * source_bandwidth
    }

    pub fn require_mode(&self, expected: AmpMode) -> Result<()> {
        if self.mode == expected {
            Ok(())
        } else {
            Err(Error::WrongAmpMode {
                expected,
                found: self.mode,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledGain {
    pub values: Vec<Complex64>,
    pub broadband: bool,
}

pub fn eval_amp_response(
    amp: &AmpResponse,
    grid: &FreqGrid,
    source_bandwidth: f64,
    broadband_factor: f64,
) -> SampledGain {
    SampledGain {
        values: (0..grid.points()).map(|k| amp.gain(grid.omega(k))).collect(),
        broadband: amp.is_broadband(source_bandwidth, broadband_factor),
    }
}

/// Photodetection parameters shared by both detectors of the balanced pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionChain {
    quantum_efficiency: f64,
    current_gain: f64,
    thermal_density: f64,
    electron_charge: f64,
    integration_time: f64,
    thermal_rate: f64,
}

impl DetectionChain {
    pub fn new(
        quantum_efficiency: f64,
        current_gain: f64,
        thermal_density: f64,
        electron_charge: f64,
        integration_time: f64,
    ) -> Result<Self> {
        if !(quantum_efficiency > 0.0 && quantum_efficiency <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "quantum_efficiency",
                reason: format!("must lie in (0, 1], got {quantum_efficiency}"),
            });
        }
        positive("current_gain", current_gain)?;
        if !(thermal_density >= 0.0 && thermal_density.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "thermal_density",
                reason: format!("must be finite and >= 0, got {thermal_density}"),
            });
        }
        positive("electron_charge", electron_charge)?;
        positive("integration_time", integration_time)?;
        Ok(DetectionChain {
            quantum_efficiency,
            current_gain,
            thermal_density,
            electron_charge,
            integration_time,
            thermal_rate: thermal_density / (electron_charge * electron_charge * quantum_efficiency),
        })
    }

    /// Unit-efficiency, unit-gain, noiseless-electronics chain with SI charge.
    pub fn ideal(integration_time: f64) -> Result<Self> {
        Self::new(1.0, 1.0, 0.0, ELECTRON_CHARGE, integration_time)
    }

    pub fn quantum_efficiency(&self) -> f64 {
        self.quantum_efficiency
    }

    pub fn current_gain(&self) -> f64 {
        self.current_gain
    }

    pub fn thermal_density(&self) -> f64 {
        self.thermal_density
    }

    pub fn electron_charge(&self) -> f64 {
        self.electron_charge
    }

    pub fn integration_time(&self) -> f64 {
        self.integration_time
    }

    /// `Ω_th = S_ith/(q²η)`.
    pub fn thermal_rate(&self) -> f64 {
        self.thermal_rate
    }

    pub fn with_integration_time(&self, integration_time: f64) -> Result<Self> {
        Self::new(
            self.quantum_efficiency,
            self.current_gain,
            self.thermal_density,
            self.electron_charge,
            integration_time,
        )
    }

    /// `2qηG_A`, the scale from `Re z(T)` to mean difference current.
    pub fn michelson_scale(&self) -> f64 {
        2.0 * self.electron_charge * self.quantum_efficiency * self.current_gain
    }

    /// `q²η²/2`, the coincidence-signature scale.
    pub fn coincidence_scale(&self) -> f64 {
        let qe = self.electron_charge * self.quantum_efficiency;
        0.5 * qe * qe
    }
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveParameter { name, value })
    }
}
