//! Mean interference signatures of the four OCT configurations.
//!
//! Each Michelson signature is `z(T) = ∫ dΩ/2π K(Ω) S(Ω) e^{−i(Ω−ω₀)T}` with a
//! modality-specific sample kernel `K`:
//!
//! | modality          | `K(Ω)`                         |
//! |-------------------|--------------------------------|
//! | `pc_oct`          | `H*(−Ω) H(Ω) V*(−Ω)`           |
//! | `c_oct`           | `H*(−Ω)`                       |
//! | `two_pass_c_oct`  | `[G(−Ω) H(−Ω)²]*`              |
//!
//! and the mean difference current is `2qηG_A·Re z(T)`. The coincidence
//! signature of `q_oct` is a constant background minus the real part of
//! `(q²η²/2) ∫ dΩ/2π H*(−Ω) H(Ω) S(Ω) e^{−i2ΩT}`.
//!
//! Integrals are trapezoid sums on the [`FreqGrid`]. The optical carrier only
//! enters through analytic phase factors, so delay grids can be as coarse as
//! the envelope allows.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{
    eval_spectrum, AmpMode, AmpResponse, DetectionChain, FreqGrid, Layer, LayeredSample, Spectrum,
};
use crate::fit::{taylor_fit, unwrap_phase};

/// Spectral density above which the biphoton-limit coincidence formula is flagged.
pub const BIPHOTON_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modality {
    PcOct,
    QOct,
    COct,
    TwoPassCOct,
}

impl Modality {
    pub const ALL: [Modality; 4] = [
        Modality::PcOct,
        Modality::QOct,
        Modality::COct,
        Modality::TwoPassCOct,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Modality::PcOct => "pc_oct",
            Modality::QOct => "q_oct",
            Modality::COct => "c_oct",
            Modality::TwoPassCOct => "two_pass_c_oct",
        }
    }

    /// Multiplier of `Ω` in the delay kernel `e^{−i·rate·Ω·T}`.
    pub fn delay_rate(self) -> f64 {
        match self {
            Modality::QOct => 2.0,
            _ => 1.0,
        }
    }

    /// The envelope of a mirror at `T₀` peaks at `T = factor·T₀`.
    pub fn peak_delay_factor(self) -> f64 {
        match self {
            Modality::PcOct | Modality::TwoPassCOct => 2.0,
            Modality::COct | Modality::QOct => 1.0,
        }
    }

    pub fn amplifier_mode(self) -> Option<AmpMode> {
        match self {
            Modality::PcOct => Some(AmpMode::Conjugating),
            Modality::TwoPassCOct => Some(AmpMode::PhaseInsensitive),
            Modality::COct | Modality::QOct => None,
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Modality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Modality::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParameter {
                name: "modality",
                reason: format!("unknown modality `{s}`"),
            })
    }
}

/// A signature sampled on a reference-delay grid.
///
/// For Michelson modalities `values` holds the unscaled `z(T)` and
/// `trace = scale·Re z`. For `q_oct`, `values` holds the scaled complex dip
/// term and `trace = background − Re(values)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignatureTrace {
    pub modality: Modality,
    pub delays: Vec<f64>,
    pub values: Vec<Complex64>,
    pub trace: Vec<f64>,
    pub background: Option<f64>,
    pub scale: f64,
    pub carrier: f64,
    pub warnings: Vec<String>,
}

impl SignatureTrace {
    pub fn envelope(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    /// Sample index and delay of the largest envelope value.
    pub fn envelope_peak(&self) -> Option<(usize, f64)> {
        let env = self.envelope();
        env.iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| (i, self.delays[i]))
    }

    /// Real fringe at `delays[index] + offset`, holding the envelope fixed over
    /// the offset and advancing only the carrier phase.
    pub fn fringe_near(&self, index: usize, offset: f64) -> f64 {
        let z = self.values[index] * Complex64::cis(self.carrier * offset);
        match self.background {
            Some(bg) => bg - z.re,
            None => self.scale * z.re,
        }
    }
}

pub fn extract_envelope(trace: &SignatureTrace) -> Vec<f64> {
    trace.envelope()
}

/// Sample-dependent part of a signature integral, ready to be evaluated at any delay.
pub(crate) struct Integrand {
    modality: Modality,
    omegas: Vec<f64>,
    weights: Vec<Complex64>,
    carrier: f64,
}

impl Integrand {
    pub(crate) fn build(
        modality: Modality,
        spectrum: &[f64],
        sample: &LayeredSample,
        amplifier: Option<&AmpResponse>,
        grid: &FreqGrid,
    ) -> Result<Self> {
        let amp = match modality.amplifier_mode() {
            Some(mode) => {
                let a = amplifier.ok_or_else(|| Error::InvalidParameter {
                    name: "amplifier",
                    reason: format!("{modality} needs a {mode} amplifier"),
                })?;
                a.require_mode(mode)?;
                Some(a)
            }
            None => None,
        };
        let measure = grid.spacing() / (2.0 * PI);
        let omegas = grid.omegas();
        let weights = omegas
            .iter()
            .zip(spectrum)
            .map(|(&omega, &s)| {
                let kernel = match modality {
                    Modality::COct => sample.response(-omega).conj(),
                    Modality::QOct => sample.response(-omega).conj() * sample.response(omega),
                    Modality::PcOct => {
                        let v = amp.expect("checked above").gain(-omega).conj();
                        sample.response(-omega).conj() * sample.response(omega) * v
                    }
                    Modality::TwoPassCOct => {
                        let h = sample.response(-omega);
                        (amp.expect("checked above").gain(-omega) * h * h).conj()
                    }
                };
                kernel * (s * measure)
            })
            .collect();
        Ok(Integrand {
            modality,
            omegas,
            weights,
            carrier: sample.carrier(),
        })
    }

    /// The unscaled integral at delay `t`, carrier phase included for Michelson modalities.
    pub(crate) fn evaluate(&self, t: f64) -> Complex64 {
        let rate = self.modality.delay_rate();
        let sum: Complex64 = self
            .omegas
            .iter()
            .zip(&self.weights)
            .map(|(&omega, &w)| w * Complex64::cis(-rate * omega * t))
            .sum();
        match self.modality {
            Modality::QOct => sum,
            _ => sum * Complex64::cis(self.carrier * t),
        }
    }
}

fn biphoton_warnings(spectrum: &[f64]) -> Vec<String> {
    let max = spectrum.iter().copied().fold(0.0, f64::max);
    if max >= BIPHOTON_LIMIT {
        vec![format!(
            "max S(omega) = {max:.3e} is not small; the coincidence formula assumes the biphoton limit S << 1"
        )]
    } else {
        Vec::new()
    }
}

fn michelson_trace(
    modality: Modality,
    spectrum: &Spectrum,
    sample: &LayeredSample,
    amplifier: Option<&AmpResponse>,
    detection: &DetectionChain,
    grid: &FreqGrid,
    delays: &[f64],
) -> Result<SignatureTrace> {
    let s = eval_spectrum(spectrum, grid)?;
    let integrand = Integrand::build(modality, &s, sample, amplifier, grid)?;
    let values: Vec<Complex64> = delays.par_iter().map(|&t| integrand.evaluate(t)).collect();
    let scale = detection.michelson_scale();
    Ok(SignatureTrace {
        modality,
        delays: delays.to_vec(),
        trace: values.iter().map(|z| scale * z.re).collect(),
        values,
        background: None,
        scale,
        carrier: sample.carrier(),
        warnings: Vec::new(),
    })
}

pub fn pc_oct_signature(
    spectrum: &Spectrum,
    sample: &LayeredSample,
    conjugator: &AmpResponse,
    detection: &DetectionChain,
    grid: &FreqGrid,
    delays: &[f64],
) -> Result<SignatureTrace> {
    conjugator.require_mode(AmpMode::Conjugating)?;
    michelson_trace(Modality::PcOct, spectrum, sample, Some(conjugator), detection, grid, delays)
}

pub fn c_oct_signature(
    spectrum: &Spectrum,
    sample: &LayeredSample,
    detection: &DetectionChain,
    grid: &FreqGrid,
    delays: &[f64],
) -> Result<SignatureTrace> {
    michelson_trace(Modality::COct, spectrum, sample, None, detection, grid, delays)
}

pub fn two_pass_c_oct_signature(
    spectrum: &Spectrum,
    sample: &LayeredSample,
    amplifier: &AmpResponse,
    detection: &DetectionChain,
    grid: &FreqGrid,
    delays: &[f64],
) -> Result<SignatureTrace> {
    amplifier.require_mode(AmpMode::PhaseInsensitive)?;
    michelson_trace(
        Modality::TwoPassCOct,
        spectrum,
        sample,
        Some(amplifier),
        detection,
        grid,
        delays,
    )
}

/// Coincidence signature `C(T) = background − dip(T)`.
///
/// Uses `q` and `η` from `detection`; gain and thermal noise do not enter.
pub fn q_oct_signature(
    spectrum: &Spectrum,
    sample: &LayeredSample,
    detection: &DetectionChain,
    grid: &FreqGrid,
    delays: &[f64],
) -> Result<SignatureTrace> {
    let s = eval_spectrum(spectrum, grid)?;
    let warnings = biphoton_warnings(&s);
    let integrand = Integrand::build(Modality::QOct, &s, sample, None, grid)?;
    let scale = detection.coincidence_scale();
    let measure = grid.spacing() / (2.0 * PI);
    let background = scale
        * (0..grid.points())
            .map(|k| sample.response(grid.omega(k)).norm_sqr() * s[k] * measure)
            .sum::<f64>();
    let values: Vec<Complex64> = delays
        .par_iter()
        .map(|&t| integrand.evaluate(t) * scale)
        .collect();
    Ok(SignatureTrace {
        modality: Modality::QOct,
        delays: delays.to_vec(),
        trace: values.iter().map(|z| background - z.re).collect(),
        values,
        background: Some(background),
        scale,
        carrier: sample.carrier(),
        warnings,
    })
}

/// Everything needed to compute any of the four signatures.
#[derive(Debug, Clone, PartialEq)]
pub struct OctSetup {
    pub spectrum: Spectrum,
    pub sample: LayeredSample,
    pub conjugator: Option<AmpResponse>,
    pub amplifier: Option<AmpResponse>,
    pub detection: DetectionChain,
    pub grid: FreqGrid,
}

impl OctSetup {
    pub fn signature(&self, modality: Modality, delays: &[f64]) -> Result<SignatureTrace> {
        let amp = || required_amplifier(modality, self.conjugator.as_ref(), self.amplifier.as_ref());
        match modality {
            Modality::PcOct => pc_oct_signature(
                &self.spectrum,
                &self.sample,
                amp()?,
                &self.detection,
                &self.grid,
                delays,
            ),
            Modality::COct => {
                c_oct_signature(&self.spectrum, &self.sample, &self.detection, &self.grid, delays)
            }
            Modality::QOct => {
                q_oct_signature(&self.spectrum, &self.sample, &self.detection, &self.grid, delays)
            }
            Modality::TwoPassCOct => two_pass_c_oct_signature(
                &self.spectrum,
                &self.sample,
                amp()?,
                &self.detection,
                &self.grid,
                delays,
            ),
        }
    }
}

/// The conjugator for `pc_oct`, the phase-insensitive amplifier for `two_pass_c_oct`.
pub(crate) fn required_amplifier<'a>(
    modality: Modality,
    conjugator: Option<&'a AmpResponse>,
    amplifier: Option<&'a AmpResponse>,
) -> Result<&'a AmpResponse> {
    let (slot, name) = match modality.amplifier_mode() {
        Some(AmpMode::Conjugating) => (conjugator, "conjugator"),
        Some(AmpMode::PhaseInsensitive) => (amplifier, "amplifier"),
        None => {
            return Err(Error::InvalidParameter {
                name: "amplifier",
                reason: format!("{modality} uses no amplifier"),
            })
        }
    };
    slot.ok_or_else(|| Error::InvalidParameter {
        name,
        reason: format!("{modality} needs a {name}"),
    })
}

/// Inclusive, evenly spaced sample points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Sweep {
    pub fn new(start: f64, stop: f64, steps: usize) -> Result<Self> {
        let sweep = Sweep { start, stop, steps };
        sweep.validate()?;
        Ok(sweep)
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 || !(self.stop > self.start) || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::InvalidParameter {
                name: "sweep",
                reason: format!(
                    "need start < stop and at least two steps, got [{}, {}] x {}",
                    self.start, self.stop, self.steps
                ),
            });
        }
        Ok(())
    }

    pub fn centered(center: f64, half_width: f64, steps: usize) -> Self {
        Sweep {
            start: center - half_width,
            stop: center + half_width,
            steps,
        }
    }

    pub fn points(&self) -> Vec<f64> {
        let h = (self.stop - self.start) / (self.steps - 1) as f64;
        (0..self.steps).map(|i| self.start + h * i as f64).collect()
    }
}

/// A single weakly-reflecting mirror and the rest of the apparatus.
#[derive(Debug, Clone, PartialEq)]
pub struct MirrorSetup {
    pub spectrum: Spectrum,
    pub reflectivity: Complex64,
    pub mirror_delay: f64,
    pub dispersion: Vec<f64>,
    pub carrier: f64,
    pub conjugator: Option<AmpResponse>,
    pub amplifier: Option<AmpResponse>,
    pub detection: DetectionChain,
    pub grid: FreqGrid,
}

impl MirrorSetup {
    pub fn sample(&self, mirror_delay: f64, dispersion: &[f64]) -> Result<LayeredSample> {
        LayeredSample::new(
            self.carrier,
            vec![Layer::mirror(self.reflectivity, mirror_delay).with_dispersion(dispersion.to_vec())],
        )
    }

    pub fn oct_setup(&self) -> Result<OctSetup> {
        Ok(OctSetup {
            spectrum: self.spectrum.clone(),
            sample: self.sample(self.mirror_delay, &self.dispersion)?,
            conjugator: self.conjugator,
            amplifier: self.amplifier,
            detection: self.detection,
            grid: self.grid,
        })
    }

    pub fn with_dispersion(&self, dispersion: Vec<f64>) -> Self {
        MirrorSetup {
            dispersion,
            ..self.clone()
        }
    }

    /// The amplifier `modality` uses, if any.
    pub fn amplifier_for(&self, modality: Modality) -> Result<Option<&AmpResponse>> {
        match modality.amplifier_mode() {
            Some(mode) => {
                let a = required_amplifier(modality, self.conjugator.as_ref(), self.amplifier.as_ref())?;
                a.require_mode(mode)?;
                Ok(Some(a))
            }
            None => Ok(None),
        }
    }

    fn prepare(&self, modality: Modality) -> Result<PreparedMirror<'_>> {
        Ok(PreparedMirror {
            setup: self,
            modality,
            amplifier: self.amplifier_for(modality)?,
            spectrum: eval_spectrum(&self.spectrum, &self.grid)?,
        })
    }
}

struct PreparedMirror<'a> {
    setup: &'a MirrorSetup,
    modality: Modality,
    amplifier: Option<&'a AmpResponse>,
    spectrum: Vec<f64>,
}

impl PreparedMirror<'_> {
    /// Envelope magnitude at reference delay `t` for a mirror at `t0`.
    fn envelope(&self, t0: f64, t: f64) -> Result<f64> {
        let sample = self.setup.sample(t0, &self.setup.dispersion)?;
        let integrand = Integrand::build(
            self.modality,
            &self.spectrum,
            &sample,
            self.amplifier,
            &self.setup.grid,
        )?;
        Ok(integrand.evaluate(t).norm())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolutionReport {
    pub modality: Modality,
    /// Full width in `T₀` between the e⁻² points of the envelope.
    pub full_width: f64,
    pub left_crossing: f64,
    pub right_crossing: f64,
    pub peak_mirror_delay: f64,
    pub ratio_to_c_oct: Option<f64>,
}

/// e⁻² full width of the envelope as a function of mirror delay `T₀` at fixed reference delay.
pub fn axial_resolution(
    modality: Modality,
    setup: &MirrorSetup,
    reference_delay: f64,
    sweep: &Sweep,
) -> Result<ResolutionReport> {
    sweep.validate()?;
    let prepared = setup.prepare(modality)?;
    let f = |t0: f64| prepared.envelope(t0, reference_delay);

    let xs = sweep.points();
    let samples = xs
        .par_iter()
        .map(|&x| f(x))
        .collect::<Result<Vec<f64>>>()?;
    let (imax, _) = samples
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("sweep has points");

    let lo = xs[imax.saturating_sub(1)];
    let hi = xs[(imax + 1).min(xs.len() - 1)];
    let (peak_x, peak) = golden_max(&f, lo, hi, samples[imax], xs[imax])?;
    let threshold = peak * (-2.0f64).exp();

    let right = (imax + 1..xs.len())
        .find(|&j| samples[j] < threshold)
        .ok_or(Error::NoCrossing { side: "right" })?;
    let left = (0..imax)
        .rev()
        .find(|&j| samples[j] < threshold)
        .ok_or(Error::NoCrossing { side: "left" })?;
    let coarse = xs[right] - xs[left];
    let tol = 1e-9 * coarse;
    let right_x = bisect(&|x| Ok(f(x)? - threshold), xs[right - 1], xs[right], tol)?;
    let left_x = bisect(&|x| Ok(f(x)? - threshold), xs[left + 1], xs[left], tol)?;

    Ok(ResolutionReport {
        modality,
        full_width: right_x - left_x,
        left_crossing: left_x,
        right_crossing: right_x,
        peak_mirror_delay: peak_x,
        ratio_to_c_oct: None,
    })
}

/// Widths for each requested modality, with ratios to the C-OCT width.
pub fn resolution_table(
    modalities: &[Modality],
    setup: &MirrorSetup,
    reference_delay: f64,
    sweep: &Sweep,
) -> Result<Vec<ResolutionReport>> {
    let mut reports = modalities
        .iter()
        .map(|&m| axial_resolution(m, setup, reference_delay, sweep))
        .collect::<Result<Vec<_>>>()?;
    let c_width = match reports.iter().find(|r| r.modality == Modality::COct) {
        Some(r) => r.full_width,
        None => axial_resolution(Modality::COct, setup, reference_delay, sweep)?.full_width,
    };
    for r in &mut reports {
        r.ratio_to_c_oct = Some(r.full_width / c_width);
    }
    Ok(reports)
}

/// Golden-section maximisation on `[lo, hi]`, seeded with a known sample.
fn golden_max(
    f: &impl Fn(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
    seed_value: f64,
    seed_x: f64,
) -> Result<(f64, f64)> {
    let ratio = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut best = (seed_x, seed_value);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..200 {
        if hi - lo <= 1e-13 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1)?;
        }
    }
    for (x, v) in [(x1, f1), (x2, f2)] {
        if v > best.1 {
            best = (x, v);
        }
    }
    Ok(best)
}

/// Root of `g` between `inside` (g ≥ 0) and `outside` (g < 0).
fn bisect(g: &impl Fn(f64) -> Result<f64>, mut inside: f64, mut outside: f64, tol: f64) -> Result<f64> {
    for _ in 0..200 {
        if (outside - inside).abs() <= tol {
            break;
        }
        let mid = 0.5 * (inside + outside);
        if g(mid)? >= 0.0 {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    Ok(0.5 * (inside + outside))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderStatus {
    Cancelled,
    Active,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderReport {
    pub order: usize,
    pub coefficient: f64,
    /// Taylor coefficient of the same order in the modality's effective sample phase.
    pub effective: f64,
    /// Envelope deviation with only this order present.
    pub deviation: f64,
    pub status: OrderStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispersionReport {
    pub modality: Modality,
    pub coefficients: Vec<f64>,
    /// Max pointwise envelope change, relative to the dispersion-free envelope peak.
    pub max_deviation: f64,
    /// Delay shift implied by the first-order term.
    pub shift: f64,
    /// Max deviation after undoing `shift`.
    pub recentered_deviation: f64,
    pub width_ratio: Option<f64>,
    pub orders: Vec<OrderReport>,
}

/// Options for [`dispersion_experiment`].
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionSetup {
    /// Dispersion-free reference; its own `dispersion` field is ignored.
    pub mirror: MirrorSetup,
    pub delays: Vec<f64>,
    pub tolerance: f64,
    /// Reference delay and `T₀` sweep for the width ratio, if wanted.
    pub width: Option<(f64, Sweep)>,
}

/// Delay shift of a modality's envelope caused by `b₁`.
pub fn first_order_shift(modality: Modality, b1: f64) -> f64 {
    let linear = match modality {
        Modality::COct => b1,
        Modality::PcOct | Modality::QOct | Modality::TwoPassCOct => 2.0 * b1,
    };
    linear / modality.delay_rate()
}

/// Sensitivity of each modality's envelope to each dispersion set.
pub fn dispersion_experiment(
    modality: Modality,
    setup: &DispersionSetup,
    sets: &[Vec<f64>],
) -> Result<Vec<DispersionReport>> {
    let base = setup.mirror.with_dispersion(Vec::new());
    let reference = base.oct_setup()?.signature(modality, &setup.delays)?.envelope();
    let peak = reference.iter().copied().fold(0.0, f64::max);
    let base_width = match &setup.width {
        Some((t, sweep)) => Some(axial_resolution(modality, &base, *t, sweep)?.full_width),
        None => None,
    };

    let deviation = |coefficients: &[f64], shift: f64| -> Result<f64> {
        let shifted: Vec<f64> = setup.delays.iter().map(|t| t + shift).collect();
        let env = base
            .with_dispersion(coefficients.to_vec())
            .oct_setup()?
            .signature(modality, &shifted)?
            .envelope();
        Ok(env
            .iter()
            .zip(&reference)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
            / peak)
    };

    sets.iter()
        .map(|coefficients| {
            let max_deviation = deviation(coefficients, 0.0)?;
            let shift = first_order_shift(modality, coefficients.first().copied().unwrap_or(0.0));
            let recentered_deviation = if shift == 0.0 {
                max_deviation
            } else {
                deviation(coefficients, shift)?
            };
            let effective = effective_dispersion(modality, &base, coefficients)?;
            let nonzero: Vec<usize> = (0..coefficients.len()).filter(|&i| coefficients[i] != 0.0).collect();
            let orders = nonzero
                .iter()
                .map(|&i| {
                    let dev = if nonzero.len() == 1 {
                        max_deviation
                    } else {
                        let mut only = vec![0.0; i + 1];
                        only[i] = coefficients[i];
                        deviation(&only, 0.0)?
                    };
                    Ok(OrderReport {
                        order: i + 1,
                        coefficient: coefficients[i],
                        effective: effective[i],
                        deviation: dev,
                        status: if dev < setup.tolerance {
                            OrderStatus::Cancelled
                        } else {
                            OrderStatus::Active
                        },
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let width_ratio = match (&setup.width, base_width) {
                (Some((t, sweep)), Some(w0)) => {
                    let dispersed = base.with_dispersion(coefficients.clone());
                    Some(axial_resolution(modality, &dispersed, *t, sweep)?.full_width / w0)
                }
                _ => None,
            };
            Ok(DispersionReport {
                modality,
                coefficients: coefficients.clone(),
                max_deviation,
                shift,
                recentered_deviation,
                width_ratio,
                orders,
            })
        })
        .collect()
}

/// Taylor coefficients `[c₁, c₂, …]` of the phase the dispersion adds to the
/// modality's effective sample transfer, found by a least-squares fit over
/// `|Ω| ≤ 4Ω_S`.
///
/// The transfer is `H(Ω)` for `c_oct`, `G(Ω)H(Ω)²` for `two_pass_c_oct` and
/// `H*(−Ω)H(Ω)` for `pc_oct` and `q_oct`.
pub fn effective_dispersion(
    modality: Modality,
    setup: &MirrorSetup,
    coefficients: &[f64],
) -> Result<Vec<f64>> {
    let plain = setup.sample(setup.mirror_delay, &[])?;
    let dispersed = setup.sample(setup.mirror_delay, coefficients)?;
    let transfer = |h: &LayeredSample, omega: f64| -> Complex64 {
        match modality {
            Modality::COct => h.response(omega),
            Modality::PcOct | Modality::QOct => h.response(-omega).conj() * h.response(omega),
            Modality::TwoPassCOct => {
                let g = setup
                    .amplifier
                    .map(|a| a.gain(omega))
                    .unwrap_or(Complex64::new(1.0, 0.0));
                g * h.response(omega) * h.response(omega)
            }
        }
    };
    let span = 4.0 * setup.spectrum.bandwidth();
    let n = 801;
    let omegas: Vec<f64> = (0..n)
        .map(|i| -span + 2.0 * span * i as f64 / (n - 1) as f64)
        .collect();
    let phase: Vec<f64> = omegas
        .iter()
        .map(|&w| (transfer(&dispersed, w) * transfer(&plain, w).conj()).arg())
        .collect();
    let unwrapped = unwrap_phase(&phase);
    let degree = coefficients.len().max(2);
    let fit = taylor_fit(&omegas, &unwrapped, degree)?;
    Ok(fit[1..].to_vec())
}

/// Largest deviation of the two-pass trace (divided by `G*`) from a C-OCT trace
/// on the effective mirror `(r², 2T₀, 2β)`, relative to that trace's peak.
pub fn two_pass_equivalence(setup: &MirrorSetup, delays: &[f64]) -> Result<f64> {
    let amp = setup.amplifier.ok_or_else(|| Error::InvalidParameter {
        name: "amplifier",
        reason: "two-pass comparison needs a phase-insensitive amplifier".into(),
    })?;
    let two_pass = setup.oct_setup()?.signature(Modality::TwoPassCOct, delays)?;
    let doubled: Vec<f64> = setup.dispersion.iter().map(|b| 2.0 * b).collect();
    let effective = LayeredSample::new(
        setup.carrier,
        vec![Layer::mirror(setup.reflectivity * setup.reflectivity, 2.0 * setup.mirror_delay)
            .with_dispersion(doubled)],
    )?;
    let single = c_oct_signature(&setup.spectrum, &effective, &setup.detection, &setup.grid, delays)?;
    let gain = amp.peak_gain().conj();
    let peak = single.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(two_pass
        .values
        .iter()
        .zip(&single.values)
        .map(|(a, b)| (a / gain - b).norm())
        .fold(0.0, f64::max)
        / peak)
}
