//! Trial ensembles for the Michelson chains and the empirical SNR experiment.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::detect::{integration_samples, michelson_detect, DetectionRecord, DetectorNoise};
use super::source::SourceKind;
use super::{derive_seed, FieldEngine, FieldSamples};
use crate::error::{Error, Result};
use crate::field::{AmpResponse, DetectionChain, FreqGrid, LayeredSample, Spectrum};
use crate::signatures::{required_amplifier, Modality, OctSetup};
use crate::snr::{snr_c_oct, snr_pc_oct, SnrOperatingPoint, SnrReport, W_DOMINATED_LIMIT};
use crate::stats::{jackknife_snr, Moments, SnrEstimate};

/// Which noise sources are drawn. `amplifier` covers both the conjugator and
/// the phase-insensitive amplifier of the two-pass chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoiseSwitches {
    pub amplifier: bool,
    pub shot: bool,
    pub thermal: bool,
}

impl NoiseSwitches {
    pub const ALL: NoiseSwitches = NoiseSwitches {
        amplifier: true,
        shot: true,
        thermal: true,
    };
    pub const NONE: NoiseSwitches = NoiseSwitches {
        amplifier: false,
        shot: false,
        thermal: false,
    };

    fn detector(self) -> DetectorNoise {
        DetectorNoise {
            shot: self.shot,
            thermal: self.thermal,
        }
    }
}

/// Everything needed to push one source draw through a Michelson chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSetup {
    pub modality: Modality,
    pub spectrum: Spectrum,
    pub sample: LayeredSample,
    pub conjugator: Option<AmpResponse>,
    pub amplifier: Option<AmpResponse>,
    pub detection: DetectionChain,
    pub grid: FreqGrid,
    /// Margin kept free of delays inside half the record; `6/Ω_S` when `None`.
    pub guard: Option<f64>,
}

impl ChainSetup {
    pub fn source_kind(&self) -> Result<SourceKind> {
        match self.modality {
            Modality::PcOct => Ok(SourceKind::PhaseSensitive),
            Modality::COct | Modality::TwoPassCOct => Ok(SourceKind::PhaseInsensitive),
            Modality::QOct => Err(Error::UnsupportedModality("q_oct")),
        }
    }

    pub fn guard(&self) -> f64 {
        self.guard.unwrap_or(6.0 / self.spectrum.bandwidth())
    }

    fn oct_setup(&self) -> OctSetup {
        OctSetup {
            spectrum: self.spectrum.clone(),
            sample: self.sample.clone(),
            conjugator: self.conjugator,
            amplifier: self.amplifier,
            detection: self.detection,
            grid: self.grid,
        }
    }

    /// Quadrature mean difference current `2qηG_A·Re z(T)` at each delay.
    pub fn analytic_mean(&self, delays: &[f64]) -> Result<Vec<f64>> {
        Ok(self.oct_setup().signature(self.modality, delays)?.trace)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial_id: u64,
    pub seed: u64,
    pub records: Vec<DetectionRecord>,
}

#[derive(Debug, Clone)]
pub struct MonteCarlo {
    setup: ChainSetup,
    delays: Vec<f64>,
    noise: NoiseSwitches,
    kind: SourceKind,
    engine: FieldEngine,
}

impl MonteCarlo {
    pub fn new(setup: ChainSetup, delays: Vec<f64>, noise: NoiseSwitches) -> Result<Self> {
        let kind = setup.source_kind()?;
        if setup.modality.amplifier_mode().is_some() {
            required_amplifier(setup.modality, setup.conjugator.as_ref(), setup.amplifier.as_ref())?;
        }
        setup.grid.check_coverage(&setup.spectrum)?;
        let guard = setup.guard();
        let half_record = 0.5 * setup.grid.record_length();
        let delay = delays
            .iter()
            .map(|t| t.abs())
            .fold(setup.sample.max_delay(), f64::max);
        if delay + guard > half_record {
            return Err(Error::DelayExceedsGuardBand {
                delay,
                guard,
                half_record,
            });
        }
        integration_samples(&setup.detection, setup.grid.time_step(), setup.grid.points())?;
        Ok(MonteCarlo {
            engine: FieldEngine::new(setup.grid),
            setup,
            delays,
            noise,
            kind,
        })
    }

    pub fn setup(&self) -> &ChainSetup {
        &self.setup
    }

    pub fn delays(&self) -> &[f64] {
        &self.delays
    }

    pub fn engine(&self) -> &FieldEngine {
        &self.engine
    }

    /// Signal-arm field returned to the beam splitter.
    fn signal_arm(&self, source: &FieldSamples, rng: &mut ChaCha8Rng) -> Result<FieldSamples> {
        let (engine, sample, guard) = (&self.engine, &self.setup.sample, self.setup.guard());
        let reflected = engine.apply_sample(source, sample, guard)?;
        match self.setup.modality {
            Modality::COct => Ok(reflected),
            Modality::PcOct => {
                let v = self.setup.conjugator.as_ref().expect("checked in new");
                let conjugated = engine.conjugate_amplify(&reflected, v, self.noise.amplifier, rng)?;
                engine.apply_sample(&conjugated, sample, guard)
            }
            Modality::TwoPassCOct => {
                let g = self.setup.amplifier.as_ref().expect("checked in new");
                let amplified = engine.amplify(&reflected, g, self.noise.amplifier, rng)?;
                engine.apply_sample(&amplified, sample, guard)
            }
            Modality::QOct => unreachable!("rejected in new"),
        }
    }

    pub fn trial(&self, trial_id: u64, master_seed: u64) -> Result<TrialRecord> {
        let seed = derive_seed(master_seed, trial_id);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let source = self.engine.synthesize_source(&self.setup.spectrum, self.kind, &mut rng)?;
        let e1 = self.signal_arm(&source.signal, &mut rng)?;
        let arm = self.engine.reference_arm(&source.reference)?;
        let carrier = self.setup.sample.carrier();
        let records = self
            .delays
            .iter()
            .map(|&t| {
                let e2 = self.engine.delayed_reference(&arm, t, carrier);
                michelson_detect(&e1, &e2, &self.setup.detection, self.noise.detector(), &mut rng)
            })
            .collect::<Result<_>>()?;
        Ok(TrialRecord {
            trial_id,
            seed,
            records,
        })
    }

    /// Runs trials `0..n_trials` in parallel; the result is in trial order and
    /// does not depend on the thread count.
    pub fn run(&self, n_trials: usize, master_seed: u64) -> Result<Ensemble> {
        let trials = (0..n_trials as u64)
            .into_par_iter()
            .map(|id| self.trial(id, master_seed))
            .collect::<Result<Vec<_>>>()?;
        Ok(Ensemble {
            delays: self.delays.clone(),
            trials,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ensemble {
    pub delays: Vec<f64>,
    pub trials: Vec<TrialRecord>,
}

impl Ensemble {
    /// Per-trial averaged currents at delay index `index`.
    pub fn currents(&self, index: usize) -> Vec<f64> {
        self.trials.iter().map(|t| t.records[index].i_avg).collect()
    }

    pub fn mean_trace(&self) -> Vec<Moments> {
        (0..self.delays.len()).map(|i| Moments::of(&self.currents(i))).collect()
    }

    /// Largest `|mean − expected|` over the trace, in standard errors.
    pub fn max_deviation_sigmas(&self, expected: &[f64]) -> f64 {
        self.mean_trace()
            .iter()
            .zip(expected)
            .map(|(m, e)| (m.mean - e).abs() / m.std_error())
            .fold(0.0, f64::max)
    }
}

/// Single-mirror SNR measurement at the fringe maximum nearest the envelope peak.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrExperimentSetup {
    /// `pc_oct`, `two_pass_c_oct` or `c_oct`. The operating point's amplifier is
    /// used as the conjugator or phase-insensitive amplifier as the modality needs.
    pub modality: Modality,
    pub op: SnrOperatingPoint,
    pub mirror_delay: f64,
    pub carrier: f64,
    pub grid: FreqGrid,
    pub noise: NoiseSwitches,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnrExperiment {
    pub modality: Modality,
    pub delay: f64,
    /// Integration time actually realised on the grid.
    pub integration_time: f64,
    pub estimate: SnrEstimate,
    pub oracle: f64,
    pub oracle_report: Option<SnrReport>,
    /// `(empirical − oracle)/oracle`
    pub relative_error: f64,
    pub trials: Vec<TrialRecord>,
}

impl SnrExperimentSetup {
    pub fn chain(&self) -> Result<ChainSetup> {
        let sample = LayeredSample::single_mirror(
            num_complex::Complex64::new(self.op.reflectivity(), 0.0),
            self.mirror_delay,
            self.carrier,
        )?;
        let amp = *self.op.amplifier();
        let (conjugator, amplifier) = match self.modality {
            Modality::PcOct => (Some(amp), None),
            Modality::TwoPassCOct => (None, Some(amp)),
            Modality::COct => (None, None),
            Modality::QOct => return Err(Error::UnsupportedModality("q_oct")),
        };
        Ok(ChainSetup {
            modality: self.modality,
            spectrum: self.op.spectrum(),
            sample,
            conjugator,
            amplifier,
            detection: *self.op.detection(),
            grid: self.grid,
            guard: None,
        })
    }

    /// Delay of the fringe maximum nearest `peak_delay_factor·T₀`.
    pub fn fringe_peak(&self, chain: &ChainSetup) -> Result<f64> {
        let envelope_peak = self.modality.peak_delay_factor() * self.mirror_delay;
        if self.carrier == 0.0 {
            return Ok(envelope_peak);
        }
        let z = chain.oct_setup().signature(self.modality, &[envelope_peak])?.values[0];
        Ok(envelope_peak - z.arg() / self.carrier)
    }
}

/// Empirical `⟨i_d⟩²/var⟨i_d⟩` over `n_trials` against the closed form at the
/// realised integration time. With `ci_tolerance`, fails when the jackknife
/// interval half-width exceeds that fraction of the estimate.
pub fn run_snr_experiment(
    setup: &SnrExperimentSetup,
    n_trials: usize,
    master_seed: u64,
    ci_tolerance: Option<f64>,
) -> Result<SnrExperiment> {
    if setup.modality != Modality::COct && setup.op.passthrough_ratio() > W_DOMINATED_LIMIT {
        return Err(Error::InvalidParameter {
            name: "reflectivity",
            reason: format!(
                "|r|^2 S(0) = {:.3e} exceeds {W_DOMINATED_LIMIT}; the closed form needs the amplifier noise to dominate the reflected field",
                setup.op.passthrough_ratio()
            ),
        });
    }
    let chain = setup.chain()?;
    let delay = setup.fringe_peak(&chain)?;
    let mc = MonteCarlo::new(chain, vec![delay], setup.noise)?;
    let ensemble = mc.run(n_trials, master_seed)?;
    let currents = ensemble.currents(0);
    let integration_time = ensemble
        .trials
        .first()
        .map(|t| t.records[0].integration_time)
        .unwrap_or_else(|| setup.op.detection().integration_time());
    let op = setup
        .op
        .with_detection(setup.op.detection().with_integration_time(integration_time)?);
    let (oracle, oracle_report) = match setup.modality {
        Modality::COct => (snr_c_oct(&op), None),
        _ => {
            let report = snr_pc_oct(&op);
            (report.snr, Some(report))
        }
    };
    let estimate = jackknife_snr(&currents).ok_or(Error::InsufficientTrials {
        trials: n_trials,
        achieved: f64::INFINITY,
        requested: ci_tolerance.unwrap_or(f64::NAN),
    })?;
    if let Some(tolerance) = ci_tolerance {
        let achieved = estimate.relative_half_width();
        if !(achieved <= tolerance) {
            return Err(Error::InsufficientTrials {
                trials: n_trials,
                achieved,
                requested: tolerance,
            });
        }
    }
    Ok(SnrExperiment {
        modality: setup.modality,
        delay,
        integration_time,
        relative_error: (estimate.snr - oracle) / oracle,
        estimate,
        oracle,
        oracle_report,
        trials: ensemble.trials,
    })
}
