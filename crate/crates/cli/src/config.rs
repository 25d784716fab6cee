//! Experiment configuration.
//!
//! A config is a TOML document whose keys are all optional at parse time.
//! [`Config::resolve`] fills in defaults and returns a [`Config`] with every
//! key present, which is what summaries embed; parsing that output again and
//! resolving it is the identity.

use std::path::PathBuf;

use num_complex::Complex64;
use pcoct::field::{DEFAULT_BROADBAND_FACTOR, DEFAULT_COVERAGE_CUTOFF, ELECTRON_CHARGE};
use pcoct::signatures::MirrorSetup;
use pcoct::stochastic::NoiseSwitches;
use pcoct::{AmpResponse, DetectionChain, FreqGrid, Layer, LayeredSample, Modality, Spectrum, Sweep};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_POINTS: usize = 1 << 16;
pub const DEFAULT_OMEGA_MAX_FACTOR: f64 = 12.0;
pub const DEFAULT_TRIALS: usize = 10_000;
pub const DEFAULT_OUTPUT_DIR: &str = "pcoct-out";
const DEFAULT_SWEEP_STEPS: usize = 601;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Used by `signature`, `snr` and `montecarlo`.
    pub modality: Option<Modality>,
    /// Used by `resolution` and `dispersion`.
    pub modalities: Option<Vec<Modality>>,
    pub spectrum: Option<SpectrumConfig>,
    pub sample: Option<SampleConfig>,
    pub conjugator: Option<AmpConfig>,
    pub amplifier: Option<AmpConfig>,
    pub detection: Option<DetectionConfig>,
    pub grid: Option<GridConfig>,
    pub signature: Option<SignatureConfig>,
    pub resolution: Option<ResolutionConfig>,
    pub dispersion: Option<DispersionConfig>,
    pub montecarlo: Option<MonteCarloConfig>,
    pub output: Option<OutputConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumKind {
    Gaussian,
    Tabulated,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub kind: Option<SpectrumKind>,
    /// `P_S`, photons/s.
    pub power: Option<f64>,
    /// `Ω_S`, rad/s.
    pub bandwidth: Option<f64>,
    /// `[Ω, S(Ω)]` nodes of a tabulated spectrum.
    pub points: Option<Vec<[f64; 2]>>,
}

/// A real number or an `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexValue {
    pub fn value(self) -> Complex64 {
        match self {
            ComplexValue::Real(re) => Complex64::new(re, 0.0),
            ComplexValue::Pair([re, im]) => Complex64::new(re, im),
        }
    }

    fn canonical(self) -> Self {
        let z = self.value();
        ComplexValue::Pair([z.re, z.im])
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleConfig {
    /// `ω₀`, rad/s.
    pub carrier: Option<f64>,
    pub layers: Option<Vec<LayerConfig>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerConfig {
    pub reflectivity: ComplexValue,
    pub delay: f64,
    /// Taylor coefficients `[b₁, b₂, …]` of the layer phase.
    pub dispersion: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmpConfig {
    pub gain: Option<ComplexValue>,
    /// `inf` for a flat response.
    pub bandwidth: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionConfig {
    pub quantum_efficiency: Option<f64>,
    pub current_gain: Option<f64>,
    /// `S_ith`, A²/Hz.
    pub thermal_density: Option<f64>,
    pub electron_charge: Option<f64>,
    /// `T_I`; defaults to the record length of the grid.
    pub integration_time: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub points: Option<usize>,
    pub omega_max: Option<f64>,
    /// Alternative to `omega_max`.
    pub spacing: Option<f64>,
    pub coverage_cutoff: Option<f64>,
    pub broadband_factor: Option<f64>,
    /// Margin between the largest delay and half the Monte Carlo record.
    pub guard: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepConfig {
    fn centered(center: f64, half_width: f64, steps: usize) -> Self {
        SweepConfig {
            start: center - half_width,
            stop: center + half_width,
            steps,
        }
    }

    pub fn sweep(&self, name: &str) -> Result<Sweep, CliError> {
        Sweep::new(self.start, self.stop, self.steps).map_err(|e| CliError::invalid(name, e.to_string()))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignatureConfig {
    pub delays: Option<SweepConfig>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolutionConfig {
    pub reference_delay: Option<f64>,
    pub mirror_delays: Option<SweepConfig>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersionConfig {
    /// Each set is `[b₁, b₂, …]`.
    pub sets: Option<Vec<Vec<f64>>>,
    pub tolerance: Option<f64>,
    /// Half-width of the delay window around each modality's envelope peak.
    pub window: Option<f64>,
    pub window_steps: Option<usize>,
    pub width_ratio: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonteCarloMode {
    /// Empirical SNR at the fringe peak against the closed form.
    Snr,
    /// Trial-mean trace over `signature.delays` against the quadrature trace.
    Trace,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub amplifier: bool,
    pub shot: bool,
    pub thermal: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloConfig {
    pub mode: Option<MonteCarloMode>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    /// Largest accepted relative CI half-width of the empirical SNR.
    pub ci_tolerance: Option<f64>,
    pub noise: Option<NoiseConfig>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    pub export_spectrum: Option<bool>,
    pub export_response: Option<bool>,
}

/// Command-line overrides applied before resolution.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
}

/// Core objects built from a resolved config.
#[derive(Debug, Clone)]
pub struct Plan {
    pub config: Config,
    pub modality: Modality,
    pub modalities: Vec<Modality>,
    pub spectrum: Spectrum,
    pub sample: LayeredSample,
    pub conjugator: AmpResponse,
    pub amplifier: AmpResponse,
    pub detection: DetectionChain,
    pub grid: FreqGrid,
    pub broadband_factor: f64,
    pub guard: f64,
    pub delays: Sweep,
    pub resolution_reference: f64,
    pub resolution_sweep: Sweep,
    pub dispersion_sets: Vec<Vec<f64>>,
    pub dispersion_tolerance: f64,
    pub dispersion_window: f64,
    pub dispersion_window_steps: usize,
    pub dispersion_width_ratio: bool,
    pub mc_mode: MonteCarloMode,
    pub trials: usize,
    pub seed: u64,
    pub ci_tolerance: Option<f64>,
    pub noise: NoiseSwitches,
    pub out_dir: PathBuf,
    pub export_spectrum: bool,
    pub export_response: bool,
}

fn core_err(e: pcoct::Error) -> CliError {
    CliError::from(e)
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::config("invalid_config", e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serialisable")
    }

    /// Fills every missing key with its default and builds the core objects.
    pub fn resolve(&self, overrides: &Overrides) -> Result<Plan, CliError> {
        let mut out = self.clone();

        let modality = self.modality.unwrap_or(Modality::PcOct);
        out.modality = Some(modality);
        let modalities = self.modalities.clone().unwrap_or_else(|| Modality::ALL.to_vec());
        if modalities.is_empty() {
            return Err(CliError::invalid("modalities", "needs at least one entry".into()));
        }
        out.modalities = Some(modalities.clone());

        // spectrum
        let sc = self.spectrum.clone().unwrap_or(SpectrumConfig {
            kind: Some(SpectrumKind::Gaussian),
            power: Some(1.0),
            bandwidth: Some(1.0),
            points: None,
        });
        let kind = sc.kind.unwrap_or(SpectrumKind::Gaussian);
        let spectrum = match kind {
            SpectrumKind::Gaussian => {
                let power = sc.power.ok_or_else(|| CliError::missing("spectrum.power"))?;
                let bandwidth = sc.bandwidth.ok_or_else(|| CliError::missing("spectrum.bandwidth"))?;
                if sc.points.is_some() {
                    return Err(CliError::invalid("spectrum.points", "only valid for kind = \"tabulated\"".into()));
                }
                Spectrum::gaussian(power, bandwidth).map_err(core_err)?
            }
            SpectrumKind::Tabulated => {
                let points = sc.points.clone().ok_or_else(|| CliError::missing("spectrum.points"))?;
                if sc.power.is_some() || sc.bandwidth.is_some() {
                    return Err(CliError::invalid(
                        "spectrum",
                        "power and bandwidth are derived from the table for kind = \"tabulated\"".into(),
                    ));
                }
                Spectrum::tabulated(points.iter().map(|p| (p[0], p[1])).collect()).map_err(core_err)?
            }
        };
        out.spectrum = Some(SpectrumConfig { kind: Some(kind), ..sc });
        let omega_s = spectrum.bandwidth();

        // grid
        let gc = self.grid.clone().unwrap_or_default();
        let points = gc.points.unwrap_or(DEFAULT_POINTS);
        let omega_max = match (gc.omega_max, gc.spacing) {
            (Some(_), Some(_)) => {
                return Err(CliError::invalid("grid", "give either omega_max or spacing, not both".into()))
            }
            (Some(w), None) => w,
            (None, Some(dw)) => 0.5 * points as f64 * dw,
            (None, None) => DEFAULT_OMEGA_MAX_FACTOR * omega_s,
        };
        let cutoff = gc.coverage_cutoff.unwrap_or(DEFAULT_COVERAGE_CUTOFF);
        let grid = FreqGrid::with_omega_max(points, omega_max)
            .and_then(|g| g.with_coverage_cutoff(cutoff))
            .map_err(core_err)?;
        let broadband_factor = gc.broadband_factor.unwrap_or(DEFAULT_BROADBAND_FACTOR);
        if !(broadband_factor > 0.0) {
            return Err(CliError::invalid("grid.broadband_factor", "must be positive".into()));
        }
        let guard = gc.guard.unwrap_or(6.0 / omega_s);
        if !(guard >= 0.0 && guard.is_finite()) {
            return Err(CliError::invalid("grid.guard", "must be finite and >= 0".into()));
        }
        out.grid = Some(GridConfig {
            points: Some(points),
            omega_max: Some(omega_max),
            spacing: None,
            coverage_cutoff: Some(cutoff),
            broadband_factor: Some(broadband_factor),
            guard: Some(guard),
        });

        // sample
        let smp = self.sample.clone().unwrap_or_default();
        let carrier = smp.carrier.unwrap_or(0.0);
        let layers = smp.layers.clone().unwrap_or_else(|| {
            vec![LayerConfig {
                reflectivity: ComplexValue::Real(0.1),
                delay: 0.0,
                dispersion: None,
            }]
        });
        let layers: Vec<LayerConfig> = layers
            .into_iter()
            .map(|l| LayerConfig {
                reflectivity: l.reflectivity.canonical(),
                delay: l.delay,
                dispersion: Some(l.dispersion.unwrap_or_default()),
            })
            .collect();
        let sample = LayeredSample::new(
            carrier,
            layers
                .iter()
                .map(|l| {
                    Layer::mirror(l.reflectivity.value(), l.delay)
                        .with_dispersion(l.dispersion.clone().unwrap_or_default())
                })
                .collect(),
        )
        .map_err(core_err)?;
        out.sample = Some(SampleConfig {
            carrier: Some(carrier),
            layers: Some(layers),
        });

        // amplifiers
        let amp = |cfg: &Option<AmpConfig>| -> (ComplexValue, f64) {
            let c = cfg.clone().unwrap_or_default();
            (
                c.gain.unwrap_or(ComplexValue::Real(1.0)).canonical(),
                c.bandwidth.unwrap_or(f64::INFINITY),
            )
        };
        let (v_gain, v_bw) = amp(&self.conjugator);
        let conjugator = AmpResponse::conjugator(v_gain.value(), v_bw).map_err(core_err)?;
        out.conjugator = Some(AmpConfig {
            gain: Some(v_gain),
            bandwidth: Some(v_bw),
        });
        let (g_gain, g_bw) = amp(&self.amplifier);
        let amplifier = AmpResponse::phase_insensitive(g_gain.value(), g_bw).map_err(core_err)?;
        out.amplifier = Some(AmpConfig {
            gain: Some(g_gain),
            bandwidth: Some(g_bw),
        });

        // detection
        let dc = self.detection.clone().unwrap_or_default();
        let resolved_detection = DetectionConfig {
            quantum_efficiency: Some(dc.quantum_efficiency.unwrap_or(1.0)),
            current_gain: Some(dc.current_gain.unwrap_or(1.0)),
            thermal_density: Some(dc.thermal_density.unwrap_or(0.0)),
            electron_charge: Some(dc.electron_charge.unwrap_or(ELECTRON_CHARGE)),
            integration_time: Some(dc.integration_time.unwrap_or(grid.record_length())),
        };
        let detection = DetectionChain::new(
            resolved_detection.quantum_efficiency.unwrap_or_default(),
            resolved_detection.current_gain.unwrap_or_default(),
            resolved_detection.thermal_density.unwrap_or_default(),
            resolved_detection.electron_charge.unwrap_or_default(),
            resolved_detection.integration_time.unwrap_or_default(),
        )
        .map_err(core_err)?;
        out.detection = Some(resolved_detection);

        // delay sweep for traces
        let (lo, hi) = sample
            .layers()
            .iter()
            .map(|l| l.delay)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), d| (a.min(d), b.max(d)));
        let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (0.0, 0.0) };
        let factor = modality.peak_delay_factor();
        let default_delays = SweepConfig {
            start: factor * lo - 6.0 / omega_s,
            stop: factor * hi + 6.0 / omega_s,
            steps: DEFAULT_SWEEP_STEPS,
        };
        let delays_cfg = self
            .signature
            .as_ref()
            .and_then(|s| s.delays)
            .unwrap_or(default_delays);
        let delays = delays_cfg.sweep("signature.delays")?;
        out.signature = Some(SignatureConfig {
            delays: Some(delays_cfg),
        });

        // resolution
        let rc = self.resolution.clone().unwrap_or_default();
        let reference = rc.reference_delay.unwrap_or(0.0);
        let res_cfg = rc
            .mirror_delays
            .unwrap_or_else(|| SweepConfig::centered(0.75 * reference, 0.25 * reference.abs() + 8.0 / omega_s, 321));
        let resolution_sweep = res_cfg.sweep("resolution.mirror_delays")?;
        out.resolution = Some(ResolutionConfig {
            reference_delay: Some(reference),
            mirror_delays: Some(res_cfg),
        });

        // dispersion
        let dc = self.dispersion.clone().unwrap_or_default();
        let dispersion_sets = dc.sets.clone().unwrap_or_default();
        let dispersion_tolerance = dc.tolerance.unwrap_or(1e-9);
        let dispersion_window = dc.window.unwrap_or(6.0 / omega_s);
        let dispersion_window_steps = dc.window_steps.unwrap_or(121);
        let dispersion_width_ratio = dc.width_ratio.unwrap_or(true);
        if !(dispersion_window > 0.0) || dispersion_window_steps < 2 {
            return Err(CliError::invalid(
                "dispersion.window",
                "needs a positive window and at least two steps".into(),
            ));
        }
        out.dispersion = Some(DispersionConfig {
            sets: Some(dispersion_sets.clone()),
            tolerance: Some(dispersion_tolerance),
            window: Some(dispersion_window),
            window_steps: Some(dispersion_window_steps),
            width_ratio: Some(dispersion_width_ratio),
        });

        // monte carlo
        let mc = self.montecarlo.clone().unwrap_or_default();
        let mc_mode = mc.mode.unwrap_or(MonteCarloMode::Snr);
        let trials = overrides.trials.or(mc.trials).unwrap_or(DEFAULT_TRIALS);
        let seed = overrides.seed.or(mc.seed).unwrap_or(0);
        if let Some(t) = mc.ci_tolerance {
            if !(t > 0.0) {
                return Err(CliError::invalid("montecarlo.ci_tolerance", "must be positive".into()));
            }
        }
        let noise = mc.noise.unwrap_or(NoiseConfig {
            amplifier: true,
            shot: true,
            thermal: true,
        });
        out.montecarlo = Some(MonteCarloConfig {
            mode: Some(mc_mode),
            trials: Some(trials),
            seed: Some(seed),
            ci_tolerance: mc.ci_tolerance,
            noise: Some(noise),
        });

        // output
        let oc = self.output.clone().unwrap_or_default();
        let out_dir = overrides
            .out
            .clone()
            .or(oc.dir.clone())
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
        let export_spectrum = oc.export_spectrum.unwrap_or(false);
        let export_response = oc.export_response.unwrap_or(false);
        out.output = Some(OutputConfig {
            dir: Some(out_dir.clone()),
            export_spectrum: Some(export_spectrum),
            export_response: Some(export_response),
        });

        Ok(Plan {
            config: out,
            modality,
            modalities,
            spectrum,
            sample,
            conjugator,
            amplifier,
            detection,
            grid,
            broadband_factor,
            guard,
            delays,
            resolution_reference: reference,
            resolution_sweep,
            dispersion_sets,
            dispersion_tolerance,
            dispersion_window,
            dispersion_window_steps,
            dispersion_width_ratio,
            mc_mode,
            trials,
            seed,
            ci_tolerance: mc.ci_tolerance,
            noise: NoiseSwitches {
                amplifier: noise.amplifier,
                shot: noise.shot,
                thermal: noise.thermal,
            },
            out_dir,
            export_spectrum,
            export_response,
        })
    }
}

impl Plan {
    /// The single mirror that resolution, dispersion and SNR experiments need.
    pub fn mirror(&self) -> Result<MirrorSetup, CliError> {
        let [layer] = self.sample.layers() else {
            return Err(CliError::invalid(
                "sample.layers",
                format!("this command needs exactly one layer, got {}", self.sample.layers().len()),
            ));
        };
        Ok(MirrorSetup {
            spectrum: self.spectrum.clone(),
            reflectivity: layer.reflectivity,
            mirror_delay: layer.delay,
            dispersion: layer.dispersion.clone(),
            carrier: self.sample.carrier(),
            conjugator: Some(self.conjugator),
            amplifier: Some(self.amplifier),
            detection: self.detection,
            grid: self.grid,
        })
    }

    /// Warnings for amplifiers the given modalities use that are not broadband.
    pub fn bandwidth_warnings(&self, modalities: &[Modality]) -> Vec<String> {
        let omega_s = self.spectrum.bandwidth();
        let mut warnings = Vec::new();
        let mut check = |name: &str, amp: &AmpResponse| {
            if !amp.is_broadband(omega_s, self.broadband_factor) {
                warnings.push(format!(
                    "{name} bandwidth {} is below {} x the source bandwidth; envelopes are not in the broadband limit",
                    amp.bandwidth(),
                    self.broadband_factor
                ));
            }
        };
        if modalities.contains(&Modality::PcOct) {
            check("conjugator", &self.conjugator);
        }
        if modalities.contains(&Modality::TwoPassCOct) {
            check("amplifier", &self.amplifier);
        }
        warnings
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_resolves_to_defaults() {
        let plan = Config::parse("").unwrap().resolve(&Overrides::default()).unwrap();
        assert_eq!(plan.grid.points(), DEFAULT_POINTS);
        assert!((plan.grid.omega_max() - 12.0).abs() < 1e-12);
        assert_eq!(plan.trials, DEFAULT_TRIALS);
        assert_eq!(plan.detection.integration_time(), plan.grid.record_length());
        assert_eq!(plan.out_dir, PathBuf::from(DEFAULT_OUTPUT_DIR));
    }

    #[test]
    fn resolved_config_round_trips() {
        let text = r#"
            modality = "q_oct"
            [spectrum]
            power = 2.0
            bandwidth = 1.5
            [sample]
            carrier = 10.0
            [[sample.layers]]
            reflectivity = [0.1, 0.2]
            delay = 1.0
            [[sample.layers]]
            reflectivity = 0.05
            delay = 3.0
            dispersion = [0.0, 1.0]
            [grid]
            points = 4096
            spacing = 0.01
            [montecarlo]
            ci_tolerance = 0.05
        "#;
        let plan = Config::parse(text).unwrap().resolve(&Overrides::default()).unwrap();
        let again = Config::parse(&plan.config.to_toml()).unwrap();
        assert_eq!(again, plan.config);
        let plan2 = again.resolve(&Overrides::default()).unwrap();
        assert_eq!(plan2.config, plan.config);
        assert!((plan.grid.spacing() - 0.01).abs() < 1e-15);
    }

    #[test]
    fn overrides_win() {
        let text = "[montecarlo]\nseed = 5\ntrials = 7\n";
        let o = Overrides {
            out: Some("elsewhere".into()),
            seed: Some(9),
            trials: None,
        };
        let plan = Config::parse(text).unwrap().resolve(&o).unwrap();
        assert_eq!((plan.seed, plan.trials), (9, 7));
        assert_eq!(plan.out_dir, PathBuf::from("elsewhere"));
        assert_eq!(plan.config.montecarlo.as_ref().unwrap().seed, Some(9));
    }

    #[test]
    fn unknown_and_missing_keys() {
        let err = Config::parse("[spectrum]\npower = 1.0\nbandwith = 1.0\n").unwrap_err();
        assert!(err.message.contains("bandwith"), "{}", err.message);
        let err = Config::parse("[spectrum]\npower = 1.0\n")
            .unwrap()
            .resolve(&Overrides::default())
            .unwrap_err();
        assert_eq!(err.code, "missing_key");
        assert!(err.message.contains("spectrum.bandwidth"));
    }

    #[test]
    fn infinite_bandwidth_is_accepted() {
        let plan = Config::parse("[conjugator]\ngain = 3.0\nbandwidth = inf\n")
            .unwrap()
            .resolve(&Overrides::default())
            .unwrap();
        assert!(plan.conjugator.bandwidth().is_infinite());
        assert!(plan.bandwidth_warnings(&[Modality::PcOct]).is_empty());
    }
}
