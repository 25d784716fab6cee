//! Closed-form SNR of PC-OCT (and two-pass C-OCT) versus C-OCT.
//!
//! The PC-OCT SNR in the conjugator-noise-dominated regime is
//!
//! ```text
//!              8 T_I η |r|⁴ |V|² P_S² Ω_V²/(Ω_S² + 2Ω_V²)
//! SNR = ----------------------------------------------------------------
//!       Ω_th + P_S + |rV|² √(Ω_V²/2π) + 2η|rV|² P_S Ω_V/√(Ω_S² + Ω_V²)
//! ```
//!
//! with the denominator terms being thermal noise, reference shot noise,
//! conjugator quantum noise and the intrinsic beat noise. The same expression
//! holds for two-pass C-OCT with `(V, Ω_V)` replaced by `(G, Ω_G)`.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{positive, AmpResponse, DetectionChain, FreqGrid, Spectrum};

/// A limit formula is applicable when within this relative distance of the full expression.
pub const LIMIT_APPLICABILITY: f64 = 0.1;
/// Largest `|r|²·S(0)` for which the reflected signal is negligible next to the
/// conjugator's unit-density injected noise.
pub const W_DOMINATED_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrOperatingPoint {
    power: f64,
    source_bandwidth: f64,
    reflectivity: f64,
    amplifier: AmpResponse,
    detection: DetectionChain,
}

impl SnrOperatingPoint {
    /// Reference power is taken equal to `P_S`, since both beams share `S(Ω)`.
    pub fn new(
        spectrum: &Spectrum,
        reflectivity: f64,
        amplifier: AmpResponse,
        detection: DetectionChain,
    ) -> Result<Self> {
        let (power, source_bandwidth) = match spectrum {
            Spectrum::Gaussian { power, bandwidth } => (*power, *bandwidth),
            Spectrum::Tabulated(_) => {
                return Err(Error::InvalidParameter {
                    name: "spectrum",
                    reason: "the SNR formulas assume a Gaussian spectrum".into(),
                })
            }
        };
        positive("power", power)?;
        positive("bandwidth", source_bandwidth)?;
        if !(reflectivity > 0.0 && reflectivity <= 1.0) {
            return Err(Error::NonPositiveParameter {
                name: "reflectivity",
                value: reflectivity,
            });
        }
        positive("gain", amplifier.peak_gain().norm())?;
        positive("gain_bandwidth", amplifier.bandwidth())?;
        Ok(SnrOperatingPoint {
            power,
            source_bandwidth,
            reflectivity,
            amplifier,
            detection,
        })
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn source_bandwidth(&self) -> f64 {
        self.source_bandwidth
    }

    pub fn reflectivity(&self) -> f64 {
        self.reflectivity
    }

    pub fn amplifier(&self) -> &AmpResponse {
        &self.amplifier
    }

    pub fn detection(&self) -> &DetectionChain {
        &self.detection
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum::Gaussian {
            power: self.power,
            bandwidth: self.source_bandwidth,
        }
    }

    pub fn with_detection(&self, detection: DetectionChain) -> Self {
        SnrOperatingPoint { detection, ..*self }
    }

    /// `|r|²·S(0)`: reflected-signal density relative to the injected noise density.
    pub fn passthrough_ratio(&self) -> f64 {
        self.reflectivity.powi(2) * self.spectrum().peak_density()
    }

    fn gain_sq(&self) -> f64 {
        self.amplifier.peak_gain().norm_sqr()
    }

    /// `Ω_V²/(Ω_S² + 2Ω_V²)`
    fn bandwidth_factor(&self) -> f64 {
        let (s, v) = (self.source_bandwidth, self.amplifier.bandwidth());
        v * v / (s * s + 2.0 * v * v)
    }

    pub fn numerator(&self) -> f64 {
        8.0 * self.detection.integration_time()
            * self.detection.quantum_efficiency()
            * self.reflectivity.powi(4)
            * self.gain_sq()
            * self.power
            * self.power
            * self.bandwidth_factor()
    }

    pub fn noise_budget(&self) -> NoiseBudget {
        let (s, v) = (self.source_bandwidth, self.amplifier.bandwidth());
        let rv2 = self.reflectivity.powi(2) * self.gain_sq();
        NoiseBudget {
            thermal: self.detection.thermal_rate(),
            ref_shot: self.power,
            conj_quantum: rv2 * (v * v / (2.0 * PI)).sqrt(),
            intrinsic: 2.0 * self.detection.quantum_efficiency() * rv2 * self.power * v
                / (s * s + v * v).sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseTerm {
    Thermal,
    RefShot,
    ConjQuantum,
    Intrinsic,
}

impl NoiseTerm {
    pub const ALL: [NoiseTerm; 4] = [
        NoiseTerm::Thermal,
        NoiseTerm::RefShot,
        NoiseTerm::ConjQuantum,
        NoiseTerm::Intrinsic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NoiseTerm::Thermal => "thermal",
            NoiseTerm::RefShot => "ref_shot",
            NoiseTerm::ConjQuantum => "conj_quantum",
            NoiseTerm::Intrinsic => "intrinsic",
        }
    }
}

impl fmt::Display for NoiseTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The four SNR denominator terms, in rate units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseBudget {
    pub thermal: f64,
    pub ref_shot: f64,
    pub conj_quantum: f64,
    pub intrinsic: f64,
}

impl NoiseBudget {
    pub fn term(&self, term: NoiseTerm) -> f64 {
        match term {
            NoiseTerm::Thermal => self.thermal,
            NoiseTerm::RefShot => self.ref_shot,
            NoiseTerm::ConjQuantum => self.conj_quantum,
            NoiseTerm::Intrinsic => self.intrinsic,
        }
    }

    pub fn total(&self) -> f64 {
        self.thermal + self.ref_shot + self.conj_quantum + self.intrinsic
    }

    /// Sum of the listed terms only.
    pub fn partial(&self, keep: &[NoiseTerm]) -> f64 {
        NoiseTerm::ALL
            .iter()
            .filter(|t| keep.contains(t))
            .map(|&t| self.term(t))
            .sum()
    }

    /// Largest term; ties go to the term listed first.
    pub fn dominant(&self) -> NoiseTerm {
        let mut best = NoiseTerm::Thermal;
        for t in NoiseTerm::ALL {
            if self.term(t) > self.term(best) {
                best = t;
            }
        }
        best
    }

    pub fn shares(&self) -> [(NoiseTerm, f64, f64); 4] {
        let total = self.total();
        NoiseTerm::ALL.map(|t| (t, self.term(t), self.term(t) / total))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SnrReport {
    pub snr: f64,
    pub numerator: f64,
    pub budget: NoiseBudget,
    pub passthrough_ratio: f64,
    /// Whether the conjugator's injected noise dominates the reflected signal at its input.
    pub w_dominated: bool,
}

pub fn snr_pc_oct(op: &SnrOperatingPoint) -> SnrReport {
    let budget = op.noise_budget();
    let numerator = op.numerator();
    let passthrough_ratio = op.passthrough_ratio();
    SnrReport {
        snr: numerator / budget.total(),
        numerator,
        budget,
        passthrough_ratio,
        w_dominated: passthrough_ratio < W_DOMINATED_LIMIT,
    }
}

/// High-gain, high-power limit: `4T_I|r|²P_SΩ_V√(Ω_S²+Ω_V²)/(Ω_S²+2Ω_V²)`.
pub fn snr_pc_oct_high_gain(op: &SnrOperatingPoint) -> f64 {
    let (s, v) = (op.source_bandwidth, op.amplifier.bandwidth());
    4.0 * op.detection.integration_time() * op.reflectivity.powi(2) * op.power * v * (s * s + v * v).sqrt()
        / (s * s + 2.0 * v * v)
}

/// Reference-shot-limited form: `8ηT_I|r|⁴|V|²P_SΩ_V²/(Ω_S²+2Ω_V²)`.
pub fn snr_pc_oct_shot_limited(op: &SnrOperatingPoint) -> f64 {
    8.0 * op.detection.quantum_efficiency()
        * op.detection.integration_time()
        * op.reflectivity.powi(4)
        * op.gain_sq()
        * op.power
        * op.bandwidth_factor()
}

/// `4ηT_I|r|²P_S`, valid when the reflected field is much weaker than the reference.
pub fn snr_c_oct(op: &SnrOperatingPoint) -> f64 {
    4.0 * op.detection.quantum_efficiency() * op.detection.integration_time() * op.reflectivity.powi(2) * op.power
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeReport {
    pub regime: NoiseTerm,
    pub high_gain_deviation: f64,
    pub shot_limited_deviation: f64,
    pub high_gain_applicable: bool,
    pub shot_limited_applicable: bool,
}

pub fn classify_regime(op: &SnrOperatingPoint) -> RegimeReport {
    let full = snr_pc_oct(op).snr;
    let high_gain_deviation = (snr_pc_oct_high_gain(op) - full).abs() / full;
    let shot_limited_deviation = (snr_pc_oct_shot_limited(op) - full).abs() / full;
    RegimeReport {
        regime: op.noise_budget().dominant(),
        high_gain_deviation,
        shot_limited_deviation,
        high_gain_applicable: high_gain_deviation <= LIMIT_APPLICABILITY,
        shot_limited_applicable: shot_limited_deviation <= LIMIT_APPLICABILITY,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossSpectrumGap {
    /// `(√(S(S+1)) − S)/S` at `Ω = 0`.
    pub gap_at_zero: f64,
    /// Supremum over grid points with `S > 0`, attained at the grid edge for a Gaussian.
    pub max_gap: f64,
    pub max_gap_omega: f64,
    /// `(Ω, gap)` for every grid point with `S > 0`.
    pub profile: Vec<(f64, f64)>,
}

/// Relative excess of the quantum-maximum cross-spectrum `√(S(S+1))` over the classical `S`.
pub fn cross_spectrum_gap(spectrum: &Spectrum, grid: &FreqGrid) -> Result<CrossSpectrumGap> {
    if !matches!(spectrum, Spectrum::Gaussian { .. }) {
        return Err(Error::InvalidParameter {
            name: "spectrum",
            reason: "the cross-spectrum comparison assumes a Gaussian spectrum".into(),
        });
    }
    let gap = |s: f64| (s * (s + 1.0)).sqrt() / s - 1.0;
    let profile: Vec<(f64, f64)> = grid
        .omegas()
        .into_iter()
        .map(|w| (w, spectrum.density(w)))
        .filter(|&(_, s)| s > 0.0)
        .map(|(w, s)| (w, gap(s)))
        .collect();
    let (max_gap_omega, max_gap) = profile
        .iter()
        .copied()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((0.0, 0.0));
    Ok(CrossSpectrumGap {
        gap_at_zero: gap(spectrum.peak_density()),
        max_gap,
        max_gap_omega,
        profile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn op(p: f64, r: f64, v: f64, omega_v: f64, eta: f64, s_th: f64, t_i: f64) -> SnrOperatingPoint {
        SnrOperatingPoint::new(
            &Spectrum::gaussian(p, 1.0).unwrap(),
            r,
            AmpResponse::conjugator(Complex64::new(v, 0.0), omega_v).unwrap(),
            DetectionChain::new(eta, 1.0, s_th, 1.0, t_i).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn budget_sums_to_denominator() {
        let o = op(100.0, 0.01, 1e4, 1.5, 0.7, 3.0, 2.0);
        let b = o.noise_budget();
        let expected = 3.0 / 0.7
            + 100.0
            + 1e-4 * 1e8 * (1.5f64 * 1.5 / (2.0 * PI)).sqrt()
            + 2.0 * 0.7 * 1e4 * 100.0 * 1.5 / (1.0f64 + 2.25).sqrt();
        assert!((b.total() / expected - 1.0).abs() < 1e-12);
        let r = snr_pc_oct(&o);
        assert!((r.snr * b.total() / r.numerator - 1.0).abs() < 1e-12);
    }

    #[test]
    fn c_oct_direct_substitution() {
        let o = op(1e6, 0.1, 1.0, 1.0, 1.0, 0.0, 1.0);
        assert!((snr_c_oct(&o) - 4e4).abs() < 1e-8);
        let half = op(1e6, 0.1, 1.0, 1.0, 0.5, 0.0, 1.0);
        assert!((snr_c_oct(&half) - 2e4).abs() < 1e-8);
    }

    #[test]
    fn high_gain_high_power_is_intrinsic() {
        let o = op(1e8, 0.01, 1e6, 1.0, 0.9, 0.0, 1.0);
        let r = classify_regime(&o);
        assert_eq!(r.regime, NoiseTerm::Intrinsic);
        assert!(r.high_gain_applicable);
        assert!(!r.shot_limited_applicable);
    }

    #[test]
    fn low_gain_is_reference_shot_limited() {
        let o = op(1e4, 0.01, 10.0, 1.0, 0.9, 0.0, 1.0);
        let r = classify_regime(&o);
        assert_eq!(r.regime, NoiseTerm::RefShot);
        assert!(r.shot_limited_applicable);
        assert!(snr_pc_oct(&o).snr < snr_c_oct(&o));
    }

    #[test]
    fn tie_goes_to_first_listed_term() {
        let b = NoiseBudget {
            thermal: 1.0,
            ref_shot: 1.0,
            conj_quantum: 1.0,
            intrinsic: 1.0,
        };
        assert_eq!(b.dominant(), NoiseTerm::Thermal);
        let b2 = NoiseBudget {
            thermal: 0.5,
            ref_shot: 2.0,
            conj_quantum: 2.0,
            intrinsic: 2.0,
        };
        assert_eq!(b2.dominant(), NoiseTerm::RefShot);
    }

    #[test]
    fn wideband_high_gain_limit() {
        let o = op(1e3, 0.05, 1e5, 1e4, 0.8, 0.0, 3.0);
        let expected = 2.0 * 3.0 * 0.05f64.powi(2) * 1e3;
        assert!((snr_pc_oct_high_gain(&o) / expected - 1.0).abs() < 1e-3);
        // η < 1/2 makes the high-gain PC-OCT SNR exceed C-OCT
        let low_eta = op(1e3, 0.05, 1e5, 1e4, 0.4, 0.0, 3.0);
        assert!(snr_pc_oct_high_gain(&low_eta) > snr_c_oct(&low_eta));
    }

    #[test]
    fn cross_spectrum_gap_values() {
        let grid = FreqGrid::with_omega_max(1024, 12.0).unwrap();
        let big = Spectrum::gaussian(1e6 / (2.0 * PI).sqrt(), 1.0).unwrap();
        let g = cross_spectrum_gap(&big, &grid).unwrap();
        assert!((g.gap_at_zero / 5e-7 - 1.0).abs() < 1e-6);
        let unit = Spectrum::gaussian(1.0 / (2.0 * PI).sqrt(), 1.0).unwrap();
        let g1 = cross_spectrum_gap(&unit, &grid).unwrap();
        assert!((g1.gap_at_zero - (2.0f64.sqrt() - 1.0)).abs() < 1e-12);
        // monotone in |Ω| on the non-negative half
        let half: Vec<f64> = g1.profile.iter().filter(|p| p.0 >= 0.0).map(|p| p.1).collect();
        assert!(half.windows(2).all(|w| w[1] >= w[0]));
        assert_eq!(g1.max_gap_omega.abs(), grid.omega_max());
    }

    #[test]
    fn rejects_bad_operating_points() {
        let s = Spectrum::gaussian(1.0, 1.0).unwrap();
        let a = AmpResponse::conjugator(Complex64::new(1.0, 0.0), 1.0).unwrap();
        let d = DetectionChain::ideal(1.0).unwrap();
        assert!(SnrOperatingPoint::new(&s, 0.0, a, d).is_err());
        assert!(SnrOperatingPoint::new(&s, 1.5, a, d).is_err());
        let flat = AmpResponse::conjugator(Complex64::new(1.0, 0.0), f64::INFINITY).unwrap();
        assert!(SnrOperatingPoint::new(&s, 0.1, flat, d).is_err());
        let zero = AmpResponse::conjugator(Complex64::new(0.0, 0.0), 1.0).unwrap();
        assert!(SnrOperatingPoint::new(&s, 0.1, zero, d).is_err());
    }
}
