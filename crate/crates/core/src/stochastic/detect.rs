//! Balanced Michelson detection with shot and thermal noise.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::FieldSamples;
use crate::error::{Error, Result};
use crate::field::DetectionChain;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectorNoise {
    pub shot: bool,
    pub thermal: bool,
}

impl DetectorNoise {
    pub const OFF: DetectorNoise = DetectorNoise {
        shot: false,
        thermal: false,
    };
    pub const ON: DetectorNoise = DetectorNoise {
        shot: true,
        thermal: true,
    };
}

/// One time-averaged difference current and the noise that went into it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectionRecord {
    /// `⟨i_d⟩_{T_I}` in amperes.
    pub i_avg: f64,
    /// Noise-free part of `i_avg`.
    pub beat: f64,
    /// Variance of the shot-noise contribution to `i_avg`.
    pub shot_variance: f64,
    /// Variance of the thermal contribution to `i_avg`.
    pub thermal_variance: f64,
    pub samples_averaged: usize,
    /// `samples_averaged·Δt`.
    pub integration_time: f64,
}

/// Number of leading samples averaged for the chain's integration time.
pub(crate) fn integration_samples(chain: &DetectionChain, dt: f64, len: usize) -> Result<usize> {
    let requested = chain.integration_time();
    let record = dt * len as f64;
    let m = (requested / dt).round() as usize;
    if m > len {
        return Err(Error::IntegrationExceedsRecord { requested, record });
    }
    Ok(m.max(1))
}

/// `i_d(t) = G_A[2qη·Re(E₁E₂*) + shot + thermal]`, averaged over the first
/// `round(T_I/Δt)` samples.
///
/// Shot noise has two-sided density `q²η(|E₁|² + |E₂|²)` and thermal noise
/// `S_ith`, both white, so their time average is Gaussian with variance
/// `Σ_j σ_j²/m²`; one normal deviate is drawn for that sum.
pub fn michelson_detect<R: Rng + ?Sized>(
    e1: &FieldSamples,
    e2: &FieldSamples,
    chain: &DetectionChain,
    noise: DetectorNoise,
    rng: &mut R,
) -> Result<DetectionRecord> {
    if e1.len() != e2.len() || (e1.dt - e2.dt).abs() > 1e-12 * e1.dt {
        return Err(Error::GridMismatch {
            left: e1.len(),
            left_dt: e1.dt,
            right: e2.len(),
            right_dt: e2.dt,
        });
    }
    let m = integration_samples(chain, e1.dt, e1.len())?;
    let (q, eta, gain) = (chain.electron_charge(), chain.quantum_efficiency(), chain.current_gain());
    let mut beat = 0.0;
    let mut photons = 0.0;
    for (a, b) in e1.samples[..m].iter().zip(&e2.samples[..m]) {
        beat += (a * b.conj()).re;
        photons += a.norm_sqr() + b.norm_sqr();
    }
    let mf = m as f64;
    let beat = chain.michelson_scale() * beat / mf;
    // per-sample variance σ²/Δt summed over m samples, divided by m²
    let per_average = gain * gain / (mf * mf * e1.dt);
    let shot_variance = if noise.shot {
        per_average * q * q * eta * photons
    } else {
        0.0
    };
    let thermal_variance = if noise.thermal {
        per_average * chain.thermal_density() * mf
    } else {
        0.0
    };
    let total = shot_variance + thermal_variance;
    let draw = if total > 0.0 {
        let z: f64 = rng.sample(StandardNormal);
        z * total.sqrt()
    } else {
        0.0
    };
    Ok(DetectionRecord {
        i_avg: beat + draw,
        beat,
        shot_variance,
        thermal_variance,
        samples_averaged: m,
        integration_time: mf * e1.dt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ELECTRON_CHARGE;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn constant(c: Complex64, n: usize, dt: f64) -> FieldSamples {
        FieldSamples::new(dt, vec![c; n])
    }

    #[test]
    fn noiseless_constant_fields() {
        let chain = DetectionChain::new(0.8, 3.0, 0.0, ELECTRON_CHARGE, 10.0).unwrap();
        let c = Complex64::new(1.5, -0.5);
        let e = constant(c, 64, 0.25);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let rec = michelson_detect(&e, &e, &chain, DetectorNoise::OFF, &mut rng).unwrap();
        let expected = 2.0 * ELECTRON_CHARGE * 0.8 * 3.0 * c.norm_sqr();
        assert!((rec.i_avg / expected - 1.0).abs() < 1e-14);
        assert_eq!(rec.samples_averaged, 40);
        let flipped = e.scaled(Complex64::new(-1.0, 0.0));
        let neg = michelson_detect(&e, &flipped, &chain, DetectorNoise::OFF, &mut rng).unwrap();
        assert!((neg.i_avg + rec.i_avg).abs() < 1e-14 * expected);
    }

    #[test]
    fn noise_variance_accounting() {
        let chain = DetectionChain::new(0.5, 2.0, 1e-30, 1.0, 8.0).unwrap();
        let e1 = constant(Complex64::new(2.0, 0.0), 16, 0.5);
        let e2 = constant(Complex64::new(0.0, 1.0), 16, 0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rec = michelson_detect(&e1, &e2, &chain, DetectorNoise::ON, &mut rng).unwrap();
        // white density N averaged over T_I has variance N/T_I
        let shot = 4.0 * 0.5 * 5.0 / 8.0;
        let thermal = 4.0 * 1e-30 / 8.0;
        assert!((rec.shot_variance / shot - 1.0).abs() < 1e-14);
        assert!((rec.thermal_variance / thermal - 1.0).abs() < 1e-14);
    }

    #[test]
    fn integration_longer_than_record() {
        let chain = DetectionChain::ideal(100.0).unwrap();
        let e = constant(Complex64::new(1.0, 0.0), 16, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!(matches!(
            michelson_detect(&e, &e, &chain, DetectorNoise::OFF, &mut rng),
            Err(Error::IntegrationExceedsRecord { .. })
        ));
        let short = FieldSamples::new(1.0, vec![Complex64::new(1.0, 0.0); 8]);
        assert!(matches!(
            michelson_detect(&e, &short, &chain, DetectorNoise::OFF, &mut rng),
            Err(Error::GridMismatch { .. })
        ));
    }
}
