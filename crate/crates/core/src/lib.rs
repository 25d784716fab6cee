//! Simulation of phase-conjugate optical coherence tomography alongside its
//! conventional, two-pass and quantum counterparts.
//!
//! * [`field`]: spectra, frequency grids, layered samples, amplifiers, detectors.
//! * [`signatures`]: mean interference signatures, axial resolution, dispersion.
//! * [`snr`]: closed-form SNR and noise budgets.
//! * [`stochastic`]: Monte Carlo synthesis, propagation and detection.

pub mod error;
pub mod field;
pub mod fit;
pub mod signatures;
pub mod snr;
pub mod stats;
pub mod stochastic;
pub mod transform;

pub use error::{Error, Result};
pub use field::{
    eval_amp_response, eval_sample_response, eval_spectrum, AmpMode, AmpResponse, DetectionChain, FreqGrid, Layer,
    LayeredSample, Spectrum, TabulatedSpectrum,
};
pub use signatures::{Modality, OctSetup, SignatureTrace, Sweep};
pub use snr::{NoiseBudget, NoiseTerm, SnrOperatingPoint, SnrReport};
