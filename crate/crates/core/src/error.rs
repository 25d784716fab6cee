use thiserror::Error;

use crate::field::AmpMode;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("frequency grid too narrow: S(omega_max)/S(0) = {ratio:e} is not below the cutoff {cutoff:e}")]
    GridTooNarrow { ratio: f64, cutoff: f64 },

    #[error("tabulated spectrum has negative density {value:e} at omega = {omega}")]
    NegativeDensity { omega: f64, value: f64 },

    #[error("tabulated spectrum is not even: S({omega}) = {left:e} but S(-{omega}) = {right:e}")]
    AsymmetricSpectrum { omega: f64, left: f64, right: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("parameter `{name}` must be positive, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },

    #[error("amplifier mode mismatch: expected {expected}, found {found}")]
    WrongAmpMode { expected: AmpMode, found: AmpMode },

    #[error("envelope does not cross e^-2 of its peak on the {side} side of the sweep")]
    NoCrossing { side: &'static str },

    #[error("layer delay {delay} plus guard {guard} exceeds half the record length {half_record}")]
    DelayExceedsGuardBand { delay: f64, guard: f64, half_record: f64 },

    #[error("field grids differ: {left} samples at dt={left_dt} vs {right} samples at dt={right_dt}")]
    GridMismatch { left: usize, left_dt: f64, right: usize, right_dt: f64 },

    #[error("integration time {requested} exceeds the record length {record}")]
    IntegrationExceedsRecord { requested: f64, record: f64 },

    #[error("insufficient trials: relative CI half-width {achieved:.3e} exceeds the requested {requested:.3e} after {trials} trials")]
    InsufficientTrials { trials: usize, achieved: f64, requested: f64 },

    #[error("the quantum-maximum cross-spectrum sqrt(S(S+1)) exceeds the classical bound and cannot be sampled by the classical Gaussian source")]
    QuantumSourceNotSampleable,

    #[error("{0} has no Monte Carlo chain")]
    UnsupportedModality(&'static str),
}
