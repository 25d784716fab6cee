use serde::Serialize;

/// Exit code for configuration and usage errors.
pub const EXIT_CONFIG: i32 = 2;
/// Exit code for numeric failures during a run.
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorClass {
    Config,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Serialize, thiserror::Error)]
#[error("{code}: {message}")]
pub struct CliError {
    pub class: ErrorClass,
    /// Machine-readable error code, e.g. `missing_key` or `grid_too_narrow`.
    pub code: String,
    pub message: String,
}

impl CliError {
    pub fn config(code: &str, message: String) -> Self {
        CliError {
            class: ErrorClass::Config,
            code: code.into(),
            message,
        }
    }

    pub fn missing(key: &str) -> Self {
        Self::config("missing_key", format!("missing key `{key}`"))
    }

    pub fn invalid(key: &str, reason: String) -> Self {
        Self::config("invalid_value", format!("`{key}`: {reason}"))
    }

    pub fn io(context: &str, err: std::io::Error, class: ErrorClass) -> Self {
        CliError {
            class,
            code: "io".into(),
            message: format!("{context}: {err}"),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.class {
            ErrorClass::Config => EXIT_CONFIG,
            ErrorClass::Numeric => EXIT_NUMERIC,
        }
    }

    /// One-line JSON record for the error stream.
    pub fn record(&self) -> String {
        #[derive(Serialize)]
        struct Record<'a> {
            status: &'static str,
            exit_code: i32,
            #[serde(flatten)]
            error: &'a CliError,
        }
        serde_json::to_string(&Record {
            status: "error",
            exit_code: self.exit_code(),
            error: self,
        })
        .expect("error record is serialisable")
    }
}

impl From<pcoct::Error> for CliError {
    fn from(e: pcoct::Error) -> Self {
        use pcoct::Error::*;
        let (class, code) = match &e {
            GridTooNarrow { .. } => (ErrorClass::Numeric, "grid_too_narrow"),
            NoCrossing { .. } => (ErrorClass::Numeric, "no_crossing"),
            DelayExceedsGuardBand { .. } => (ErrorClass::Numeric, "delay_exceeds_guard_band"),
            GridMismatch { .. } => (ErrorClass::Numeric, "grid_mismatch"),
            IntegrationExceedsRecord { .. } => (ErrorClass::Numeric, "integration_exceeds_record"),
            InsufficientTrials { .. } => (ErrorClass::Numeric, "insufficient_trials"),
            NegativeDensity { .. } => (ErrorClass::Config, "negative_density"),
            AsymmetricSpectrum { .. } => (ErrorClass::Config, "asymmetric_spectrum"),
            InvalidParameter { .. } => (ErrorClass::Config, "invalid_parameter"),
            NonPositiveParameter { .. } => (ErrorClass::Config, "non_positive_parameter"),
            WrongAmpMode { .. } => (ErrorClass::Config, "wrong_amp_mode"),
            QuantumSourceNotSampleable => (ErrorClass::Config, "quantum_source_not_sampleable"),
            UnsupportedModality(_) => (ErrorClass::Config, "unsupported_modality"),
        };
        CliError {
            class,
            code: code.into(),
            message: e.to_string(),
        }
    }
}
