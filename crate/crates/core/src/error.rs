use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed file at line {line}: {reason}")]
    MalformedFile { line: usize, reason: String },
    #[error("timestamps not strictly increasing in stream {device}/{sensor} at t_ns={t_ns}")]
    NonMonotonicTime {
        device: String,
        sensor: String,
        t_ns: i64,
    },
    #[error("unknown device '{0}'")]
    UnknownDevice(String),
    #[error("unknown sensor '{0}'")]
    UnknownSensor(String),
    #[error("stream {device}/{sensor} has fewer than 2 samples")]
    EmptyStream { device: String, sensor: String },
    #[error("invalid recording: {0}")]
    InvalidRecording(String),
    #[error("subject '{0}' listed more than once")]
    DuplicateSubject(String),
    #[error("negative BrAC {brac} for subject '{subject}'")]
    NegativeBrac { subject: String, brac: f64 },
    #[error("BrAC threshold {0} is not one of 220, 240, 250, 350")]
    InvalidThreshold(f64),

    #[error("fewer than 2 samples in window [{start_s}, {end_s}) s")]
    WindowEmpty { start_s: f64, end_s: f64 },
    #[error("SMA window must be odd, got {0}")]
    EvenWindow(usize),
    #[error("empty signal")]
    EmptySignal,
    #[error("non-finite input value")]
    NonFiniteInput,
    #[error("signal too short: need at least {needed} samples, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("missing sensor: {0}")]
    MissingSensor(String),
    #[error("recording lacks device {0}")]
    MissingDevice(String),
    #[error("feature catalogs differ")]
    CatalogMismatch,

    #[error("empty training data")]
    EmptyData,
    #[error("classification labels must be 0 or 1")]
    NonBinaryLabels,
    #[error("all sample weights are zero")]
    DegenerateWeights,
    #[error("only one class present in training labels")]
    SingleClass,
    #[error("expected {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("malformed model file at line {line}: {reason}")]
    MalformedModelFile { line: usize, reason: String },
    #[error("model catalog fingerprint {model} does not match data fingerprint {data}")]
    CatalogFingerprintMismatch { model: String, data: String },
    #[error("invalid model configuration: {0}")]
    InvalidModel(String),

    #[error("only one class present at threshold {0}")]
    SingleClassAtThreshold(f64),
    #[error("need at least 3 subjects, got {0}")]
    TooFewSubjects(usize),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("invalid subject profile: {0}")]
    InvalidProfile(String),
    #[error("bad BrAC distribution: {0}")]
    BadDistribution(String),

    #[error("subject '{subject}' is missing its {session} session{hint}")]
    MissingSession {
        subject: String,
        session: String,
        hint: String,
    },
    #[error("no label for subject '{0}'")]
    MissingLabel(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn malformed(line: usize, reason: impl Into<String>) -> Self {
        Error::MalformedFile {
            line,
            reason: reason.into(),
        }
    }

    /// Stable machine-readable code used on the CLI error line.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Io { .. } => "Io",
            Error::MalformedFile { .. } => "MalformedFile",
            Error::NonMonotonicTime { .. } => "NonMonotonicTime",
            Error::UnknownDevice(_) => "UnknownDevice",
            Error::UnknownSensor(_) => "UnknownSensor",
            Error::EmptyStream { .. } => "EmptyStream",
            Error::InvalidRecording(_) => "InvalidRecording",
            Error::DuplicateSubject(_) => "DuplicateSubject",
            Error::NegativeBrac { .. } => "NegativeBrac",
            Error::InvalidThreshold(_) => "InvalidThreshold",
            Error::WindowEmpty { .. } => "WindowEmpty",
            Error::EvenWindow(_) => "EvenWindow",
            Error::EmptySignal => "EmptySignal",
            Error::NonFiniteInput => "NonFiniteInput",
            Error::TooShort { .. } => "TooShort",
            Error::MissingSensor(_) => "MissingSensor",
            Error::MissingDevice(_) => "MissingDevice",
            Error::CatalogMismatch => "CatalogMismatch",
            Error::EmptyData => "EmptyData",
            Error::NonBinaryLabels => "NonBinaryLabels",
            Error::DegenerateWeights => "DegenerateWeights",
            Error::SingleClass => "SingleClass",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::MalformedModelFile { .. } => "MalformedModelFile",
            Error::CatalogFingerprintMismatch { .. } => "CatalogFingerprintMismatch",
            Error::InvalidModel(_) => "InvalidModel",
            Error::SingleClassAtThreshold(_) => "SingleClassAtThreshold",
            Error::TooFewSubjects(_) => "TooFewSubjects",
            Error::LengthMismatch(..) => "LengthMismatch",
            Error::InvalidProfile(_) => "InvalidProfile",
            Error::BadDistribution(_) => "BadDistribution",
            Error::MissingSession { .. } => "MissingSession",
            Error::MissingLabel(_) => "MissingLabel",
        }
    }
}
