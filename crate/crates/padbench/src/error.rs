use std::path::PathBuf;

use padbench_core::dataset::DatasetError;
use padbench_core::fid::FidError;
use padbench_core::imaging::ImagingError;
use padbench_core::metrics::MetricsError;
use padbench_core::pipeline::PipelineError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(PathBuf),
    #[error("corrupt image {path}: {message}")]
    CorruptImage { path: PathBuf, message: String },
    #[error("{path}: bad magic bytes, not a PADEMB1 file")]
    BadMagic { path: PathBuf },
    #[error("{path}: file is truncated ({message})")]
    TruncatedFile { path: PathBuf, message: String },
    #[error("{path}: embedding count and dimension must be non-zero")]
    DimensionZero { path: PathBuf },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{failed} of {total} jobs failed, above the allowed rate {max_rate}")]
    TooManyFailures { failed: usize, total: usize, max_rate: f64 },
    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Imaging(#[from] ImagingError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Fid(#[from] FidError),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            return Error::FileNotFound(path);
        }
        Error::Io { path, source }
    }

    pub fn parse(path: impl Into<PathBuf>, message: impl std::fmt::Display) -> Self {
        Error::Parse { path: path.into(), message: message.to_string() }
    }

    /// Stable snake_case identifier used in machine-readable error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::FileNotFound(_) => "file_not_found",
            Error::UnsupportedFormat(_) => "unsupported_format",
            Error::CorruptImage { .. } => "corrupt_image",
            Error::BadMagic { .. } => "bad_magic",
            Error::TruncatedFile { .. } => "truncated_file",
            Error::DimensionZero { .. } => "dimension_zero",
            Error::Parse { .. } => "parse_error",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::TooManyFailures { .. } => "too_many_failures",
            Error::Io { .. } => "io_error",
            Error::Imaging(_) => "imaging_error",
            Error::Pipeline(PipelineError::AlignmentFailed { .. }) => "alignment_failed",
            Error::Pipeline(_) => "pipeline_error",
            Error::Dataset(e) => match e {
                DatasetError::NoRulesForTask(_) => "no_rules_for_task",
                DatasetError::UnknownSubjectInRules { .. } => "unknown_subject_in_rules",
                DatasetError::RuleCoverageGap { .. } => "rule_coverage_gap",
                DatasetError::EmptyTrainSplit(_) => "empty_train_split",
                DatasetError::MissingSyntheticFile(_) => "missing_synthetic_file",
                DatasetError::SyntheticCountMismatch { .. } => "synthetic_count_mismatch",
            },
            Error::Metrics(_) => "metrics_error",
            Error::Fid(_) => "fid_error",
        }
    }

    /// Process exit code: 3 for processing failures, 2 for everything a
    /// caller can fix by changing inputs.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::TooManyFailures { .. } | Error::Io { .. } => 3,
            Error::Pipeline(PipelineError::AlignmentFailed { .. }) => 3,
            Error::Fid(FidError::Linalg(_)) => 3,
            _ => 2,
        }
    }
}
