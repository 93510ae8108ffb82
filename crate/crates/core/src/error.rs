use std::path::PathBuf;

/// Errors raised anywhere in the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: malformed record: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("record {record:?} has unknown level label {label:?} (supply a label<TAB>rank table with --levels)")]
    UnknownLevel { record: String, label: String },

    #[error("duplicate record id {0:?}")]
    DuplicateId(String),

    #[error("duplicate slug id {0:?}")]
    DuplicateSlug(String),

    #[error("record {0:?} has no slug_id but the corpus is parallel")]
    MissingSlugId(String),

    #[error("invalid level map: {0}")]
    LevelMap(String),

    #[error("unexpected corpus layout under {path}: {message}")]
    Layout { path: PathBuf, message: String },

    #[error("invalid split ratios {0:?}: must be positive and sum to 1")]
    InvalidRatios([f64; 3]),

    #[error("unknown format {0:?}")]
    UnknownFormat(String),

    #[error("text has no words")]
    Unanalyzable,

    #[error("predictions without a gold instance: {}", .0.join(", "))]
    UnmatchedPredictions(Vec<String>),

    #[error("gold instances without a prediction: {}", .0.join(", "))]
    MissingPredictions(Vec<String>),

    #[error("more than one prediction for instance {0:?}")]
    DuplicatePrediction(String),

    #[error("predictions mix epochs {0:?} and {1:?}")]
    MixedEpochs(Option<u32>, Option<u32>),

    #[error("cannot select a best epoch: {0}")]
    BestEpoch(String),

    #[error("cannot merge reports: {0}")]
    Merge(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("refusing to overwrite {0}: existing artifact differs")]
    Conflict(PathBuf),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Configuration mistakes the user can fix on the command line.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidRatios(_) | Error::UnknownFormat(_) | Error::LevelMap(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
