use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("training data must contain both classes")]
    SingleClass,
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unknown score column `{0}`")]
    MissingColumn(String),
    #[error("duplicate score column `{0}`")]
    DuplicateColumn(String),
    #[error("column `{0}` has zero variance")]
    ZeroVariance(String),
    #[error("need at least {need} rows, got {got}")]
    TooFewRows { need: usize, got: usize },
    #[error("duplicate trial ({enroll_id}, {test_id})")]
    DuplicateTrial { enroll_id: String, test_id: String },
    #[error("invalid trial label: {0}")]
    InvalidLabel(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("cross-validation fold {0} leaves a single class for training")]
    Unstratifiable(usize),
    #[error("no target trials")]
    NoTargets,
    #[error("no {0} trials")]
    MissingClass(&'static str),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("model does not match pathway: {0}")]
    ModelMismatch(String),
}
