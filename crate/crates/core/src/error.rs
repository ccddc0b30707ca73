use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid point cloud: {0}")]
    InvalidCloud(String),

    #[error("cosine distance is undefined for zero vector at index {index}")]
    ZeroVector { index: usize },

    #[error("invalid shape parameters: {0}")]
    InvalidShapeParams(String),

    #[error("requested {requested} components but rank is at most {max}")]
    Rank { requested: usize, max: usize },

    #[error("filtration would exceed the budget of {budget} simplices; lower max_dim/max_epsilon or subsample")]
    BudgetExceeded { budget: usize },

    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),

    #[error("oracle is limited to {max} points, got {n}")]
    TooLarge { n: usize, max: usize },

    #[error("prime index {0} is outside 1..=1000")]
    OutOfRange(usize),

    #[error("value is not a perforation encoding: {0}")]
    NotEncodable(String),

    #[error("lens dimension {0} is not supported (only 1 or 2)")]
    UnsupportedLensDim(usize),

    #[error("series of length {len} is too short for d={d}, tau={tau}")]
    SeriesTooShort { len: usize, d: usize, tau: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("bad magic bytes, expected HST1")]
    BadMagic,

    #[error("unsupported HST1 version {0}")]
    UnsupportedVersion(u32),

    #[error("file truncated while reading {0}")]
    TruncatedFile(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("non-finite value in sentence {sentence_id} at flat offset {offset}")]
    NonFiniteValue { sentence_id: String, offset: usize },

    #[error("epoch {epoch} out of range for sentence {sentence_id} with {n_epochs} epochs")]
    EpochOutOfRange {
        epoch: usize,
        sentence_id: String,
        n_epochs: usize,
    },

    #[error("no usable sentences for epoch {0}")]
    EmptySample(usize),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
