use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coordinate {index} = {value} lies outside [0, 1]")]
    OutOfBounds { index: usize, value: f64 },

    #[error("objective {index} is not finite")]
    NonFinite { index: usize },

    #[error("exact hypervolume supports 1 to 3 objectives, got {0}; use the Monte-Carlo estimator")]
    UnsupportedDimension(usize),

    #[error("front member {index} is dominated by another member")]
    DominatedMember { index: usize },

    #[error("cannot fit a surrogate to an empty training set")]
    EmptyTrainingSet,

    #[error("RBF interpolation system stayed unsolvable after regularization up to {ridge:e}")]
    RbfSolve { ridge: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("iteration {iteration}: every archive point is tabu, no center can be selected")]
    SelectionStarvation { iteration: usize },

    #[error("archive has no point with id {0}")]
    UnknownId(usize),

    #[error("evaluation of batch point {index} failed: {message}")]
    Evaluation { index: usize, message: String },

    #[error("iteration {iteration}, worker {worker}: evaluation returned non-finite objectives twice ({values:?})")]
    NonFiniteEvaluation {
        iteration: usize,
        worker: usize,
        values: Vec<f64>,
    },

    #[error("metric undefined: {0}")]
    MetricUndefined(String),

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
