use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid generator or system parameters: {0}")]
    InvalidSpec(String),
    #[error("probe grid is empty")]
    EmptyGrid,
    #[error("index is not part of the layout")]
    IndexOutOfLayout,
    #[error("atom support {support:?} leaves the sampling box [-{t1}, {t2}]^2")]
    SupportViolation { support: [[f64; 2]; 2], t1: f64, t2: f64 },
    #[error("invalid sampling grid: {0}")]
    InvalidGrid(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("Gramian has no eigenvalue above the rank tolerance")]
    DegenerateGramian,
    #[error("search budget exhausted: largest grid M = {m} reached c = {c}")]
    SearchBudgetExceeded { m: usize, c: f64 },
    #[error("truncation radius {radius} does not exceed the sampled region {inner}")]
    RadiusTooSmall { radius: f64, inner: f64 },
    #[error("frame bound must be positive, got {0}")]
    NonPositiveFrameBound(f64),
    #[error("invalid image size {nx}x{ny}: both sides must be powers of two")]
    InvalidSize { nx: usize, ny: usize },
    #[error("mask fraction {target} is unreachable (closest {achieved})")]
    UnreachableFraction { target: f64, achieved: f64 },
    #[error("invalid number of wavelet levels {levels} for size {nx}x{ny}")]
    InvalidLevels { levels: usize, nx: usize, ny: usize },
    #[error("invalid number of shearlet scales {scales} for size {nx}x{ny}")]
    InvalidScales { scales: usize, nx: usize, ny: usize },
    #[error("reference image has zero norm")]
    ZeroReference,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{stage}: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },
    #[error("malformed file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn at(self, stage: impl Into<String>) -> Error {
        Error::Stage { stage: stage.into(), source: Box::new(self) }
    }
}
