use relres_core::CoreError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("no offers")]
    NoOffers,
    #[error("block reliability floor {psi} cannot be reached by any offer subset")]
    PsiUnachievable { psi: f64 },
    #[error("block reliability floor {psi} with {blocks} blocks does not guarantee the target {target}")]
    PsiTooLow { psi: f64, blocks: usize, target: f64 },
    #[error("{needed} offers with reliability >= {uniform} are needed per block, only {available} qualify")]
    TooFewUniformOffers { needed: usize, available: usize, uniform: f64 },
    #[error("missing parameter: {0}")]
    MissingParameter(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("offer `{0}` has no source tag")]
    MissingSource(String),
    #[error("malformed correlation matrix: {0}")]
    Correlation(String),
    #[error("{binaries} binary variables exceed the enumeration cap of {cap}")]
    CapExceeded { binaries: usize, cap: usize },
    #[error("solver `{solver}` does not handle formulation `{formulation}`")]
    WrongFormulation { solver: &'static str, formulation: String },
    #[error("search limit reached before any feasible portfolio was found (lower bound {lower_bound})")]
    LimitReached { lower_bound: f64 },
    #[error("qualifying offers cover {available} MW of the requested {requested} MW")]
    InsufficientVolume { available: f64, requested: f64 },
    #[error("formulation `{0}` has nonlinear reliability constraints; export one of milp, uniform, correlated, source-restricted instead")]
    NonlinearExport(String),
    #[error("LP text: line {line}: {message}")]
    LpParse { line: usize, message: String },
}
