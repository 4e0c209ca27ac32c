use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("potential range must be positive, got {0}")]
    NonpositiveRange(f64),
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("grid too coarse: residual {residual:e} above tolerance {tol:e}")]
    GridTooCoarse { residual: f64, tol: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("scattering length is zero; effective range undefined")]
    ZeroScatteringLength,
    #[error("no bracket: achieved scattering lengths in [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },
    #[error("unsupported moment n = {0}")]
    UnsupportedMoment(i32),
    #[error("orbit mismatch: {0}")]
    SymmetryOrbitMismatch(String),
    #[error("degenerate hull: corners {0} and {1} coincide after rounding")]
    DegenerateHull(usize, usize),
    #[error("empty momentum set")]
    EmptySet,
    #[error("grid M = {m} aliases; need at least {need}")]
    GridAliased { m: usize, need: usize },
    #[error("fit ill-conditioned: directional spread {0:e}")]
    FitIllConditioned(f64),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("term budget exceeded: {needed} terms requested, budget {budget}")]
    BudgetExceeded { needed: f64, budget: f64 },
    #[error("unknown diagram id {0}")]
    UnknownId(String),
    #[error("dilute regime violated: convergence parameter {0:e}")]
    DiluteRegimeViolated(f64),
    #[error("invalid geometry: {0}")]
    GeometryInvalid(String),
}

impl Error {
    /// Process exit code class: 1 config, 2 precondition, 3 budget/cap.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CapExceeded(_) | Error::BudgetExceeded { .. } => 3,
            Error::InvalidPotential(_) | Error::UnknownId(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
