use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("solver did not converge at tau={tau}: residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    SolverDivergence { tau: f64, residual: f64, tolerance: f64 },
    #[error("Gronwall envelope violated at tau={tau}, x={x}: |m-1|={value:.3e} > bound {bound:.3e}")]
    GronwallViolation { tau: f64, x: f64, value: f64, bound: f64 },
    #[error("transmission denominator {magnitude:.3e} below 1e-12 at tau={tau}")]
    SmallDenominator { tau: f64, magnitude: f64 },
    #[error("oscillation budget violated: h_tau={actual:.4e} but at most {required:.4e} is required")]
    Nyquist { required: f64, actual: f64 },
    #[error("frequency coverage insufficient: {0}")]
    FrequencyCoverage(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("function does not decay at the grid edges (|f|={edge:.3e}); enlarge the grid")]
    NonDecaying { edge: f64 },
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("mode mismatch: {0}")]
    ModeMismatch(String),
    #[error("missing kernel for block j={0}")]
    MissingKernel(i32),
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name: name.to_string(), reason: reason.into() }
}
