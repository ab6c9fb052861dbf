use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("nonpositive coupling: g = {0}")]
    NonpositiveCoupling(f64),
    #[error("nonpositive cavity decay: kappa = {0}")]
    NonpositiveKappa(f64),
    #[error("atomic linewidth is the unit of rates and must be 1, got gamma = {0}")]
    GammaNotUnit(f64),
    #[error("negative vibronic detuning: delta1 = {0}")]
    NegativeDetuning(f64),
    #[error("nonpositive drive: y = {0}")]
    NonpositiveDrive(f64),
    #[error("drive too large for weak-field validity: y = {value} (limit {limit})")]
    DriveTooLarge { value: f64, limit: f64 },
    #[error("non-finite parameter {0}")]
    NonFinite(&'static str),
    #[error("vibronic index {l} outside truncation 0..={l_max}")]
    LevelOutOfRange { l: usize, l_max: usize },
    #[error("amplitude arrays have mismatched lengths: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid motional state: {0}")]
    InvalidState(String),
    #[error("singular {what} at vibronic level l = {l}")]
    Singular { what: &'static str, l: usize },
    #[error("cannot condition: {0}")]
    Degenerate(&'static str),
    #[error("invalid tau grid: {0}")]
    InvalidGrid(String),
    #[error("series kind {found} not accepted here (expected {expected})")]
    WrongKind { expected: &'static str, found: String },
    #[error("empty correlation series")]
    EmptySeries,
    #[error("series has not decayed at tau_max: |h - 1| = {residual:e} (need < {limit:e})")]
    InsufficientDecay { residual: f64, limit: f64 },
    #[error("integration step too large: dt * |eigenvalue| bound = {product} (limit {limit})")]
    StabilityGuard { product: f64, limit: f64 },
    #[error("integration did not reach a steady state within t_end = {t_end}")]
    NotConverged { t_end: f64 },
    #[error("invalid integration config: {0}")]
    InvalidConfig(String),
}
