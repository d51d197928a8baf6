use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid basis index (l = {l}, m = {m})")]
    InvalidIndex { l: usize, m: i64 },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("linear solve did not converge after {iters} iterations (residual {residual:e})")]
    LinearSolve { iters: usize, residual: f64 },
    #[error("source iteration did not converge in {sweeps} sweeps (change {change:e})")]
    SourceIteration { sweeps: usize, change: f64 },
    #[error("diffusion reference Newton iteration did not converge (change {0:e})")]
    Newton(f64),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the benchmark CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidIndex { .. } => 2,
            Error::Invariant(_) => 4,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
