use thiserror::Error;

/// Errors raised by the computational modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("spectral point at a pole: |{quantity}| = {modulus:e}")]
    Pole { quantity: &'static str, modulus: f64 },

    #[error("degenerate weights: {0} vanishes")]
    DegenerateWeight(&'static str),

    #[error("dimension {requested} exceeds budget {cap}")]
    Budget { requested: usize, cap: usize },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("inconsistent seed: {0}")]
    Seed(String),

    #[error("energy has imaginary part {imag:e}")]
    ComplexEnergy { imag: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
