use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A weight was evaluated where it is not defined.
    #[error("weight domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// Evaluation at a pole (negative powers at z = 0).
    #[error("singularity: {0}")]
    Singular(String),

    #[error("f vanishes on the unit circle (zero of modulus {modulus})")]
    VanishesOnCircle { modulus: f64 },

    #[error("root finder did not converge after {iterations} iterations")]
    RootFinding {
        iterations: usize,
        partial: Vec<Complex64>,
    },

    #[error("ill-conditioned inversion: {0}")]
    Conditioning(String),

    #[error("contour geometry: {0}")]
    Geometry(String),

    #[error("quadrature did not converge: {0}")]
    Accuracy(String),

    #[error("resolvent failed at contour node {index} (lambda = {lambda}): {source}")]
    Node {
        index: usize,
        lambda: Complex64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of a numerical precondition (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Singular(_)
            | Error::VanishesOnCircle { .. }
            | Error::RootFinding { .. }
            | Error::Conditioning(_)
            | Error::Geometry(_)
            | Error::Accuracy(_) => true,
            Error::Node { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
