use thiserror::Error;

/// Failures raised by the library. Poles and degeneracies are kept distinct
/// from plain input errors so callers can report them differently.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("not a valid conductivity: {0}")]
    InvalidConductivity(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not symmetric within tolerance (max asymmetry {asymmetry:e}, tol {tol:e})")]
    NotSymmetric { asymmetry: f64, tol: f64 },

    #[error("degenerate lamination: {reason} (condition estimate {condition:e})")]
    DegenerateLamination { reason: String, condition: f64 },

    #[error("Y-transform pole (arithmetic-mean σ*): {0}")]
    YTransformPole(String),

    #[error("Y-transform undefined: the two phases are identical")]
    IdenticalPhases,

    #[error("singular reference tensor: {0}")]
    SingularReference(String),
}

impl Error {
    /// True for mathematical poles and degeneracies, as opposed to malformed input.
    pub fn is_degeneracy(&self) -> bool {
        matches!(
            self,
            Error::DegenerateLamination { .. }
                | Error::YTransformPole(_)
                | Error::IdenticalPhases
                | Error::SingularReference(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
