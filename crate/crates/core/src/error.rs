use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by model construction and evaluation.
///
/// Validation problems (bad parameters, shapes, sizes) are kept apart from
/// numerical failures (poles, grounded copula regions, quadrature) so callers
/// can map them to different exit paths.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    Parameter(String),
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("{what} exceeds the enumeration bound of {bound}")]
    TooLarge { what: String, bound: usize },
    #[error("invalid structure: {0}")]
    Structure(String),
    #[error("sampler not supported: {0}")]
    UnsupportedSampler(String),
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("scenario shape mismatch: {0}")]
    Shape(String),
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error("output failed: {0}")]
    Output(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::Pole(_) | Error::Quadrature(_))
    }
}

pub(crate) fn check_len(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::LengthMismatch { left, right });
    }
    Ok(())
}
