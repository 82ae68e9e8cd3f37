use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("invalid mode selection: {0}")]
    Selection(String),
    #[error("correlator C_ii is not defined on the diagonal (mode {0})")]
    DiagonalNotDefined(usize),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("size cap exceeded: {0}")]
    SizeCap(String),
    #[error("empty dataset")]
    EmptyDataset,
    #[error("coefficient of variation undefined: mean is zero")]
    CvUndefined,
    #[error("skewness undefined: variance is not positive")]
    SkewnessUndefined,
    #[error("insufficient sample: {0}")]
    InsufficientSample(String),
    #[error("numerical invariant violated: {0}")]
    Numerical(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by parameters outside the mathematical domain
    /// (as opposed to malformed input).
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::CvUndefined
                | Error::SkewnessUndefined
                | Error::DiagonalNotDefined(_)
                | Error::InsufficientSample(_)
                | Error::SizeCap(_)
                | Error::EmptyDataset
                | Error::Numerical(_)
        )
    }
}
