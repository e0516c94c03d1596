use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("jet order {order} outside 0..={max}")]
    Bounds { order: usize, max: usize },

    #[error("singular jet: {0}")]
    SingularJet(String),

    #[error("insufficient jet order: need {needed}, have {available}")]
    InsufficientOrder { needed: usize, available: usize },

    #[error("point ({u}, {v}) lies outside the regular domain")]
    SingularDomain { u: f64, v: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate point: {0}")]
    Degenerate(String),

    #[error("flat point: |K| = {k:e} at ({u}, {v})")]
    FlatPoint { u: f64, v: f64, k: f64 },

    #[error("focal degeneracy: 1 - 2 mu H + mu^2 K = {factor:e} at ({u}, {v})")]
    FocalDegeneracy { u: f64, v: f64, factor: f64 },

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("turning angle unwrap failed near u = {0}")]
    Unwrap(f64),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by the input geometry rather than by the caller.
    pub fn is_degenerate_input(&self) -> bool {
        !matches!(self, Error::Parse(_))
    }
}
