use thiserror::Error;

use crate::Rational;

pub type Result<T> = std::result::Result<T, Error>;

/// Grid evidence attached to a failed root search.
#[derive(Clone, Debug, PartialEq)]
pub struct RootEvidence {
    /// Number of grid points scanned.
    pub grid_points: usize,
    /// Grid points where the series was certified positive.
    pub certified_positive: usize,
    /// Grid points where the truncation bound swamped the value.
    pub undecided: usize,
    /// Largest grid abscissa that was still certified positive.
    pub last_positive: f64,
    /// Smallest `value - tail` seen at the undecided grid points.
    pub min_lower_bound: f64,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("argument {x} lies outside [0, 1]")]
    Domain { x: Rational },

    #[error("value {y} lies outside the image [{lo}, {hi}]")]
    Range { y: Box<Rational>, lo: Box<Rational>, hi: Box<Rational> },

    #[error("denominator c*x + d vanishes or changes sign on [0, 1]")]
    Singular,

    #[error("{0}")]
    InvalidMap(String),

    #[error("mask point {q} is outside the overlap interval ({lo}, {hi})")]
    MaskRange { q: Box<Rational>, lo: Box<Rational>, hi: Box<Rational> },

    #[error("critical itineraries known to depth {have}, need {need}")]
    Depth { have: usize, need: usize },

    #[error("itinerary prefixes have different lengths ({alpha} vs {beta})")]
    LengthMismatch { alpha: usize, beta: usize },

    #[error("no certified root of the kneading series in (0, 1)")]
    NoRootFound(RootEvidence),

    #[error("kneading root is not certified")]
    NotCertified,

    #[error("mask variants differ: fractal transformations pair plus with plus and minus with minus")]
    VariantMismatch,

    #[error("raster has invalid dimensions: {0}")]
    Dimension(String),

    #[error("need at least two word counts, got {0}")]
    InsufficientData(usize),

    #[error("real argument {0} must lie strictly inside (0, 1)")]
    OpenUnitInterval(f64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
