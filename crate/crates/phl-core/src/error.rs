use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by grid construction, operators, and corpus generation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be 1, 2, or 3, got {0}")]
    BadDimension(usize),

    #[error("per-axis sample counts and half-widths must have matching lengths ({n} vs {l})")]
    AxisCountMismatch { n: usize, l: usize },

    #[error("axis {axis} out of range for dimension {d}")]
    AxisOutOfRange { axis: usize, d: usize },

    #[error("sample count on axis {axis} must be a power of two >= 16, got {n}")]
    BadSampleCount { axis: usize, n: usize },

    #[error("half-width on axis {axis} must be positive and finite")]
    BadHalfWidth { axis: usize },

    #[error("value buffer has length {got}, grid needs {want}")]
    LengthMismatch { got: usize, want: usize },

    #[error("non-finite sample at flat index {0}")]
    NonFiniteSample(usize),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("exponent must be positive and finite, got {0}")]
    BadExponent(f64),

    #[error("exponent p must lie in (0, 1], got {0}")]
    ExponentOutOfRange(f64),

    #[error("order must lie in ({lo}, {hi}), got {got}")]
    OrderOutOfRange { lo: f64, hi: f64, got: f64 },

    #[error("incompatible exponents: 1/p - alpha/d must stay positive (p = {p}, alpha = {alpha}, d = {d})")]
    IncompatibleExponents { p: f64, alpha: f64, d: usize },

    #[error("non-finite multiplier value at bin {0:?}")]
    NonFiniteMultiplier(Vec<usize>),

    #[error("axis {0} repeated in axis set")]
    RepeatedAxis(usize),

    #[error("smoothing scale on axis {0} must be nonnegative")]
    NegativeScale(usize),

    #[error("scale ladder invalid: {0}")]
    BadLadder(String),

    #[error("cone quadrature invalid: {0}")]
    BadConeQuadrature(String),

    #[error("wavelet failed its post-construction check: {0}")]
    BadWavelet(String),

    #[error("wavelet moment order {order} insufficient for p = {p} (needs at least {need})")]
    InsufficientMoments { order: usize, need: usize, p: f64 },

    #[error("operation requires a one-dimensional field, got d = {0}")]
    RequiresOneDim(usize),

    #[error("atom support must lie inside the central half of the domain")]
    SupportOutsideCore,

    #[error("atom support covers {got} samples, need at least {need}")]
    SupportTooSmall { got: usize, need: usize },

    #[error("atom profile vanished after moment projection")]
    DegenerateAtom,

    #[error("atom failed validation: {0}")]
    AtomValidation(String),

    #[error("rectangles must be pairwise disjoint")]
    OverlappingRectangles,

    #[error("a Chang-Fefferman atom needs at least one rectangle")]
    EmptyRectangleList,

    #[error("corpus configuration invalid: {0}")]
    BadCorpusConfig(String),

    #[error("domain must contain [0, 2] in its central half")]
    DomainTooSmall,

    #[error("failed to {action} {path}: {source}")]
    Io {
        action: &'static str,
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("bad field file {path}: {reason}")]
    BadFieldFile { path: PathBuf, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
