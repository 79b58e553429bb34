use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("sum of |p|^2 c_p A_p is zero; the family has no gradient normalization")]
    ZeroDenominator,

    #[error("pair ({p1},{p2}) is not a valid stencil pair")]
    NonCanonicalPair { p1: i64, p2: i64 },

    #[error("pair ({p1},{p2}) appears more than once")]
    DuplicatePair { p1: u32, p2: u32 },

    #[error("{pairs} pairs but {coefficients} coefficients")]
    LengthMismatch { pairs: usize, coefficients: usize },

    #[error("coefficients violate 8 sum c_p A_p = 1 (got {got})")]
    NormalizationViolated { got: String },

    #[error("stencil field `{field}` is inconsistent: stored {stored}, computed {computed}")]
    InconsistentStencil {
        field: &'static str,
        stored: String,
        computed: String,
    },

    #[error("invalid rational `{0}`")]
    RationalParse(String),

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },

    #[error("exponent at byte {offset} must be an integer constant")]
    NonIntegerExponent { offset: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("harmonic basis degree must be at least 1 (got {0})")]
    InvalidDegree(u32),

    #[error("invalid cell digit {0}; digits are 1..=4")]
    InvalidDigit(u8),

    #[error("cell averages at levels {left} and {right} cannot be combined")]
    LevelMismatch { left: u32, right: u32 },

    #[error("no interior cells at level {level} for this stencil")]
    EmptyInterior { level: u32 },

    #[error("cell ({i},{j}) at level {level} has stencil neighbors outside the square")]
    BoundaryCell { level: u32, i: usize, j: usize },

    #[error("stencil neighbors of the square centered at ({x},{y}) with side {side} leave the unit square")]
    NeighborOutOfDomain { x: f64, y: f64, side: f64 },

    #[error("no derivative bounds are available for this function")]
    UnboundedDerivatives,

    #[error("order fit needs at least {needed} samples above the rounding floor, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("every defect is below the rounding floor; the function is reproduced exactly")]
    AllBelowFloor,

    #[error("mean value level is only known as a lower bound (>= {0})")]
    LevelUnknown(u32),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
