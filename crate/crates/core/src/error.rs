use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("loop needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("non-finite coordinate at point {0}")]
    NonFinite(usize),
    #[error("consecutive points {0} and {1} coincide")]
    RepeatedPoint(usize, usize),
    #[error("degenerate primitive: {0}")]
    Degenerate(String),
    #[error("segment {0} has both endpoints at the origin")]
    SegmentAtOrigin(usize),
    #[error("segment {0} subtends an angle of pi at the origin; sample the loop more finely")]
    SegmentThroughOrigin(usize),
    #[error("loop descriptor must contain exactly one of `primitive` or `points`")]
    AmbiguousDescriptor,
    #[error("`orientation` only applies to sampled primitives (circle, ellipse)")]
    OrientationNotApplicable,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoherentError {
    #[error("{name} must be finite and positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error(
        "truncation N={n} leaves a Poisson tail of {tail:e} for |z|^2={z_mod2} (need < 1e-12)"
    )]
    TruncationTooSmall { n: usize, z_mod2: f64, tail: f64 },
    #[error("epsilon must lie in (0, 1/2), got {0}")]
    EpsilonOutOfRange(f64),
    #[error("no positive revival time for p = 1..={p_max}")]
    NoPositiveRevival { p_max: u32 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RotationError {
    #[error("epsilon must lie in (0, 1/2), got {0}")]
    EpsilonOutOfRange(f64),
    #[error("{name} must be finite and positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },
    #[error("delta must lie in [0, 1), got {0}")]
    DeltaOutOfRange(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GapError {
    #[error(transparent)]
    Rotation(#[from] RotationError),
    #[error("delta must lie strictly inside (0, 1), got {0}")]
    DeltaOutOfRange(f64),
    #[error("first-return search exceeded bound {bound} (delta is within tolerance of a rational with a long period)")]
    SearchBoundExceeded { bound: u64 },
    #[error("delta={delta} is rational ({p}/{q}) within tolerance; use the empirical oracle")]
    RationalDelta { delta: f64, p: i64, q: u64 },
    #[error("no window hit within {iterations} iterations")]
    NoHits { iterations: u64 },
    #[error("weight for gap {gap} is negative ({value:e})")]
    NegativeWeight { gap: u64, value: f64 },
}
