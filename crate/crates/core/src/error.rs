use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A coordinate or length was NaN or infinite.
    NonFinite(&'static str),
    /// A quantity that must be strictly positive was not.
    NonPositive(&'static str),
    /// A quantity that must be non-negative was negative.
    Negative(&'static str),
    /// Triangle area below the degeneracy threshold.
    DegenerateTriangle,
    /// Fewer than three verifiers were supplied.
    TooFewVerifiers(usize),
    /// The game-level analyses are defined for exactly three verifiers.
    NotThreeVerifiers(usize),
    /// Two verifiers share a position.
    DuplicateVerifier { first: usize, second: usize },
    /// Bound count does not match the verifier count.
    BoundCountMismatch { verifiers: usize, bounds: usize },
    /// Some pairwise verifier distance exceeds the range.
    VerifiersTooFar { distance: f64, range: f64 },
    /// The raster step does not fit inside the bounding box.
    StepExceedsExtent { step: f64, extent: f64 },
    /// Bounding box with non-positive width or height.
    EmptyBoundingBox,
    /// Least-squares estimation hit its iteration cap on every seed.
    EstimationDidNotConverge { iterations: usize },
    /// No feasible starting point could be sampled.
    NoFeasibleStart,
    /// Empty payoff matrix or action set.
    EmptyGame,
    /// Operation requires an equilateral verifier triangle.
    NotEquilateral,
    /// Probability weights were invalid.
    InvalidDensity(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonFinite(what) => write!(f, "{what} must be finite"),
            Error::NonPositive(what) => write!(f, "{what} must be strictly positive"),
            Error::Negative(what) => write!(f, "{what} must be non-negative"),
            Error::DegenerateTriangle => write!(f, "degenerate triangle"),
            Error::TooFewVerifiers(n) => write!(f, "need at least 3 verifiers, got {n}"),
            Error::NotThreeVerifiers(n) => {
                write!(f, "game analysis needs exactly 3 verifiers, got {n}")
            }
            Error::DuplicateVerifier { first, second } => {
                write!(f, "verifiers {first} and {second} coincide")
            }
            Error::BoundCountMismatch { verifiers, bounds } => {
                write!(f, "{bounds} distance bounds for {verifiers} verifiers")
            }
            Error::VerifiersTooFar { distance, range } => write!(
                f,
                "verifier pair at distance {distance} exceeds range {range}"
            ),
            Error::StepExceedsExtent { step, extent } => {
                write!(f, "raster step {step} exceeds bounding box extent {extent}")
            }
            Error::EmptyBoundingBox => write!(f, "bounding box is empty"),
            Error::EstimationDidNotConverge { iterations } => write!(
                f,
                "position estimate did not converge within {iterations} iterations"
            ),
            Error::NoFeasibleStart => write!(f, "no feasible starting point found"),
            Error::EmptyGame => write!(f, "game has no actions"),
            Error::NotEquilateral => write!(f, "verifier triangle is not equilateral"),
            Error::InvalidDensity(why) => write!(f, "invalid density: {why}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
