//! Simulation and numerical verification toolkit for multivariate Pareto
//! maxima under i.i.d. Exponential(1) coordinates (Model E).
//!
//! The crate provides:
//!
//! * [`model`] — domain types (points, Gumbel laws), the strict-dominance
//!   relation, and deterministic counter-based random streams;
//! * [`front`] — streaming and offline computation of the set of maxima
//!   (Pareto records) of a sample, record statistics, and the exact
//!   smallest-maximum law at epoch 2;
//! * [`boundaries`] — the boundary sequences b*_n(a), b_n(a), b̲_n, b̄_n,
//!   the normalized record statistic, and the limiting Gumbel survival;
//! * [`quad`] — adaptive quadrature of the expected-count integrals, Gamma
//!   tails, mean brackets, and related bound estimates;
//! * [`dist`] — total-variation and Kolmogorov distances, concentration
//!   bands, and the hypothesis tests used by the verification harness;
//! * [`poisson`] — samplers and counters for the Poissonized and
//!   conditioned record counts over ℓ¹ shells.

// negated float comparisons below are deliberate NaN-rejecting guards
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundaries;
pub mod dist;
pub mod front;
pub mod model;
pub mod poisson;
pub mod quad;
pub mod rng;

pub use boundaries::{lambda_of, limit_survival, phi_circ, shell, Epoch, OmegaRule, ShellBoundaries};
pub use front::{front_offline, simulate_record_front, ParetoFront, RecordStats};
pub use model::{
    gumbel_cdf, gumbel_quantile, l1_norm, sample_exponential_point, sample_simplex_uniform,
    strictly_dominates, GumbelLaw, Point,
};
pub use rng::RngStream;

/// Errors raised by precondition violations across the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two points (or a point and a container) disagree on dimension.
    DimensionMismatch { expected: usize, got: usize },
    /// A dimension argument is below the supported minimum.
    BadDimension { d: usize, min: usize },
    /// An operation that needs at least one element received none.
    EmptyInput,
    /// A coordinate that must be strictly positive and finite is not.
    NonPositiveCoordinate,
    /// A probability argument lies outside its admissible open interval.
    NotAProbability(f64),
    /// The epoch is too small for the nested logarithms to be defined.
    BelowAdmissibleEpoch { n_min: u64 },
    /// 1 - a/ln ln n is nonpositive, so the boundary formula is undefined.
    LogArgumentNonpositive,
    /// |a| exceeds the admissible offset a_n for this epoch.
    InadmissibleOffset { a: f64, a_n: f64 },
    /// An interval argument has lo >= hi (or is otherwise degenerate).
    BadInterval { lo: f64, hi: f64 },
    /// A probability mass function does not sum to one.
    Unnormalized { total: f64 },
    /// Fewer data points than the test requires.
    TooFewPoints { got: usize, min: usize },
    /// Catch-all for scalar precondition violations.
    BadParameter(&'static str),
}

impl std::fmt::Display for Error {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::BadDimension { d, min } => write!(f, "dimension {d} below minimum {min}"),
            Error::EmptyInput => write!(f, "empty input"),
            Error::NotAProbability(u) => write!(f, "{u} is not a probability in (0, 1)"),
            Error::BelowAdmissibleEpoch { n_min } => {
                write!(f, "below admissible epoch (need n >= {n_min})")
            }
            Error::LogArgumentNonpositive => write!(f, "log argument nonpositive"),
            Error::InadmissibleOffset { a, a_n } => {
                write!(f, "offset {a} outside admissible range |a| <= {a_n}")
            }
            Error::BadInterval { lo, hi } => write!(f, "bad interval [{lo}, {hi})"),
            Error::NonPositiveCoordinate => write!(f, "coordinates must be positive and finite"),
            Error::Unnormalized { total } => write!(f, "pmf sums to {total}, expected 1"),
            Error::TooFewPoints { got, min } => write!(f, "got {got} points, need at least {min}"),
            Error::BadParameter(what) => write!(f, "bad parameter: {what}"),
        }
    }
}

impl std::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// k! as a float; exact for every k this crate meets (k <= 22).
pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}
