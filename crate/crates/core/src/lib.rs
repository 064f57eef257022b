//! Laboratory for the random canonical van der Waerden property.
//!
//! The crate is organised bottom-up:
//!
//! * [`ap`]: arithmetic progressions, ground sets and the k-AP hypergraph.
//! * [`colouring`]: restricted-growth colourings, boundedness, merging and
//!   colour classification of progressions.
//! * [`decider`]: exact, certificate-producing decision procedures for the
//!   canonical, r-colour, rainbow and Szemerédi-type properties.
//! * [`rainbow`]: the rainbow hypergraph on `[r] x [n]`, its degree
//!   statistics and the container-structure extraction.
//! * [`cycles`]: Berge cycles, girth and minimal-cycle enumeration.
//! * [`random_lab`]: seeded binomial sampling and Monte Carlo threshold
//!   estimation.
//!
//! Colours are 0-based everywhere; integers of the ground set are 1-based.

pub mod ap;
pub mod colouring;
pub mod cycles;
pub mod decider;
pub mod rainbow;
pub mod random_lab;

pub use ap::{ArithmeticProgression, GroundSet, UniformHypergraph};
pub use colouring::{APColourClass, ColourCounts, Colouring};
pub use decider::{Budget, Certificate, DecisionResult, Verdict};

/// Exact rational used for the density parameters (alpha, beta, epsilon).
pub type Ratio = num_rational::Ratio<u64>;

/// Errors returned by the library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("search budget of {budget} steps exhausted")]
    BudgetExhausted { budget: u64 },
    #[error("no crossing of target {target}: estimate {at_lo} at p={p_lo}, {at_hi} at p={p_hi}")]
    NoCrossing {
        target: f64,
        p_lo: f64,
        at_lo: f64,
        p_hi: f64,
        at_hi: f64,
    },
    #[error("non-monotone profile: estimate {at_lo} at p={p_lo} exceeds {at_hi} at p={p_hi} beyond noise")]
    NonMonotone {
        p_lo: f64,
        at_lo: f64,
        p_hi: f64,
        at_hi: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
