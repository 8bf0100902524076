use thiserror::Error;

use crate::poset::ElementId;

/// Errors for poset construction, grading validation, divergence
/// evaluation, solvers, and oracles.
#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate element `{0}`")]
    DuplicateElement(ElementId),

    #[error("cover relation references unknown element `{0}`")]
    UnknownElement(ElementId),

    #[error("duplicate cover edge ({0}, {1})")]
    DuplicateCover(ElementId, ElementId),

    #[error("cover relation contains a cycle through `{0}`")]
    CyclicCovers(ElementId),

    #[error("cover edge ({0}, {1}) is implied by transitivity of other covers")]
    TransitiveCover(ElementId, ElementId),

    #[error("poset must have at least one element")]
    EmptyPoset,

    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("maximal-chain enumeration exceeded the cap of {cap} chains")]
    ChainCapExceeded { cap: usize },

    #[error("generated poset would have {required} elements, above the cap of {cap}")]
    ElementCapExceeded { required: u128, cap: u128 },

    #[error("invalid element identifier `{id}`: {reason}")]
    InvalidIdentifier { id: String, reason: &'static str },

    #[error("no value for element `{0}`")]
    MissingValue(ElementId),

    #[error("non-finite value {value} for element `{element}`")]
    NonFiniteValue { element: ElementId, value: f64 },

    #[error(
        "comonotonicity violated on cover ({lower}, {upper}): F({lower}) = {lower_value} vs F({upper}) = {upper_value}"
    )]
    ComonotonicityViolation {
        lower: ElementId,
        upper: ElementId,
        lower_value: f64,
        upper_value: f64,
    },

    #[error(
        "relative divergence undefined: step {step} has increment {f} of F over a zero increment of G"
    )]
    DivergenceUndefined { step: usize, f: f64 },

    #[error("degenerate value range: minimum equals maximum ({0})")]
    DegenerateRange(f64),

    #[error("poset is not an even-sided [l-g] poset: {0}")]
    NotEvenSided(&'static str),

    #[error("invalid increments: {0}")]
    InvalidIncrements(String),

    #[error("invalid knots: {0}")]
    InvalidKnots(String),

    #[error("invalid probability input: {0}")]
    InvalidProbability(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid bundle: {0}")]
    InvalidBundle(String),

    #[error("invalid queue model: {0}")]
    InvalidQueueModel(String),

    #[error("batch coordinate {coord} exceeds capacity {capacity} of queue {queue}")]
    CapacityExceeded {
        queue: usize,
        coord: usize,
        capacity: usize,
    },

    #[error("junction element `{element}` missing from component {component}")]
    JunctionMissing { element: ElementId, component: usize },

    #[error("root finder failed to bracket the normalization constraint")]
    BracketFailure,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("oracle guard exceeded: {0}")]
    GuardExceeded(String),

    #[error("objective not finite at {0}")]
    NonFiniteObjective(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
