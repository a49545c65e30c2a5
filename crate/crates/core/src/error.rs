use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Hermite order {order} is not supported (maximum {max})")]
    UnsupportedOrder { order: usize, max: usize },

    #[error("{what}: argument {value} outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("standardized cumulant of order {order} is required but not present")]
    MissingCumulant { order: usize },

    #[error("cumulants not realizable: excess kurtosis {zeta4} < skewness^2 - 2 = {bound}")]
    Unrealizable { zeta4: f64, bound: f64 },

    #[error("sample of {len} values is too short (need at least {need})")]
    SampleTooShort { len: usize, need: usize },

    #[error("sample has zero variance")]
    DegenerateSample,

    #[error("CDF oracle is not a monotone map into [0,1] (probe at t = {at})")]
    InvalidOracle { at: f64 },

    #[error("loss probability {probability} is saturated; the criterion is infinite")]
    Saturated { probability: f64 },

    #[error("Edgeworth probability {value} left (0,1); the truncated expansion has broken down")]
    ApproximationBreakdown { value: f64 },

    #[error("quadratic truncation has no real root (discriminant {discriminant})")]
    NoRealRoot { discriminant: f64 },

    #[error("Newton solve failed after {iterations} iterations (residual {residual})")]
    SolverFailure {
        iterations: usize,
        residual: f64,
        trajectory: Vec<f64>,
    },

    #[error("Newton derivative {derivative} vanished at s = {at}")]
    SingularStep { at: f64, derivative: f64 },

    #[error("dominance violated at t = {at}: bonus CDF exceeds base CDF by {gap}")]
    DominanceViolation { at: f64, gap: f64 },
}
