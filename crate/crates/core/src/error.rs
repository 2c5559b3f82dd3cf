use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    #[error("invalid geometry: {0}")]
    Geometry(&'static str),
    #[error("distance must be positive, got {0}")]
    NonPositiveDistance(f64),
    #[error("position coincides with a base station")]
    CoincidentWithBaseStation,
    #[error("measurement matrix is {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
    #[error("measurement matrix contains a non-finite entry")]
    NonFiniteMeasurement,
    #[error("the far-field model has a closed-form likelihood and cannot be marginalized")]
    MarginalNeedsSpatialPrior,
    #[error("integration needs at least {min} nodes, got {got}")]
    TooFewNodes { min: usize, got: usize },
    #[error("all base stations see the same mean power; the far-field statistic is degenerate")]
    DegenerateStatistic,
    #[error("MAP search did not converge from any start")]
    MapNotConverged,
    #[error("Hessian of the log-posterior is not negative definite")]
    IndefiniteHessian,
    #[error("rule `{rule}` cannot be used with the `{model}` threat model")]
    RuleModelMismatch {
        rule: &'static str,
        model: &'static str,
    },
    #[error("rate curve is empty or degenerate")]
    DegenerateCurve,
}
