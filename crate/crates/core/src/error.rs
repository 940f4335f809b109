use thiserror::Error;

/// Errors produced by the approximation pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum IacmError {
    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    /// The empirical marginals admit no joint distribution (usually rounding).
    #[error("infeasible constraints (phase-one residual {residual:e})")]
    InfeasibleConstraints { residual: f64 },

    /// The optimal objective is zero, so no distribution of the model is reachable.
    #[error("degenerate model: objective value is zero")]
    DegenerateModel,

    #[error("linear program failed: {0}")]
    Solver(String),

    #[error("no monotone model fits the data")]
    NoMonotoneModel,

    #[error("operation requires binary variables, got ranges ({b_x}, {b_y})")]
    BinaryOnly { b_x: usize, b_y: usize },
}

pub type Result<T> = std::result::Result<T, IacmError>;

pub(crate) fn contract(msg: impl Into<String>) -> IacmError {
    IacmError::ContractViolation(msg.into())
}
