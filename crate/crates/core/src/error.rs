use thiserror::Error;

/// Crate-wide error type. Variant names follow the failure they report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid has no interior points (h too coarse for the domain)")]
    EmptyGrid,

    #[error("invalid polygon: {0}")]
    BadPolygon(String),

    #[error("pole ({x}, {y}) lies outside the domain or too far from any plaquette")]
    PoleOutsideDomain { x: f64, y: f64 },

    #[error("invalid pole configuration: {0}")]
    InvalidPoles(String),

    #[error("cut set inconsistent with pole configuration: {0}")]
    InconsistentCuts(String),

    #[error("operators have different sparsity structure")]
    DifferentStructure,

    #[error(
        "eigensolver did not converge: {iterations} iterations, best residual {best_residual:e}"
    )]
    NoConvergence {
        iterations: usize,
        best_residual: f64,
    },

    #[error("requested {m} eigenpairs from an operator of dimension {n}")]
    DimensionTooSmall { m: usize, n: usize },

    #[error("factorization breakdown at shift {shift}: pivot {pivot:e} (shift is numerically an eigenvalue)")]
    FactorizationBreakdown { shift: f64, pivot: f64 },

    #[error("eigenvector is identically zero")]
    AllZero,

    #[error("partition domain {0} is empty")]
    EmptyDomain(usize),

    #[error("epsilon {eps} outside the open admissible interval (0, {end})")]
    EpsOutOfRange { eps: f64, end: f64 },

    #[error("inadmissible epsilon {0}: requires (j^2/4)(1 - eps) > 1")]
    InadmissibleEps(f64),

    #[error("tile side {side} exceeds the domain diameter {diameter}")]
    SideTooLarge { side: f64, diameter: f64 },

    #[error("pole count {l} invalid for k = {k}: need 0 <= l <= max(0, 2k - 4)")]
    InvalidPoleCount { l: usize, k: usize },

    #[error("search budget {0} exhausted without a successful evaluation")]
    BudgetExhausted(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
