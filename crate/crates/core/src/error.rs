use thiserror::Error;

use crate::group::{Group, IrrepLabel};

/// Errors raised by the estimation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("irrep set is empty: {0}")]
    EmptySet(String),

    #[error("label {label} is not an irrep of {group}")]
    LabelOutsideGroup { label: IrrepLabel, group: Group },

    #[error("group mismatch: expected {expected}, found {found}")]
    GroupMismatch { expected: Group, found: Group },

    #[error("coefficient vector is defined over a different irrep set")]
    SetMismatch,

    #[error("invalid coefficient vector: {0}")]
    InvalidCoefficients(String),

    /// The cost violates the Holevo sign rule or the conjugate-pairing rule.
    #[error("cost is not in the generalized Holevo class; offending labels: {labels:?}")]
    NotHolevo { labels: Vec<IrrepLabel> },

    /// `-C` is reducible, so the minimum eigenvector may mix signs.
    #[error(
        "reducible cost matrix: minimum eigenvector has mixed signs; \
         split the irrep set into components connected by the cost's Clebsch-Gordan support"
    )]
    ReducibleCostMatrix,

    #[error("quadrature did not converge: |I(n) - I(2n)| = {difference:e} with n = {nodes}")]
    QuadratureNotConverged { nodes: usize, difference: f64 },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid cost specification: {0}")]
    InvalidCostSpec(String),
}

impl Error {
    /// True for errors caused by numerics rather than by bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ReducibleCostMatrix
                | Error::QuadratureNotConverged { .. }
                | Error::NonFinite(_)
                | Error::Numerical(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
