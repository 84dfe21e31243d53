use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// `u = phi + 1` is not positive at a collocation node.
    #[error("profile loses positivity at node {node}: u = {u:e}")]
    NonPositive { node: usize, u: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("nodal count changed from {from} to {to}")]
    NodalChange { from: usize, to: usize },

    #[error("numerical failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
