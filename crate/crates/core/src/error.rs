// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("node id {id} out of range for a graph with {node_count} nodes")]
    NodeOutOfRange { id: usize, node_count: usize },

    #[error("self-loop on node {0}")]
    SelfLoop(usize),

    #[error("edge ({u}, {v}) has non-positive or non-finite weight {weight}")]
    InvalidWeight { u: usize, v: usize, weight: f64 },

    #[error("edge ({u}, {v}) listed with contradictory weights {first} and {second}")]
    ContradictoryWeight {
        u: usize,
        v: usize,
        first: f64,
        second: f64,
    },

    /// Conductance of the empty set, the full node set, or a set with zero volume.
    #[error("conductance is undefined for this set")]
    UndefinedSet,

    #[error("argument {value} outside the loss domain [-1, 1]")]
    LossDomain { value: f64 },

    #[error("argument {value} outside the range of the loss derivative")]
    DerivativeRange { value: f64 },

    #[error("solution value {value} at node {node} is outside [0, 1]")]
    SolutionRange { node: usize, value: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(&'static str),

    #[error("empty support: the solution has no positive entry")]
    EmptySupport,

    #[error("the solution support covers every node, so no proper cut exists")]
    FullSupport,

    #[error("graph with {node_count} nodes exceeds the dense oracle limit of {limit}")]
    TooLarge { node_count: usize, limit: usize },

    #[error("oracle did not converge after {sweeps} sweeps (violation {violation:e})")]
    NonConvergence { sweeps: usize, violation: f64 },

    /// The push bisection could not bracket the target residual. Monotonicity of the
    /// node residual in its own coordinate rules this out for valid inputs.
    #[error("push at node {node}: residual not bracketed on [0, {upper}]")]
    Bracket { node: usize, upper: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
