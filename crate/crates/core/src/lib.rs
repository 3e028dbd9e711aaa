// SPDX-License-Identifier: Apache-2.0

//! Strongly-local solvers for the p-norm localized cut problem.
//!
//! The crate is `no_std` and only needs `alloc`. It contains:
//!
//! - [`graph`]: an immutable weighted undirected graph in compressed form,
//!   plus volume, cut and conductance of node sets.
//! - [`loss`]: the q-norm, q-Huber and Berq edge losses.
//! - [`problem`]: the seeded objective and its residual (scaled negative
//!   gradient) for any candidate solution.
//! - [`solver`]: the nonlinear push solver with per-node bisection.
//! - [`oracle`]: a dense cyclic coordinate minimizer used as a reference.
//! - [`sweep`]: sweep cuts and recovery metrics.
//! - [`gen`]: deterministic grid and planted-partition generators.
//!
//! File formats, timing, and the command line live in the `pcut` crate.

#![no_std]

extern crate alloc;

pub mod error;
pub mod gen;
pub mod graph;
pub mod loss;
pub mod oracle;
pub mod problem;
pub mod solver;
pub mod sparse;
pub mod sweep;

mod table;

pub use error::{Error, Result};
pub use graph::{Graph, GraphBuilder, NodeSet};
pub use loss::{Loss, LossKind, Regime};
pub use oracle::{oracle_compare, oracle_solve, oracle_solve_from, OracleParams, OracleReport};
pub use problem::SeededProblem;
pub use solver::{solve, work_bound, PushRecord, SolveReport, Solver, SolverParams, Workspace};
pub use sparse::{Solution, SparseVector};
pub use sweep::{recall_at_k, recovery, sweep_cut, RecoveryScore, SweepMode, SweepResult};
