// SPDX-License-Identifier: Apache-2.0

//! The seeded localized-cut objective.
//!
//! The localized cut graph adds a source wired to every seed `i` with weight
//! `γ d_i` and a sink wired to every non-seed with weight `γ d_i`. It is never
//! built: the source and sink edges are expanded per node using the seed set and
//! the degree vector, with `x_s = 1` and `x_t = 0` fixed.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSet};
use crate::loss::Loss;
use crate::sparse::{Solution, SparseVector};

#[derive(Debug, Clone)]
pub struct SeededProblem<'g> {
    graph: &'g Graph,
    seeds: NodeSet,
    gamma: f64,
    kappa: f64,
    loss: Loss,
}

impl<'g> SeededProblem<'g> {
    /// `kappa = 0` is accepted here; the push solver rejects it separately.
    pub fn new(graph: &'g Graph, seeds: NodeSet, gamma: f64, kappa: f64, loss: Loss) -> Result<Self> {
        if seeds.is_empty() {
            return Err(Error::Parameter("seed set must be nonempty"));
        }
        if let Some(&id) = seeds.as_slice().last() {
            if id >= graph.node_count() {
                return Err(Error::NodeOutOfRange {
                    id,
                    node_count: graph.node_count(),
                });
            }
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::Parameter("gamma must be positive and finite"));
        }
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(Error::Parameter("kappa must be nonnegative and finite"));
        }
        Ok(Self {
            graph,
            seeds,
            gamma,
            kappa,
            loss,
        })
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn seeds(&self) -> &NodeSet {
        &self.seeds
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn loss(&self) -> &Loss {
        &self.loss
    }

    /// The same problem with a different seed set.
    pub fn with_seeds(&self, seeds: NodeSet) -> Result<Self> {
        Self::new(self.graph, seeds, self.gamma, self.kappa, self.loss)
    }

    pub fn is_seed(&self, node: usize) -> bool {
        self.seeds.contains(node)
    }

    /// `vol(S)`.
    pub fn seed_volume(&self) -> f64 {
        self.seeds.iter().map(|i| self.graph.degree(i)).sum()
    }

    fn check_solution(&self, x: &Solution) -> Result<()> {
        for (i, v) in x.iter() {
            if i >= self.graph.node_count() {
                return Err(Error::NodeOutOfRange {
                    id: i,
                    node_count: self.graph.node_count(),
                });
            }
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::SolutionRange { node: i, value: v });
            }
        }
        Ok(())
    }

    /// `Σ_{(i,j)∈E} w_ij ℓ(x_i − x_j) + γ Σ_{i∈S} d_i ℓ(x_i − 1)
    ///  + γ Σ_{i∉S} d_i ℓ(x_i) + κγ Σ_i d_i x_i`.
    pub fn objective(&self, x: &Solution) -> Result<f64> {
        self.check_solution(x)?;
        let g = self.graph;
        let loss = &self.loss;
        let mut edges = 0.0;
        // Edges with both endpoints outside the support contribute ℓ(0) = 0.
        for (i, xi) in x.iter() {
            for (j, w) in g.neighbors(i) {
                let xj = x.get(j);
                if xj == 0.0 || i < j {
                    edges += w * loss.value_unchecked(xi - xj);
                }
            }
        }
        let mut terminals = 0.0;
        let mut sparsity = 0.0;
        for i in self.seeds.iter() {
            terminals += g.degree(i) * loss.value_unchecked(x.get(i) - 1.0);
        }
        for (i, xi) in x.iter() {
            if !self.is_seed(i) {
                terminals += g.degree(i) * loss.value_unchecked(xi);
            }
            sparsity += g.degree(i) * xi;
        }
        Ok(edges + self.gamma * terminals + self.kappa * self.gamma * sparsity)
    }

    /// Residual of node `i` if its value were `xi`, all other values taken
    /// from `value`:
    /// `g_i = −(1/γ) Σ_{j∼i} w_ij ℓ′(x_i − x_j) − d_i ℓ′(x_i − [i∈S])`.
    pub fn node_residual<F: Fn(usize) -> f64>(&self, i: usize, xi: f64, value: F) -> f64 {
        let mut flow = 0.0;
        for (j, w) in self.graph.neighbors(i) {
            flow += w * self.loss.deriv_unchecked(xi - value(j));
        }
        let target = if self.is_seed(i) { 1.0 } else { 0.0 };
        -flow / self.gamma - self.graph.degree(i) * self.loss.deriv_unchecked(xi - target)
    }

    /// Nodes whose residual can be nonzero for `x`: seeds, the support, and
    /// neighbors of the support, ascending.
    fn residual_nodes(&self, x: &Solution) -> Vec<usize> {
        let mut nodes: BTreeSet<usize> = self.seeds.iter().collect();
        for (i, _) in x.iter() {
            nodes.insert(i);
            nodes.extend(self.graph.neighbor_ids(i).iter().copied());
        }
        nodes.into_iter().collect()
    }

    /// Full recomputation of the residual over the original nodes. Entries
    /// that are exactly zero are omitted.
    pub fn residual(&self, x: &Solution) -> Result<SparseVector> {
        self.check_solution(x)?;
        Ok(self
            .residual_nodes(x)
            .into_iter()
            .map(|i| (i, self.node_residual(i, x.get(i), |j| x.get(j))))
            .collect())
    }

    /// `max(0, max_i (g_i − κ d_i) / d_i)`; zero means no node violates
    /// `g_i ≤ κ d_i`.
    pub fn kkt_violation(&self, x: &Solution) -> Result<f64> {
        let g = self.residual(x)?;
        Ok(self.violation_of(&g))
    }

    pub(crate) fn violation_of(&self, residual: &SparseVector) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, gi) in residual.iter() {
            let d = self.graph.degree(i);
            if d > 0.0 {
                worst = worst.max((gi - self.kappa * d) / d);
            }
        }
        worst
    }
}
