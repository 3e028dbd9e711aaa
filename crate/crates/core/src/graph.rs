// SPDX-License-Identifier: Apache-2.0

//! Weighted undirected graphs in compressed sorted-neighbor form.

use alloc::collections::btree_map::{BTreeMap, Entry};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Immutable weighted undirected graph.
///
/// Each undirected edge is stored twice, once in each endpoint's neighbor
/// list. Neighbor lists are sorted by id, so scans over a node are `O(d_i)`
/// and membership lookups are a binary search.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
    degrees: Vec<f64>,
    total_volume: f64,
    min_weight: f64,
}

impl Graph {
    /// Builds a graph from an edge iterator. Reciprocal and repeated entries with
    /// the same weight collapse into one edge.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut builder = GraphBuilder::new(node_count);
        for (u, v, w) in edges {
            builder.add_edge(u, v, w)?;
        }
        Ok(builder.build())
    }

    pub fn node_count(&self) -> usize {
        self.degrees.len()
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn degree(&self, node: usize) -> f64 {
        self.degrees[node]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// Number of neighbors of `node`.
    pub fn neighbor_count(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    /// Sorted neighbor ids of `node`, parallel to [`Graph::neighbor_weights`].
    pub fn neighbor_ids(&self, node: usize) -> &[usize] {
        &self.targets[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn neighbor_weights(&self, node: usize) -> &[f64] {
        &self.weights[self.offsets[node]..self.offsets[node + 1]]
    }

    /// Iterates `(neighbor, weight)` pairs of `node` in ascending neighbor order.
    pub fn neighbors(&self, node: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.neighbor_ids(node)
            .iter()
            .copied()
            .zip(self.neighbor_weights(node).iter().copied())
    }

    /// Weight of edge `(u, v)`, if present.
    pub fn edge_weight(&self, u: usize, v: usize) -> Option<f64> {
        let ids = self.neighbor_ids(u);
        ids.binary_search(&v)
            .ok()
            .map(|k| self.neighbor_weights(u)[k])
    }

    /// Iterates every undirected edge once as `(u, v, w)` with `u < v`,
    /// in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.neighbors(u)
                .filter(move |&(v, _)| u < v)
                .map(move |(v, w)| (u, v, w))
        })
    }

    /// `vol(V)`, twice the total edge weight.
    pub fn total_volume(&self) -> f64 {
        self.total_volume
    }

    /// Smallest edge weight, or `+inf` for an edgeless graph.
    pub fn min_weight(&self) -> f64 {
        self.min_weight
    }

    /// True when some edge weight lies in `(0, 1)`. The push runtime bound
    /// assumes every weight is at least one.
    pub fn has_light_edges(&self) -> bool {
        self.min_weight < 1.0
    }

    /// Connected component label of every node, numbered in order of the
    /// smallest node id in each component.
    pub fn components(&self) -> Vec<usize> {
        let n = self.node_count();
        let mut label = vec![usize::MAX; n];
        let mut stack = Vec::new();
        let mut next = 0;
        for root in 0..n {
            if label[root] != usize::MAX {
                continue;
            }
            label[root] = next;
            stack.push(root);
            while let Some(u) = stack.pop() {
                for &v in self.neighbor_ids(u) {
                    if label[v] == usize::MAX {
                        label[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn component_count(&self) -> usize {
        self.components().iter().copied().max().map_or(0, |m| m + 1)
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }

    fn check(&self, set: &NodeSet) -> Result<()> {
        match set.as_slice().last() {
            Some(&id) if id >= self.node_count() => Err(Error::NodeOutOfRange {
                id,
                node_count: self.node_count(),
            }),
            _ => Ok(()),
        }
    }

    /// Sum of degrees over `set`.
    pub fn volume(&self, set: &NodeSet) -> Result<f64> {
        self.check(set)?;
        Ok(set.iter().map(|i| self.degrees[i]).sum())
    }

    /// Total weight of edges with exactly one endpoint in `set`.
    pub fn cut(&self, set: &NodeSet) -> Result<f64> {
        self.check(set)?;
        let mut cut = 0.0;
        for i in set.iter() {
            for (j, w) in self.neighbors(i) {
                if !set.contains(j) {
                    cut += w;
                }
            }
        }
        Ok(cut)
    }

    /// `cut(S) / min(vol(S), vol(V \ S))`.
    pub fn conductance(&self, set: &NodeSet) -> Result<f64> {
        self.check(set)?;
        if set.is_empty() || set.len() == self.node_count() {
            return Err(Error::UndefinedSet);
        }
        let vol = self.volume(set)?;
        let denom = vol.min(self.total_volume - vol);
        if denom <= 0.0 {
            return Err(Error::UndefinedSet);
        }
        Ok(self.cut(set)? / denom)
    }
}

/// Incremental graph construction with duplicate canonicalization.
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    node_count: usize,
    edges: BTreeMap<(usize, usize), f64>,
}

impl GraphBuilder {
    pub fn new(node_count: usize) -> Self {
        Self {
            node_count,
            edges: BTreeMap::new(),
        }
    }

    /// Raises the node count so that `node_count` nodes exist.
    pub fn ensure_nodes(&mut self, node_count: usize) {
        self.node_count = self.node_count.max(node_count);
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Adds the undirected edge `{u, v}`. Returns `false` when the edge was
    /// already present with the same weight.
    pub fn add_edge(&mut self, u: usize, v: usize, weight: f64) -> Result<bool> {
        for id in [u, v] {
            if id >= self.node_count {
                return Err(Error::NodeOutOfRange {
                    id,
                    node_count: self.node_count,
                });
            }
        }
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(Error::InvalidWeight { u, v, weight });
        }
        let key = (u.min(v), u.max(v));
        match self.edges.entry(key) {
            Entry::Vacant(slot) => {
                slot.insert(weight);
                Ok(true)
            }
            Entry::Occupied(slot) if *slot.get() == weight => Ok(false),
            Entry::Occupied(slot) => Err(Error::ContradictoryWeight {
                u: key.0,
                v: key.1,
                first: *slot.get(),
                second: weight,
            }),
        }
    }

    pub fn build(self) -> Graph {
        let n = self.node_count;
        let mut counts = vec![0usize; n + 1];
        for &(u, v) in self.edges.keys() {
            counts[u + 1] += 1;
            counts[v + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let offsets = counts;
        let nnz = offsets[n];
        let mut fill = offsets.clone();
        let mut targets = vec![0usize; nnz];
        let mut weights = vec![0.0f64; nnz];
        // Keys iterate lexicographically with u < v. The first pass fills every row
        // with its smaller neighbors in ascending order, the second appends the
        // larger ones, so each row ends up sorted.
        for (&(u, v), &w) in self.edges.iter() {
            let k = fill[v];
            targets[k] = u;
            weights[k] = w;
            fill[v] += 1;
        }
        for (&(u, v), &w) in self.edges.iter() {
            let k = fill[u];
            targets[k] = v;
            weights[k] = w;
            fill[u] += 1;
        }
        let mut degrees = vec![0.0; n];
        let mut min_weight = f64::INFINITY;
        for i in 0..n {
            let mut d = 0.0;
            for &w in &weights[offsets[i]..offsets[i + 1]] {
                d += w;
                min_weight = min_weight.min(w);
            }
            degrees[i] = d;
        }
        let total_volume = degrees.iter().sum();
        Graph {
            offsets,
            targets,
            weights,
            degrees,
            total_volume,
            min_weight,
        }
    }
}

/// A sorted set of distinct node ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct NodeSet(Vec<usize>);

impl NodeSet {
    /// Sorts and deduplicates `ids`.
    pub fn new(mut ids: Vec<usize>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        Self(ids)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// All nodes `0..n`.
    pub fn full(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: usize) -> bool {
        self.0.binary_search(&id).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    /// Nodes of `0..n` not in the set.
    pub fn complement(&self, n: usize) -> Self {
        Self((0..n).filter(|&i| !self.contains(i)).collect())
    }

    pub fn intersection_len(&self, other: &NodeSet) -> usize {
        let (mut a, mut b) = (self.0.iter().peekable(), other.0.iter().peekable());
        let mut count = 0;
        while let (Some(&&x), Some(&&y)) = (a.peek(), b.peek()) {
            match x.cmp(&y) {
                core::cmp::Ordering::Less => {
                    a.next();
                }
                core::cmp::Ordering::Greater => {
                    b.next();
                }
                core::cmp::Ordering::Equal => {
                    count += 1;
                    a.next();
                    b.next();
                }
            }
        }
        count
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.intersection_len(other) == self.len()
    }
}

impl FromIterator<usize> for NodeSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

impl From<Vec<usize>> for NodeSet {
    fn from(ids: Vec<usize>) -> Self {
        Self::new(ids)
    }
}
