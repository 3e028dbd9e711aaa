// SPDX-License-Identifier: Apache-2.0

//! Sweep cuts and recovery scores.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSet};
use crate::sparse::Solution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SweepMode {
    /// Rank by `x_i`.
    #[default]
    Plain,
    /// Rank by `x_i / d_i`.
    DegreeNormalized,
}

impl SweepMode {
    pub fn name(self) -> &'static str {
        match self {
            SweepMode::Plain => "plain",
            SweepMode::DegreeNormalized => "degree",
        }
    }
}

impl core::str::FromStr for SweepMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(SweepMode::Plain),
            "degree" | "degree-normalized" | "degree_normalized" => Ok(SweepMode::DegreeNormalized),
            _ => Err(Error::Parameter("unknown sweep mode")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Support nodes, best score first.
    pub order: Vec<usize>,
    /// `conductances[j]` is the conductance of `order[..=j]`; infinite where the
    /// smaller side has zero volume.
    pub conductances: Vec<f64>,
    /// Length of the best prefix.
    pub best_prefix: usize,
    pub best_set: NodeSet,
    pub best_conductance: f64,
}

/// Positive-score nodes ordered by descending score, ties by ascending id.
pub fn ranking(graph: &Graph, x: &Solution, mode: SweepMode) -> Vec<usize> {
    let mut scored: Vec<(usize, f64)> = x
        .iter()
        .filter(|&(_, v)| v > 0.0)
        .map(|(i, v)| match mode {
            SweepMode::Plain => (i, v),
            SweepMode::DegreeNormalized => {
                let d = graph.degree(i);
                (i, if d > 0.0 { v / d } else { f64::INFINITY })
            }
        })
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scored.into_iter().map(|(i, _)| i).collect()
}

/// Evaluates the conductance of every prefix of the ranking and returns the best.
///
/// Each prefix costs the degree of the node added, so the sweep runs in
/// `O(vol(support) log |support|)`.
pub fn sweep_cut(graph: &Graph, x: &Solution, mode: SweepMode) -> Result<SweepResult> {
    if let Some(id) = x.max_id() {
        if id >= graph.node_count() {
            return Err(Error::NodeOutOfRange {
                id,
                node_count: graph.node_count(),
            });
        }
    }
    let order = ranking(graph, x, mode);
    if order.is_empty() {
        return Err(Error::EmptySupport);
    }
    if order.len() == graph.node_count() {
        return Err(Error::FullSupport);
    }
    let rank: BTreeMap<usize, usize> = order.iter().enumerate().map(|(r, &i)| (i, r)).collect();
    let total = graph.total_volume();
    let mut vol = 0.0;
    let mut cut = 0.0;
    let mut conductances = Vec::with_capacity(order.len());
    let mut best = (0, f64::INFINITY);
    for (pos, &i) in order.iter().enumerate() {
        // Edges into the current prefix stop being cut; the rest start.
        let mut inside = 0.0;
        for (j, w) in graph.neighbors(i) {
            if rank.get(&j).is_some_and(|&r| r < pos) {
                inside += w;
            }
        }
        vol += graph.degree(i);
        cut += graph.degree(i) - 2.0 * inside;
        let denom = vol.min(total - vol);
        let phi = if denom > 0.0 { cut / denom } else { f64::INFINITY };
        conductances.push(phi);
        if phi < best.1 {
            best = (pos + 1, phi);
        }
    }
    if best.0 == 0 {
        return Err(Error::UndefinedSet);
    }
    Ok(SweepResult {
        best_set: NodeSet::new(order[..best.0].to_vec()),
        order,
        conductances,
        best_prefix: best.0,
        best_conductance: best.1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Precision, recall and F1 of `found` against `target`.
pub fn recovery(target: &NodeSet, found: &NodeSet) -> RecoveryScore {
    let hit = target.intersection_len(found) as f64;
    let precision = if found.is_empty() { 0.0 } else { hit / found.len() as f64 };
    let recall = if target.is_empty() { 0.0 } else { hit / target.len() as f64 };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    RecoveryScore { precision, recall, f1 }
}

/// Recall of the top-`k` ranked nodes for each `k` in `ks`.
///
/// Only positive entries are ranked, so recall saturates once `k` passes the
/// support size.
pub fn recall_at_k(graph: &Graph, x: &Solution, target: &NodeSet, ks: &[usize], mode: SweepMode) -> Vec<f64> {
    let order = ranking(graph, x, mode);
    let mut hits_prefix = Vec::with_capacity(order.len() + 1);
    hits_prefix.push(0usize);
    for &i in &order {
        let last = *hits_prefix.last().unwrap();
        hits_prefix.push(last + usize::from(target.contains(i)));
    }
    ks.iter()
        .map(|&k| {
            if target.is_empty() {
                0.0
            } else {
                hits_prefix[k.min(order.len())] as f64 / target.len() as f64
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn barbell() -> Graph {
        Graph::from_edges(
            6,
            [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0), (2, 3, 1.0)],
        )
        .unwrap()
    }

    #[test]
    fn barbell_sweep_finds_triangle() {
        let g = barbell();
        let x = Solution::from_pairs([(0, 0.9), (1, 0.7), (2, 0.5)]);
        let r = sweep_cut(&g, &x, SweepMode::Plain).unwrap();
        assert_eq!(r.order, vec![0, 1, 2]);
        assert_eq!(r.best_set.as_slice(), &[0, 1, 2]);
        assert!((r.best_conductance - 1.0 / 7.0).abs() < 1e-15);
        assert_eq!(r.best_prefix, 3);
    }

    #[test]
    fn uniform_scores_tie_break_by_id() {
        let g = barbell();
        let x = Solution::from_pairs([(5, 0.3), (3, 0.3), (4, 0.3)]);
        let r = sweep_cut(&g, &x, SweepMode::Plain).unwrap();
        assert_eq!(r.order, vec![3, 4, 5]);
        let a = NodeSet::new(vec![3, 4, 5]);
        assert!(r.best_conductance <= g.conductance(&a).unwrap());
    }

    #[test]
    fn sweep_errors() {
        let g = barbell();
        assert_eq!(sweep_cut(&g, &Solution::new(), SweepMode::Plain), Err(Error::EmptySupport));
        let all = Solution::from_dense(&[0.1; 6]);
        assert_eq!(sweep_cut(&g, &all, SweepMode::Plain), Err(Error::FullSupport));
        let bad = Solution::from_pairs([(9, 0.5)]);
        assert!(matches!(sweep_cut(&g, &bad, SweepMode::Plain), Err(Error::NodeOutOfRange { .. })));
    }

    #[test]
    fn degree_mode_reorders() {
        let g = Graph::from_edges(4, [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]).unwrap();
        let x = Solution::from_pairs([(0, 0.6), (1, 0.3)]);
        assert_eq!(ranking(&g, &x, SweepMode::Plain), vec![0, 1]);
        assert_eq!(ranking(&g, &x, SweepMode::DegreeNormalized), vec![1, 0]);
    }

    #[test]
    fn recovery_examples() {
        let t = NodeSet::new((0..10).collect());
        assert_eq!(recovery(&t, &t), RecoveryScore { precision: 1.0, recall: 1.0, f1: 1.0 });
        let f = NodeSet::new((2..12).collect());
        let s = recovery(&t, &f);
        assert!((s.precision - 0.8).abs() < 1e-15 && (s.recall - 0.8).abs() < 1e-15 && (s.f1 - 0.8).abs() < 1e-15);
        assert_eq!(recovery(&t, &NodeSet::empty()), RecoveryScore { precision: 0.0, recall: 0.0, f1: 0.0 });
    }

    #[test]
    fn recall_at_k_examples() {
        let g = barbell();
        let x = Solution::from_pairs([(0, 0.9), (1, 0.8), (2, 0.7), (3, 0.1)]);
        let t = NodeSet::new(vec![0, 1, 2]);
        let r = recall_at_k(&g, &x, &t, &[0, 1, 3, 10], SweepMode::Plain);
        assert_eq!(r, vec![0.0, 1.0 / 3.0, 1.0, 1.0]);
        let t2 = NodeSet::new(vec![2, 4]);
        let r = recall_at_k(&g, &x, &t2, &[100], SweepMode::Plain);
        assert_eq!(r, vec![0.5]);
    }
}
