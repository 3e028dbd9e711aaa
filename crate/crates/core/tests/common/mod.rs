// SPDX-License-Identifier: Apache-2.0

//! Shared strategies for the integration tests.

#![allow(dead_code)]

use pcut_core::{Graph, GraphBuilder, Loss, NodeSet};
use proptest::prelude::*;

/// Connected graph on `3..=max_n` nodes: a random spanning path plus extra
/// random edges, weights in `[1, 4)`.
pub fn connected_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (3..=max_n).prop_flat_map(|n| {
        let path_w = proptest::collection::vec(1.0..4.0f64, n - 1);
        let extra = proptest::collection::vec((0..n, 0..n, 1.0..4.0f64), 0..3 * n);
        let order = Just((0..n).collect::<Vec<_>>()).prop_shuffle();
        (Just(n), order, path_w, extra).prop_map(|(n, order, path_w, extra)| {
            let mut b = GraphBuilder::new(n);
            for (k, w) in path_w.into_iter().enumerate() {
                b.add_edge(order[k], order[k + 1], w).unwrap();
            }
            for (u, v, w) in extra {
                if u != v {
                    // A repeated pair keeps its first weight.
                    let _ = b.add_edge(u, v, w);
                }
            }
            b.build()
        })
    })
}

/// Graph together with a nonempty seed set of at most three nodes.
pub fn graph_and_seeds(max_n: usize) -> impl Strategy<Value = (Graph, NodeSet)> {
    connected_graph(max_n).prop_flat_map(|g| {
        let n = g.node_count();
        let seeds = proptest::collection::btree_set(0..n, 1..=3.min(n - 1));
        (Just(g), seeds.prop_map(|s| NodeSet::new(s.into_iter().collect())))
    })
}

/// Every shipped loss family in its first regime, plus q-norms above two.
pub fn any_loss() -> impl Strategy<Value = Loss> {
    prop_oneof![
        (1.1..2.0f64).prop_map(|q| Loss::q_norm(q).unwrap()),
        (2.0..4.5f64).prop_map(|q| Loss::q_norm(q).unwrap()),
        (1.1..1.95f64, 1e-4..0.5f64).prop_map(|(q, d)| Loss::q_huber(q, d).unwrap()),
        (1.1..1.95f64, 1e-4..0.5f64).prop_map(|(q, d)| Loss::berq(q, d).unwrap()),
    ]
}

/// Losses in the first regime only.
pub fn regime_a_loss() -> impl Strategy<Value = Loss> {
    prop_oneof![
        (1.1..1.95f64).prop_map(|q| Loss::q_norm(q).unwrap()),
        (1.1..1.95f64, 1e-4..0.5f64).prop_map(|(q, d)| Loss::q_huber(q, d).unwrap()),
        (1.1..1.95f64, 1e-4..0.5f64).prop_map(|(q, d)| Loss::berq(q, d).unwrap()),
    ]
}
