// SPDX-License-Identifier: Apache-2.0

mod common;

use pcut_core::gen::{grid, GridSpec};
use pcut_core::{recall_at_k, sweep_cut, Graph, GraphBuilder, NodeSet, Solution, SweepMode};
use proptest::prelude::*;

/// Connected graph with integer weights, so that every partial sum is exact.
fn integer_graph() -> impl Strategy<Value = Graph> {
    common::connected_graph(40).prop_map(|g| {
        let mut b = GraphBuilder::new(g.node_count());
        for (u, v, w) in g.edges() {
            b.add_edge(u, v, w.floor()).unwrap();
        }
        b.build()
    })
}

fn with_scores(g: Graph) -> impl Strategy<Value = (Graph, Solution)> {
    let n = g.node_count();
    let scores = proptest::collection::vec(prop_oneof![Just(0.0), (1..=8u32).prop_map(|k| k as f64 / 8.0)], n);
    (Just(g), scores.prop_map(|s| Solution::from_dense(&s)))
}

proptest! {
    #[test]
    fn incremental_profile_equals_recomputation(
        (g, x) in integer_graph().prop_flat_map(with_scores),
        degree in any::<bool>(),
    ) {
        prop_assume!(x.nnz() > 0 && x.nnz() < g.node_count());
        let mode = if degree { SweepMode::DegreeNormalized } else { SweepMode::Plain };
        let s = sweep_cut(&g, &x, mode).unwrap();
        for j in 0..s.order.len() {
            let set = NodeSet::new(s.order[..=j].to_vec());
            let vol = g.volume(&set).unwrap();
            let denom = vol.min(g.total_volume() - vol);
            let naive = if denom > 0.0 { g.cut(&set).unwrap() / denom } else { f64::INFINITY };
            prop_assert_eq!(naive.to_bits(), s.conductances[j].to_bits());
        }
        let best = s.conductances.iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert_eq!(best, s.best_conductance);
        prop_assert_eq!(s.best_set.len(), s.best_prefix);
    }

    #[test]
    fn modes_agree_on_regular_graphs(
        (rows, cols) in (3..12usize, 3..12usize),
        scores in proptest::collection::vec(prop_oneof![Just(0.0), 0.0..1.0f64], 144),
    ) {
        // Grids are not regular, so a cycle of the same size is used.
        let n = rows * cols;
        let g = Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n, 1.0))).unwrap();
        let x = Solution::from_dense(&scores[..n]);
        prop_assume!(x.nnz() > 0 && x.nnz() < n);
        let a = sweep_cut(&g, &x, SweepMode::Plain).unwrap();
        let b = sweep_cut(&g, &x, SweepMode::DegreeNormalized).unwrap();
        prop_assert_eq!(a.order, b.order);
        prop_assert_eq!(a.best_set, b.best_set);
    }

    #[test]
    fn recall_grows_with_k(
        (g, x) in integer_graph().prop_flat_map(with_scores),
        target in proptest::collection::btree_set(0..3usize, 1..3),
    ) {
        let target = NodeSet::new(target.into_iter().collect());
        let ks: Vec<usize> = (0..=g.node_count() + 2).collect();
        let r = recall_at_k(&g, &x, &target, &ks, SweepMode::Plain);
        prop_assert!(r.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(r.iter().all(|v| (0.0..=1.0).contains(v)));
    }
}

#[test]
fn grid_sweep_profile_has_one_entry_per_support_node() {
    let spec = GridSpec { rows: 6, cols: 6 };
    let g = grid(spec).unwrap();
    let x = Solution::from_pairs([(14, 0.9), (15, 0.8), (20, 0.7), (21, 0.6)]);
    let s = sweep_cut(&g, &x, SweepMode::Plain).unwrap();
    assert_eq!(s.order, vec![14, 15, 20, 21]);
    assert_eq!(s.conductances.len(), 4);
    // The 2x2 block has 8 cut edges and volume 16.
    assert_eq!(s.conductances[3], 0.5);
}
