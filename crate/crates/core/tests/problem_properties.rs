// SPDX-License-Identifier: Apache-2.0

mod common;

use pcut_core::{SeededProblem, Solution};
use proptest::prelude::*;

fn point(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(prop_oneof![Just(0.0), 0.0..=1.0f64], n)
}

proptest! {
    #[test]
    fn residual_mass_is_terminal_flow(
        (g, seeds, x) in common::graph_and_seeds(20).prop_flat_map(|(g, s)| {
            let n = g.node_count();
            (Just(g), Just(s), point(n))
        }),
        loss in common::any_loss(),
        gamma in 0.01..5.0f64,
    ) {
        let p = SeededProblem::new(&g, seeds, gamma, 0.01, loss).unwrap();
        let x = Solution::from_dense(&x);
        let total: f64 = p.residual(&x).unwrap().iter().map(|(_, v)| v).sum();
        let mut expect = 0.0;
        let mut scale: f64 = 1.0;
        for i in 0..g.node_count() {
            let t = if p.is_seed(i) { 1.0 } else { 0.0 };
            let term = g.degree(i) * loss.deriv_unchecked(x.get(i) - t);
            expect -= term;
            scale = scale.max(term.abs());
        }
        for (i, xi) in x.iter() {
            for (j, w) in g.neighbors(i) {
                scale = scale.max(w * loss.deriv_unchecked(xi - x.get(j)).abs() / gamma);
            }
        }
        prop_assert!((total - expect).abs() <= 1e-12 * scale * g.node_count() as f64, "{total} vs {expect}");
    }

    #[test]
    fn residual_at_zero_is_seed_degrees((g, seeds) in common::graph_and_seeds(20), loss in common::any_loss()) {
        let p = SeededProblem::new(&g, seeds.clone(), 0.1, 0.01, loss).unwrap();
        let r = p.residual(&Solution::new()).unwrap();
        prop_assert_eq!(r.nnz(), seeds.len());
        let mass: f64 = r.iter().map(|(_, v)| v).sum();
        prop_assert!((mass - p.seed_volume() * loss.deriv_unchecked(1.0)).abs() <= 1e-12 * mass);
    }

    #[test]
    fn objective_linear_in_kappa(
        (g, seeds, x) in common::graph_and_seeds(20).prop_flat_map(|(g, s)| {
            let n = g.node_count();
            (Just(g), Just(s), point(n))
        }),
        loss in common::any_loss(),
        k1 in 0.0..0.5f64,
        k2 in 0.0..0.5f64,
    ) {
        let gamma = 0.3;
        let x = Solution::from_dense(&x);
        let f1 = SeededProblem::new(&g, seeds.clone(), gamma, k1, loss).unwrap().objective(&x).unwrap();
        let f2 = SeededProblem::new(&g, seeds, gamma, k2, loss).unwrap().objective(&x).unwrap();
        let dx: f64 = x.iter().map(|(i, v)| g.degree(i) * v).sum();
        let expect = (k2 - k1) * gamma * dx;
        prop_assert!((f2 - f1 - expect).abs() <= 1e-12 * (f1.abs() + f2.abs() + 1.0));
    }
}
