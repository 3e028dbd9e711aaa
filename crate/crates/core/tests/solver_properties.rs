// SPDX-License-Identifier: Apache-2.0

mod common;

use pcut_core::gen::{grid, grid_center, grid_is_boundary, GridSpec};
use pcut_core::{solve, Loss, NodeSet, Regime, SeededProblem, Solver, SolverParams};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = (f64, f64, f64, bool)> {
    (0.05..2.0f64, 0.005..0.3f64, 0.1..0.95f64, any::<bool>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_push_keeps_the_invariants(
        (g, seeds) in common::graph_and_seeds(16),
        loss in common::any_loss(),
        (gamma, kappa, rho, heuristic) in params(),
    ) {
        let p = SeededProblem::new(&g, seeds, gamma, kappa, loss).unwrap();
        let sp = SolverParams { rho, eps: 1e-10, max_pushes: 2000, bracket_heuristic: heuristic };
        let mut s = Solver::new(&p, sp).unwrap();
        let l1_start = p.seed_volume() * loss.deriv_unchecked(1.0);
        prop_assert!((s.g_l1() - l1_start).abs() <= 1e-12 * l1_start);
        let n = g.node_count();
        let mut before: Vec<f64> = (0..n).map(|i| s.x_value(i)).collect();
        let mut l1 = s.g_l1();
        let mut steps = 0;
        while let Some(rec) = s.step().unwrap() {
            steps += 1;
            prop_assert!(rec.delta > 0.0);
            prop_assert!(rec.g_l1_decrease > 0.0, "no decrease at push {steps}");
            prop_assert!(s.g_l1() < l1);
            l1 = s.g_l1();
            for i in 0..n {
                let xi = s.x_value(i);
                prop_assert!((0.0..=1.0).contains(&xi));
                prop_assert!(xi >= before[i]);
                prop_assert!(i == rec.node || xi == before[i]);
                prop_assert!(s.residual_value(i) >= -1e-12);
                before[i] = xi;
            }
            let full = p.residual(&s.solution()).unwrap();
            prop_assert!(full.max_abs_diff(&s.residual()) <= 1e-9);
            if steps == 2000 {
                break;
            }
        }
        let report = s.report();
        if let Some(b) = report.work_bound {
            prop_assert!(report.work <= b);
        }
    }

    #[test]
    fn converged_runs_certify_kkt_and_slackness(
        (g, seeds) in common::graph_and_seeds(16),
        loss in common::regime_a_loss(),
        (gamma, kappa, rho, heuristic) in params(),
    ) {
        let p = SeededProblem::new(&g, seeds, gamma, kappa, loss).unwrap();
        let sp = SolverParams { rho, eps: 1e-10, max_pushes: 200_000, bracket_heuristic: heuristic };
        let r = solve(&p, sp).unwrap();
        prop_assume!(r.converged);
        for (i, gi) in r.residual.iter() {
            prop_assert!(gi <= kappa * g.degree(i));
        }
        prop_assert_eq!(loss.regime(), Regime::A);
        let slack: f64 = r.x.iter().map(|(i, xi)| xi * (kappa * g.degree(i) - r.residual.get(i))).sum();
        let bound = kappa * loss.k() * loss.deriv_unchecked(1.0) * (1.0 - rho) * p.seed_volume() / loss.c();
        prop_assert!(slack <= bound, "{slack} > {bound}");
    }

    #[test]
    fn identical_inputs_give_identical_reports(
        (g, seeds) in common::graph_and_seeds(16),
        loss in common::any_loss(),
        (gamma, kappa, rho, heuristic) in params(),
    ) {
        let p = SeededProblem::new(&g, seeds, gamma, kappa, loss).unwrap();
        let sp = SolverParams { rho, eps: 1e-10, max_pushes: 5000, bracket_heuristic: heuristic };
        prop_assert_eq!(solve(&p, sp).unwrap(), solve(&p, sp).unwrap());
    }
}

#[test]
fn first_push_approaches_limit_as_rho_nears_one() {
    let g = pcut_core::Graph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
    let (gamma, kappa) = (0.1, 0.01);
    let p = SeededProblem::new(&g, NodeSet::new(vec![0]), gamma, kappa, Loss::q_norm(2.0).unwrap()).unwrap();
    let sp = SolverParams { rho: 0.999999, eps: 1e-14, ..Default::default() };
    let rec = Solver::new(&p, sp).unwrap().step().unwrap().unwrap();
    let limit = gamma * (1.0 - kappa) / (1.0 + gamma);
    assert!((rec.delta - limit).abs() < 1e-8, "{} vs {limit}", rec.delta);
}

#[test]
fn grid_diffusion_stays_off_the_boundary() {
    let spec = GridSpec { rows: 50, cols: 50 };
    let g = grid(spec).unwrap();
    let p = SeededProblem::new(&g, NodeSet::new(vec![grid_center(spec)]), 0.1, 0.005, Loss::q_norm(1.25).unwrap()).unwrap();
    let r = solve(&p, SolverParams::default()).unwrap();
    assert!(r.converged);
    assert!(r.x.nnz() > 1);
    assert!(r.x.support().all(|i| !grid_is_boundary(spec, i)));
}
