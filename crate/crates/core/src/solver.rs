// SPDX-License-Identifier: Apache-2.0

//! Strongly-local nonlinear push solver.
//!
//! Starting from `x = 0`, the solver repeatedly takes a node whose residual
//! exceeds `κ d_i`, raises `x_i` until its residual drops to `ρ κ d_i` (found
//! by bisection, since the node residual is decreasing in its own value), and
//! patches the residuals of its neighbors. Only nodes reached by pushes are
//! ever touched, so the total work is bounded by a multiple of `vol(S)` that
//! does not depend on the graph size.

use alloc::collections::VecDeque;
use alloc::vec::Vec;
use core::time::Duration;

use crate::error::{Error, Result};
use crate::loss::Regime;
use crate::problem::SeededProblem;
use crate::sparse::{Solution, SparseVector};
use crate::table::NodeTable;

/// Graphs up to this many nodes get dense shadow arrays.
pub const DENSE_NODE_LIMIT: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverParams {
    /// Fraction of `κ d_i` a push leaves behind, in `(0, 1)`.
    pub rho: f64,
    /// Bisection bracket width at which a push stops refining.
    pub eps: f64,
    pub max_pushes: u64,
    /// Start each bisection from a geometric bracket around the previous step.
    pub bracket_heuristic: bool,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            rho: 0.5,
            eps: 1e-8,
            max_pushes: 10_000_000,
            bracket_heuristic: false,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::Parameter("rho must lie in (0, 1)"));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::Parameter("eps must be positive"));
        }
        Ok(())
    }
}

/// Result of a solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub x: Solution,
    /// Incrementally maintained residual at termination.
    pub residual: SparseVector,
    pub pushes: u64,
    /// `Σ d_i` over executed pushes.
    pub work: f64,
    /// A-priori bound on `work`, absent when some edge weight is below one.
    pub work_bound: Option<f64>,
    pub converged: bool,
    /// Filled in by callers that can read a clock.
    pub wallclock: Option<Duration>,
}

/// One executed push.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PushRecord {
    pub node: usize,
    pub delta: f64,
    pub degree: f64,
    /// Decrease of `‖g‖₁` caused by the push.
    pub g_l1_decrease: f64,
    /// Residual of the pushed node afterwards.
    pub residual_after: f64,
}

/// Reusable per-node storage for solver runs on graphs of one size.
#[derive(Debug, Clone)]
pub struct Workspace {
    node_count: usize,
    x: NodeTable<f64>,
    g: NodeTable<f64>,
    queued: NodeTable<bool>,
    last_delta: NodeTable<f64>,
}

impl Workspace {
    pub fn new(node_count: usize) -> Self {
        if node_count <= DENSE_NODE_LIMIT {
            Self::dense(node_count)
        } else {
            Self::sparse(node_count)
        }
    }

    pub fn dense(node_count: usize) -> Self {
        Self {
            node_count,
            x: NodeTable::dense(node_count),
            g: NodeTable::dense(node_count),
            queued: NodeTable::dense(node_count),
            last_delta: NodeTable::dense(node_count),
        }
    }

    pub fn sparse(node_count: usize) -> Self {
        Self {
            node_count,
            x: NodeTable::sparse(),
            g: NodeTable::sparse(),
            queued: NodeTable::sparse(),
            last_delta: NodeTable::sparse(),
        }
    }

    fn reset(&mut self) {
        self.x.clear();
        self.g.clear();
        self.queued.clear();
        self.last_delta.clear();
    }
}

/// A push solver in progress.
#[derive(Debug)]
pub struct Solver<'p, 'g> {
    problem: &'p SeededProblem<'g>,
    params: SolverParams,
    ws: Workspace,
    queue: VecDeque<usize>,
    x_nodes: Vec<usize>,
    g_nodes: Vec<usize>,
    work: f64,
    pushes: u64,
    g_l1: f64,
}

impl<'p, 'g> Solver<'p, 'g> {
    pub fn new(problem: &'p SeededProblem<'g>, params: SolverParams) -> Result<Self> {
        Self::with_workspace(problem, params, Workspace::new(problem.graph().node_count()))
    }

    /// Initializes `x = 0` and the residual, reusing `ws`.
    pub fn with_workspace(
        problem: &'p SeededProblem<'g>,
        params: SolverParams,
        mut ws: Workspace,
    ) -> Result<Self> {
        params.validate()?;
        if problem.kappa() <= 0.0 {
            return Err(Error::Parameter("the push solver requires kappa > 0"));
        }
        if ws.node_count != problem.graph().node_count() {
            ws = Workspace::new(problem.graph().node_count());
        } else {
            ws.reset();
        }
        let mut solver = Self {
            problem,
            params,
            ws,
            queue: VecDeque::new(),
            x_nodes: Vec::new(),
            g_nodes: Vec::new(),
            work: 0.0,
            pushes: 0,
            g_l1: 0.0,
        };
        let graph = problem.graph();
        let kappa = problem.kappa();
        for i in problem.seeds().iter() {
            let gi = problem.node_residual(i, 0.0, |_| 0.0);
            solver.ws.g.set(i, gi);
            solver.g_nodes.push(i);
            solver.g_l1 += gi;
            if gi > kappa * graph.degree(i) {
                solver.enqueue(i);
            }
        }
        Ok(solver)
    }

    fn enqueue(&mut self, i: usize) {
        if !self.ws.queued.get(i) {
            self.ws.queued.set(i, true);
            self.queue.push_back(i);
        }
    }

    pub fn problem(&self) -> &SeededProblem<'g> {
        self.problem
    }

    pub fn params(&self) -> &SolverParams {
        &self.params
    }

    pub fn x_value(&self, i: usize) -> f64 {
        self.ws.x.get(i)
    }

    pub fn residual_value(&self, i: usize) -> f64 {
        self.ws.g.get(i)
    }

    /// Running `‖g‖₁`, maintained from the per-push decrease.
    pub fn g_l1(&self) -> f64 {
        self.g_l1
    }

    pub fn work(&self) -> f64 {
        self.work
    }

    pub fn pushes(&self) -> u64 {
        self.pushes
    }

    pub fn queue_len(&self) -> usize {
        self.queue.len()
    }

    /// True when no node violates `g_i ≤ κ d_i`.
    pub fn is_done(&self) -> bool {
        self.queue.is_empty()
    }

    pub fn solution(&self) -> Solution {
        let mut nodes = self.x_nodes.clone();
        nodes.sort_unstable();
        nodes.into_iter().map(|i| (i, self.ws.x.get(i))).collect()
    }

    pub fn residual(&self) -> SparseVector {
        let mut nodes = self.g_nodes.clone();
        nodes.sort_unstable();
        nodes.into_iter().map(|i| (i, self.ws.g.get(i))).collect()
    }

    /// Pushes at the next queued violation. Returns `None` once the queue is empty.
    pub fn step(&mut self) -> Result<Option<PushRecord>> {
        let kappa = self.problem.kappa();
        while let Some(i) = self.queue.pop_front() {
            self.ws.queued.set(i, false);
            if self.ws.g.get(i) > kappa * self.problem.graph().degree(i) {
                return self.push(i).map(Some);
            }
        }
        Ok(None)
    }

    /// Runs to convergence or until `max_pushes`.
    pub fn run(mut self) -> Result<SolveReport> {
        while self.pushes < self.params.max_pushes {
            if self.step()?.is_none() {
                break;
            }
        }
        Ok(self.report())
    }

    pub fn report(&self) -> SolveReport {
        SolveReport {
            x: self.solution(),
            residual: self.residual(),
            pushes: self.pushes,
            work: self.work,
            work_bound: work_bound(self.problem, &self.params),
            converged: self.is_done(),
            wallclock: None,
        }
    }

    /// Hands the storage back for another run.
    pub fn into_workspace(self) -> Workspace {
        self.ws
    }

    fn residual_at(&self, i: usize, xi: f64) -> f64 {
        let x = &self.ws.x;
        self.problem.node_residual(i, xi, |j| x.get(j))
    }

    /// Initial bisection bracket `[lo, hi]` with `f(lo) > target ≥ f(hi)`.
    fn bracket(&self, i: usize, xi: f64, upper: f64, target: f64) -> (f64, f64) {
        if !self.params.bracket_heuristic {
            return (0.0, upper);
        }
        let mut t = self.ws.last_delta.get(i);
        if t <= 0.0 {
            let p = self.problem;
            let ratio = p.seed_volume() / p.graph().total_volume();
            t = libm::pow(ratio, 1.0 / (p.loss().q() - 1.0));
        }
        if !(t > 0.0) || t >= upper {
            return (0.0, upper);
        }
        if self.residual_at(i, xi + t) <= target {
            return (0.0, t);
        }
        let mut lo = t;
        loop {
            let hi = lo * 10.0;
            if hi >= upper {
                return (lo, upper);
            }
            if self.residual_at(i, xi + hi) <= target {
                return (lo, hi);
            }
            lo = hi;
        }
    }

    fn push(&mut self, i: usize) -> Result<PushRecord> {
        let p = self.problem;
        let graph = p.graph();
        let loss = p.loss();
        let gamma = p.gamma();
        let kappa = p.kappa();
        let d = graph.degree(i);
        let xi = self.ws.x.get(i);
        let upper = 1.0 - xi;
        let target = self.params.rho * kappa * d;

        if self.residual_at(i, 1.0) > target {
            return Err(Error::Bracket { node: i, upper });
        }
        let (mut lo, mut hi) = self.bracket(i, xi, upper, target);
        while hi - lo >= self.params.eps {
            let mid = lo + 0.5 * (hi - lo);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.residual_at(i, xi + mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut delta = lo + 0.5 * (hi - lo);
        let mut gi = self.residual_at(i, xi + delta);
        if gi < 0.0 {
            // The midpoint overshot past zero where ℓ′ is steep. Fall back to a
            // point that still lies above the target.
            while lo <= 0.0 {
                let mid = 0.5 * hi;
                if mid <= 0.0 {
                    return Err(Error::Bracket { node: i, upper });
                }
                if self.residual_at(i, xi + mid) > target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            delta = lo;
            gi = self.residual_at(i, xi + delta);
        }

        let new_x = (xi + delta).min(1.0);
        let seed_target = if p.is_seed(i) { 1.0 } else { 0.0 };
        let decrease = d * (loss.deriv_unchecked(new_x - seed_target) - loss.deriv_unchecked(xi - seed_target));

        if xi == 0.0 {
            self.x_nodes.push(i);
        }
        self.ws.x.set(i, new_x);
        for (j, w) in graph.neighbors(i) {
            let xj = self.ws.x.get(j);
            let change = w * (loss.deriv_unchecked(xj - xi) - loss.deriv_unchecked(xj - new_x)) / gamma;
            let old = self.ws.g.get(j);
            if old == 0.0 && !p.is_seed(j) && self.ws.x.get(j) == 0.0 {
                self.g_nodes.push(j);
            }
            let gj = old + change;
            self.ws.g.set(j, gj);
            if gj > kappa * graph.degree(j) {
                self.enqueue(j);
            }
        }
        self.ws.g.set(i, gi);
        if gi > kappa * d {
            self.enqueue(i);
        }
        self.ws.last_delta.set(i, delta);
        self.g_l1 -= decrease;
        self.work += d;
        self.pushes += 1;
        Ok(PushRecord {
            node: i,
            delta,
            degree: d,
            g_l1_decrease: decrease,
            residual_after: gi,
        })
    }
}

/// Runs the push solver from `x = 0`.
pub fn solve(problem: &SeededProblem<'_>, params: SolverParams) -> Result<SolveReport> {
    Solver::new(problem, params)?.run()
}

/// A-priori bound on `Σ d_i` over all pushes.
///
/// Regime A: `vol(S) / (c · ℓ′⁻¹(γ(1−ρ)κ / (k(1+γ))))`.
/// Regime B: `vol(S) / (k · ℓ′(γ(1−ρ)κ / (c(1+γ))))`.
///
/// Returns `None` when some edge weight is below one, where the bound does not apply.
pub fn work_bound(problem: &SeededProblem<'_>, params: &SolverParams) -> Option<f64> {
    if problem.graph().has_light_edges() {
        return None;
    }
    let loss = problem.loss();
    let (gamma, kappa, rho) = (problem.gamma(), problem.kappa(), params.rho);
    let slack = gamma * (1.0 - rho) * kappa / (1.0 + gamma);
    let per_unit_degree = match loss.regime() {
        Regime::A => loss.c() * loss.deriv_inverse_unchecked(slack / loss.k()),
        Regime::B => loss.k() * loss.deriv_unchecked(slack / loss.c()),
    };
    let vol = problem.seed_volume();
    Some(if per_unit_degree > 0.0 {
        vol / per_unit_degree
    } else {
        f64::INFINITY
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Graph, NodeSet};
    use crate::loss::Loss;
    use alloc::vec;

    fn triangle() -> Graph {
        Graph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap()
    }

    #[test]
    fn rejects_zero_kappa_and_bad_params() {
        let g = triangle();
        let p = SeededProblem::new(&g, NodeSet::new(vec![0]), 0.1, 0.0, Loss::q_norm(2.0).unwrap()).unwrap();
        assert!(matches!(solve(&p, SolverParams::default()), Err(Error::Parameter(_))));
        let p = SeededProblem::new(&g, NodeSet::new(vec![0]), 0.1, 0.01, Loss::q_norm(2.0).unwrap()).unwrap();
        for bad in [
            SolverParams { rho: 1.0, ..Default::default() },
            SolverParams { rho: 0.0, ..Default::default() },
            SolverParams { eps: 0.0, ..Default::default() },
        ] {
            assert!(solve(&p, bad).is_err());
        }
    }

    #[test]
    fn all_seeds_with_large_kappa_needs_no_push() {
        let g = triangle();
        let p = SeededProblem::new(&g, NodeSet::full(3), 0.1, 1.0, Loss::q_norm(2.0).unwrap()).unwrap();
        let r = solve(&p, SolverParams::default()).unwrap();
        assert_eq!(r.pushes, 0);
        assert!(r.converged);
        assert!(r.x.is_empty());
    }

    #[test]
    fn first_push_matches_closed_form() {
        // q = 2, x = 0: the seed residual after a step Δ is d(1 − Δ) − dΔ/γ,
        // so Δ = γ(1 − ρκ)/(1 + γ).
        let g = triangle();
        let gamma = 0.1;
        let kappa = 0.01;
        for rho in [0.5, 0.999999] {
            let p = SeededProblem::new(&g, NodeSet::new(vec![0]), gamma, kappa, Loss::q_norm(2.0).unwrap()).unwrap();
            let params = SolverParams { rho, eps: 1e-12, ..Default::default() };
            let mut s = Solver::new(&p, params).unwrap();
            let rec = s.step().unwrap().unwrap();
            let expect = gamma * (1.0 - rho * kappa) / (1.0 + gamma);
            assert!((rec.delta - expect).abs() <= 1e-12, "{} vs {}", rec.delta, expect);
        }
        let expect: f64 = 0.1 * (1.0 - 0.5 * 0.01) / 1.1;
        assert!((expect - 0.0904545).abs() < 1e-7);
    }

    #[test]
    fn work_bound_examples() {
        let g = triangle();
        let p = SeededProblem::new(&g, NodeSet::new(vec![0]), 0.1, 0.01, Loss::q_norm(2.0).unwrap()).unwrap();
        let b = work_bound(&p, &SolverParams { rho: 0.5, ..Default::default() }).unwrap();
        assert!((b - 4400.0).abs() < 1e-9 * 4400.0);
        let tight = work_bound(&p, &SolverParams { rho: 1.0 - 1e-12, ..Default::default() }).unwrap();
        assert!(tight > 1e14);

        // q = 1.5: ℓ′⁻¹(y) = y², c = 0.5, k = √2.
        let p = SeededProblem::new(&g, NodeSet::new(vec![0]), 0.1, 0.01, Loss::q_norm(1.5).unwrap()).unwrap();
        let b = work_bound(&p, &SolverParams { rho: 0.5, ..Default::default() }).unwrap();
        let y: f64 = 0.1 * 0.5 * 0.01 / (2f64.sqrt() * 1.1);
        let expect = 2.0 / (0.5 * y * y);
        assert!((b - expect).abs() <= 1e-12 * expect);

        let light = Graph::from_edges(2, [(0, 1, 0.5)]).unwrap();
        let p = SeededProblem::new(&light, NodeSet::new(vec![0]), 0.1, 0.01, Loss::q_norm(2.0).unwrap()).unwrap();
        assert_eq!(work_bound(&p, &SolverParams::default()), None);
    }

    #[test]
    fn incremental_residual_tracks_recomputation() {
        let g = Graph::from_edges(
            6,
            [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0), (3, 4, 1.0), (4, 5, 3.0), (5, 0, 1.0), (1, 4, 1.0)],
        )
        .unwrap();
        let p = SeededProblem::new(&g, NodeSet::new(vec![0]), 0.2, 0.005, Loss::q_norm(1.3).unwrap()).unwrap();
        let mut s = Solver::new(&p, SolverParams::default()).unwrap();
        while s.step().unwrap().is_some() {
            let exact = p.residual(&s.solution()).unwrap();
            assert!(exact.max_abs_diff(&s.residual()) < 1e-9);
        }
        assert_eq!(p.kkt_violation(&s.solution()).unwrap(), 0.0);
    }

    #[test]
    fn dense_and_sparse_workspaces_agree() {
        let g = Graph::from_edges(5, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0), (0, 2, 1.0)]).unwrap();
        let p = SeededProblem::new(&g, NodeSet::new(vec![1]), 0.1, 0.01, Loss::berq(1.4, 0.01).unwrap()).unwrap();
        let a = Solver::with_workspace(&p, SolverParams::default(), Workspace::dense(5))
            .unwrap()
            .run()
            .unwrap();
        let b = Solver::with_workspace(&p, SolverParams::default(), Workspace::sparse(5))
            .unwrap()
            .run()
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn workspace_reuse_gives_identical_runs() {
        let g = triangle();
        let p = SeededProblem::new(&g, NodeSet::new(vec![2]), 0.1, 0.01, Loss::q_norm(1.5).unwrap()).unwrap();
        let s = Solver::new(&p, SolverParams::default()).unwrap();
        let first = s.report();
        let s = s.run().unwrap();
        let again = Solver::new(&p, SolverParams::default()).unwrap().run().unwrap();
        assert_eq!(s, again);
        assert_eq!(first.pushes, 0);
    }

    #[test]
    fn heuristic_bracket_reaches_same_kkt() {
        let g = Graph::from_edges(
            8,
            [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0), (4, 5, 1.0), (5, 6, 1.0), (6, 7, 1.0), (7, 0, 1.0), (0, 4, 1.0)],
        )
        .unwrap();
        let p = SeededProblem::new(&g, NodeSet::new(vec![0]), 0.1, 0.01, Loss::q_norm(1.25).unwrap()).unwrap();
        let plain = solve(&p, SolverParams { rho: 0.99, eps: 1e-12, ..Default::default() }).unwrap();
        let fast = solve(
            &p,
            SolverParams { rho: 0.99, eps: 1e-12, bracket_heuristic: true, ..Default::default() },
        )
        .unwrap();
        assert!(plain.converged && fast.converged);
        assert_eq!(p.kkt_violation(&fast.x).unwrap(), 0.0);
        assert!(plain.x.max_abs_diff(&fast.x) < 1e-2);
    }

    #[test]
    fn push_cap_reports_partial() {
        let g = triangle();
        let p = SeededProblem::new(&g, NodeSet::new(vec![0]), 0.1, 1e-4, Loss::q_norm(2.0).unwrap()).unwrap();
        let r = solve(&p, SolverParams { max_pushes: 1, ..Default::default() }).unwrap();
        assert_eq!(r.pushes, 1);
        assert!(!r.converged);
    }
}
