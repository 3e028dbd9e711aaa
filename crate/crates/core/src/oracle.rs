// SPDX-License-Identifier: Apache-2.0

//! Dense reference solver.
//!
//! Cyclic coordinate minimization over all nodes in ascending order. Each
//! coordinate is set to the root of its one-dimensional stationarity condition
//! `g_i(x_i) = κ d_i`, clamped at zero, found by bisection on `[0, 1]` carried
//! down to adjacent floating-point values. After every sweep, line searches
//! along the indicators of groups of nearly tied positive coordinates, and of
//! the whole support, move coupled coordinates together. Coordinate moves alone
//! stall on such groups when `q` is near one or `γ` is tiny. This path shares
//! nothing with the push solver beyond the
//! objective definition.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::problem::SeededProblem;
use crate::sparse::{Solution, SparseVector};

/// Tie widths used to group coordinates for joint line searches.
const GROUP_SCALES: [f64; 5] = [1e-2, 1e-4, 1e-6, 1e-9, 1e-12];

/// Sweeps without a new smallest violation after which the oracle gives up.
const STALL_SWEEPS: usize = 1000;

/// Largest graph the dense oracle accepts.
pub const ORACLE_NODE_LIMIT: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleParams {
    /// Degree-normalized KKT tolerance.
    pub tol: f64,
    pub max_sweeps: usize,
    /// Largest coordinate move allowed in the final sweep.
    pub coord_tol: f64,
}

impl Default for OracleParams {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_sweeps: 1_000_000,
            coord_tol: 1e-15,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub x: Solution,
    pub sweeps: usize,
    /// Final degree-normalized KKT violation, counting both `g_i ≤ κ d_i`
    /// and `g_i = κ d_i` wherever `x_i > 0`.
    pub violation: f64,
}

pub fn oracle_solve(problem: &SeededProblem<'_>, params: OracleParams) -> Result<OracleReport> {
    let n = problem.graph().node_count();
    oracle_solve_from(problem, params, &vec![0.0; n])
}

/// Same as [`oracle_solve`] from the dense starting point `init`.
pub fn oracle_solve_from(
    problem: &SeededProblem<'_>,
    params: OracleParams,
    init: &[f64],
) -> Result<OracleReport> {
    let n = problem.graph().node_count();
    if n > ORACLE_NODE_LIMIT {
        return Err(Error::TooLarge {
            node_count: n,
            limit: ORACLE_NODE_LIMIT,
        });
    }
    if !(params.tol > 0.0) || !(params.coord_tol > 0.0) {
        return Err(Error::Parameter("oracle tolerances must be positive"));
    }
    if init.len() != n {
        return Err(Error::Parameter("initial vector length differs from node count"));
    }
    if let Some((node, &value)) = init.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
        return Err(Error::SolutionRange { node, value });
    }

    let mut oracle = Dense {
        problem,
        x: init.to_vec(),
        seed: (0..n).map(|i| problem.is_seed(i)).collect(),
    };
    let mut violation = f64::INFINITY;
    let mut best = f64::INFINITY;
    let mut best_sweep = 0;
    for sweep in 1..=params.max_sweeps {
        let before = oracle.x.clone();
        let mut moved: f64 = 0.0;
        for i in 0..n {
            moved = moved.max(oracle.minimize_coordinate(i));
        }
        moved = moved.max(oracle.shift_groups());
        violation = oracle.violation();
        if moved <= params.coord_tol && violation <= params.tol {
            return Ok(OracleReport {
                x: SparseVector::from_dense(&oracle.x),
                sweeps: sweep,
                violation,
            });
        }
        if oracle.x == before {
            // A fixed point in floating point: further sweeps change nothing.
            return Err(Error::NonConvergence { sweeps: sweep, violation });
        }
        if violation < best {
            best = violation;
            best_sweep = sweep;
        } else if sweep - best_sweep >= STALL_SWEEPS {
            // Rounding keeps the iterates cycling above the tolerance.
            return Err(Error::NonConvergence { sweeps: sweep, violation });
        }
    }
    Err(Error::NonConvergence {
        sweeps: params.max_sweeps,
        violation,
    })
}

/// `max_i |a_i − b_i|` over the union of supports.
pub fn oracle_compare(_problem: &SeededProblem<'_>, a: &Solution, b: &Solution) -> f64 {
    a.max_abs_diff(b)
}

struct Dense<'p, 'g> {
    problem: &'p SeededProblem<'g>,
    x: Vec<f64>,
    seed: Vec<bool>,
}

impl Dense<'_, '_> {
    fn residual(&self, i: usize, xi: f64) -> f64 {
        let p = self.problem;
        let loss = p.loss();
        let mut flow = 0.0;
        for (j, w) in p.graph().neighbors(i) {
            flow += w * loss.deriv_unchecked(xi - self.x[j]);
        }
        let target = if self.seed[i] { 1.0 } else { 0.0 };
        -flow / p.gamma() - p.graph().degree(i) * loss.deriv_unchecked(xi - target)
    }

    /// Sets `x_i` to its coordinate minimizer and returns the move size.
    fn minimize_coordinate(&mut self, i: usize) -> f64 {
        let d = self.problem.graph().degree(i);
        let old = self.x[i];
        if d == 0.0 {
            // Isolated node: only the sparsity term depends on it.
            self.x[i] = 0.0;
            return old;
        }
        let kd = self.problem.kappa() * d;
        let h = |t: f64| self.residual(i, t) - kd;
        let new = if h(0.0) <= 0.0 {
            0.0
        } else if h(1.0) >= 0.0 {
            1.0
        } else {
            let (lo, hi) = bisect(h, 0.0, 1.0);
            closest_root(h, lo, hi)
        };
        self.x[i] = new;
        libm::fabs(new - old)
    }

    /// Line searches along the indicator of every near-tied group of positive
    /// coordinates at a few scales, then along the whole support.
    fn shift_groups(&mut self) -> f64 {
        let mut moved: f64 = 0.0;
        for scale in GROUP_SCALES {
            for group in self.tied_groups(scale) {
                moved = moved.max(self.shift(&group));
            }
        }
        let support: Vec<usize> = (0..self.x.len()).filter(|&i| self.x[i] > 0.0).collect();
        moved.max(self.shift(&support))
    }

    /// Connected components, with at least two nodes, of the positive
    /// coordinates joined by edges whose endpoint values differ by at most
    /// `scale`.
    fn tied_groups(&self, scale: f64) -> Vec<Vec<usize>> {
        let n = self.x.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for (u, v, _) in self.problem.graph().edges() {
            if self.x[u] > 0.0 && self.x[v] > 0.0 && libm::fabs(self.x[u] - self.x[v]) <= scale {
                let (a, b) = (find(&mut parent, u), find(&mut parent, v));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); n];
        for i in 0..n {
            if self.x[i] > 0.0 {
                let r = find(&mut parent, i);
                members[r].push(i);
            }
        }
        members.into_iter().filter(|m| m.len() > 1).collect()
    }

    /// Line search on `x + t·1_G`. The directional derivative is
    /// `γ Σ_{i∈G} (κ d_i − g_i)`, nondecreasing in `t`.
    fn shift(&mut self, group: &[usize]) -> f64 {
        if group.is_empty() {
            return 0.0;
        }
        let lo = -group.iter().map(|&i| self.x[i]).fold(f64::INFINITY, f64::min);
        let hi = 1.0 - group.iter().map(|&i| self.x[i]).fold(0.0, f64::max);
        let kappa = self.problem.kappa();
        let base: Vec<f64> = group.iter().map(|&i| self.x[i]).collect();
        let slope = |t: f64, this: &mut Self| {
            for (k, &i) in group.iter().enumerate() {
                this.x[i] = base[k] + t;
            }
            let s: f64 = group
                .iter()
                .map(|&i| kappa * this.problem.graph().degree(i) - this.residual(i, this.x[i]))
                .sum();
            for (k, &i) in group.iter().enumerate() {
                this.x[i] = base[k];
            }
            s
        };
        let s0 = slope(0.0, self);
        let t = if s0 > 0.0 {
            if slope(lo, self) >= 0.0 {
                lo
            } else {
                bisect_mut(self, &slope, lo, 0.0)
            }
        } else if s0 < 0.0 {
            if slope(hi, self) <= 0.0 {
                hi
            } else {
                bisect_mut(self, &slope, 0.0, hi)
            }
        } else {
            0.0
        };
        if t == 0.0 {
            return 0.0;
        }
        for (k, &i) in group.iter().enumerate() {
            self.x[i] = (base[k] + t).clamp(0.0, 1.0);
        }
        libm::fabs(t)
    }

    fn violation(&self) -> f64 {
        let p = self.problem;
        let mut worst: f64 = 0.0;
        for i in 0..self.x.len() {
            let d = p.graph().degree(i);
            if d == 0.0 {
                continue;
            }
            let excess = (self.residual(i, self.x[i]) - p.kappa() * d) / d;
            let v = if self.x[i] > 0.0 { libm::fabs(excess) } else { excess };
            worst = worst.max(v);
        }
        worst
    }
}

/// Order-preserving map from finite `f64` to `u64`.
fn key(x: f64) -> u64 {
    let b = x.to_bits();
    if b >> 63 == 1 {
        !b
    } else {
        b | 1 << 63
    }
}

fn unkey(k: u64) -> f64 {
    f64::from_bits(if k >> 63 == 1 { k & !(1 << 63) } else { !k })
}

/// Midpoint of `[lo, hi]` in representation order. Halving the count of
/// floats in between reaches adjacent values within 64 steps at any scale.
fn float_mid(lo: f64, hi: f64) -> f64 {
    let (a, b) = (key(lo), key(hi));
    unkey(a + (b - a) / 2)
}

/// Bisects a decreasing `h` on `[lo, hi]` with `h(lo) > 0 ≥ h(hi)` until
/// `lo` and `hi` are adjacent floats.
fn bisect<H: Fn(f64) -> f64>(h: H, mut lo: f64, mut hi: f64) -> (f64, f64) {
    loop {
        let mid = float_mid(lo, hi);
        if mid <= lo || mid >= hi {
            return (lo, hi);
        }
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Whichever of `lo` and `hi` has the smaller `|h|`.
fn closest_root<H: Fn(f64) -> f64>(h: H, lo: f64, hi: f64) -> f64 {
    if libm::fabs(h(hi)) < libm::fabs(h(lo)) {
        hi
    } else {
        lo
    }
}

/// Root of a nondecreasing slope on `[lo, hi]` with `slope(lo) < 0 < slope(hi)`,
/// to adjacent floats.
fn bisect_mut<T, S: Fn(f64, &mut T) -> f64>(state: &mut T, slope: &S, mut lo: f64, mut hi: f64) -> f64 {
    loop {
        let mid = float_mid(lo, hi);
        if mid <= lo || mid >= hi {
            let (a, b) = (libm::fabs(slope(lo, state)), libm::fabs(slope(hi, state)));
            return if b < a { hi } else { lo };
        }
        if slope(mid, state) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}
