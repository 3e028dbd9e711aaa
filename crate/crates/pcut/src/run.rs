// SPDX-License-Identifier: Apache-2.0

//! Reproducible runs: solve, oracle, sweep and the seeded recovery evaluation.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::seq::index;
use rayon::prelude::*;

use pcut_core::gen::{rng, RNG_NAME};
use pcut_core::{
    oracle_solve, recovery, sweep_cut, Graph, Loss, LossKind, NodeSet, OracleParams, OracleReport, SeededProblem,
    Solution, SolveReport, SolverParams, SparseVector, SweepMode, SweepResult,
};

use crate::io::{format_f64, format_solution, IoError, Metadata};

/// Seed sampling for trial `t` of an evaluation uses stream
/// `EVAL_STREAM_OFFSET + t`, disjoint from the generator stream.
pub const EVAL_STREAM_OFFSET: u64 = 1;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Core(#[from] pcut_core::Error),

    #[error(transparent)]
    Io(#[from] IoError),

    #[error("{0}")]
    Invalid(String),

    #[error(transparent)]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
}

pub type RunResult<T> = Result<T, RunError>;

/// Every numeric parameter of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub loss: LossKind,
    pub q: f64,
    pub delta: f64,
    pub gamma: f64,
    pub kappa: f64,
    pub rho: f64,
    pub eps: f64,
    pub max_pushes: u64,
    pub bracket_heuristic: bool,
    pub sweep_mode: SweepMode,
    pub rng_seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let solver = SolverParams::default();
        Self {
            loss: LossKind::QNorm,
            q: 1.2,
            delta: pcut_core::loss::DEFAULT_DELTA,
            gamma: 0.05,
            kappa: 0.005,
            rho: solver.rho,
            eps: solver.eps,
            max_pushes: solver.max_pushes,
            bracket_heuristic: solver.bracket_heuristic,
            sweep_mode: SweepMode::Plain,
            rng_seed: 0,
        }
    }
}

impl RunConfig {
    pub fn loss(&self) -> RunResult<Loss> {
        Ok(Loss::new(self.loss, self.q, self.delta)?)
    }

    pub fn solver_params(&self) -> SolverParams {
        SolverParams {
            rho: self.rho,
            eps: self.eps,
            max_pushes: self.max_pushes,
            bracket_heuristic: self.bracket_heuristic,
        }
    }

    pub fn problem<'g>(&self, graph: &'g Graph, seeds: NodeSet) -> RunResult<SeededProblem<'g>> {
        Ok(SeededProblem::new(graph, seeds, self.gamma, self.kappa, self.loss()?)?)
    }

    /// Rejects configurations the push solver cannot run, before any work.
    pub fn validate_for_solver(&self) -> RunResult<()> {
        self.loss()?;
        self.solver_params().validate()?;
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(RunError::Invalid("gamma must be positive and finite".into()));
        }
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(RunError::Invalid("kappa must be positive for the push solver".into()));
        }
        Ok(())
    }

    pub fn metadata(&self) -> Metadata {
        let mut m = Metadata::new();
        m.set("loss", self.loss.name())
            .set_f64("q", self.q)
            .set_f64("delta", self.delta)
            .set_f64("gamma", self.gamma)
            .set_f64("kappa", self.kappa)
            .set_f64("rho", self.rho)
            .set_f64("eps", self.eps)
            .set("max_pushes", self.max_pushes)
            .set("bracket_heuristic", self.bracket_heuristic)
            .set("sweep_mode", self.sweep_mode.name())
            .set("rng", RNG_NAME)
            .set("rng_seed", self.rng_seed);
        m
    }
}

/// Human-readable notes about a loaded graph.
pub fn graph_warnings(graph: &Graph) -> Vec<String> {
    let mut out = Vec::new();
    let components = graph.component_count();
    if components > 1 {
        out.push(format!(
            "graph has {components} connected components; solutions stay within the components of the seeds"
        ));
    }
    if graph.has_light_edges() {
        out.push(format!(
            "smallest edge weight {} is below 1; the work bound is not checked",
            graph.min_weight()
        ));
    }
    out
}

fn graph_metadata(m: &mut Metadata, graph: &Graph) {
    m.set("graph_nodes", graph.node_count())
        .set("graph_edges", graph.edge_count())
        .set_f64("graph_volume", graph.total_volume());
}

fn join_ids(set: &NodeSet) -> String {
    set.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
}

/// Result of [`run_solve`].
#[derive(Debug, Clone)]
pub struct SolveRun {
    pub config: RunConfig,
    pub seeds: NodeSet,
    pub report: SolveReport,
}

impl SolveRun {
    pub fn solution_tsv(&self) -> String {
        format_solution(&self.report.x, &self.report.residual)
    }

    /// Parameters, counters and the convergence flag. Includes the wallclock,
    /// so two runs differ here only in `wallclock_seconds`.
    pub fn metadata(&self, graph: &Graph) -> Metadata {
        let r = &self.report;
        let mut m = Metadata::new();
        m.set("command", "solve");
        m.extend(&self.config.metadata());
        graph_metadata(&mut m, graph);
        m.set("seeds", join_ids(&self.seeds))
            .set("converged", r.converged)
            .set("partial", !r.converged)
            .set("pushes", r.pushes)
            .set_f64("work", r.work)
            .set("work_bound", r.work_bound.map_or_else(|| "none".to_string(), format_f64))
            .set("support", r.x.nnz());
        if let Some(t) = r.wallclock {
            m.set_f64("wallclock_seconds", t.as_secs_f64());
        }
        m
    }
}

pub fn run_solve(graph: &Graph, seeds: NodeSet, config: &RunConfig) -> RunResult<SolveRun> {
    config.validate_for_solver()?;
    let problem = config.problem(graph, seeds.clone())?;
    let start = Instant::now();
    let mut report = pcut_core::solve(&problem, config.solver_params())?;
    report.wallclock = Some(start.elapsed());
    Ok(SolveRun {
        config: *config,
        seeds,
        report,
    })
}

/// Result of [`run_oracle`].
#[derive(Debug, Clone)]
pub struct OracleRun {
    pub config: RunConfig,
    pub params: OracleParams,
    pub seeds: NodeSet,
    pub report: OracleReport,
    pub residual: SparseVector,
    pub objective: f64,
}

impl OracleRun {
    pub fn solution_tsv(&self) -> String {
        format_solution(&self.report.x, &self.residual)
    }

    pub fn metadata(&self, graph: &Graph) -> Metadata {
        let mut m = Metadata::new();
        m.set("command", "oracle");
        m.extend(&self.config.metadata());
        graph_metadata(&mut m, graph);
        m.set("seeds", join_ids(&self.seeds))
            .set_f64("oracle_tol", self.params.tol)
            .set_f64("oracle_coord_tol", self.params.coord_tol)
            .set("oracle_max_sweeps", self.params.max_sweeps)
            .set("sweeps", self.report.sweeps)
            .set_f64("violation", self.report.violation)
            .set_f64("objective", self.objective)
            .set("support", self.report.x.nnz());
        m
    }
}

pub fn run_oracle(graph: &Graph, seeds: NodeSet, config: &RunConfig, params: OracleParams) -> RunResult<OracleRun> {
    let problem = config.problem(graph, seeds.clone())?;
    let report = oracle_solve(&problem, params)?;
    let residual = problem.residual(&report.x)?;
    let objective = problem.objective(&report.x)?;
    Ok(OracleRun {
        config: *config,
        params,
        seeds,
        report,
        residual,
        objective,
    })
}

pub fn run_sweep(graph: &Graph, x: &Solution, mode: SweepMode) -> RunResult<SweepResult> {
    Ok(sweep_cut(graph, x, mode)?)
}

/// `rank<TAB>node<TAB>conductance` for every prefix.
pub fn sweep_profile_tsv(result: &SweepResult) -> String {
    let mut out = String::from("rank\tnode\tconductance\n");
    for (r, (&i, &phi)) in result.order.iter().zip(&result.conductances).enumerate() {
        let _ = writeln!(out, "{}\t{i}\t{}", r + 1, format_f64(phi));
    }
    out
}

pub fn sweep_metadata(result: &SweepResult, mode: SweepMode) -> Metadata {
    let mut m = Metadata::new();
    m.set("command", "sweep")
        .set("sweep_mode", mode.name())
        .set("support", result.order.len())
        .set("best_prefix", result.best_prefix)
        .set_f64("best_conductance", result.best_conductance);
    m
}

/// Settings of a recovery evaluation on top of a [`RunConfig`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig {
    pub run: RunConfig,
    /// Fraction of the target community used as seeds, rounded up to at least one node.
    pub seed_fraction: f64,
    pub trials: usize,
    /// Community to target in every trial. When absent, trial `t` targets
    /// community `t mod count`.
    pub community: Option<usize>,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            run: RunConfig::default(),
            seed_fraction: 0.01,
            trials: 20,
            community: None,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial: usize,
    pub community: usize,
    pub seeds: usize,
    pub pushes: u64,
    pub work: f64,
    pub support: usize,
    pub converged: bool,
    pub found: usize,
    pub conductance: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub wallclock: Duration,
}

/// Median and the 20% and 80% quantiles of one metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spread {
    pub q20: f64,
    pub median: f64,
    pub q80: f64,
}

impl Spread {
    pub fn of(values: &[f64]) -> Self {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Self {
            q20: quantile(&v, 0.2),
            median: quantile(&v, 0.5),
            q80: quantile(&v, 0.8),
        }
    }
}

/// Linear interpolation between order statistics of sorted `v`.
pub fn quantile(v: &[f64], p: f64) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let h = (v.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi || v[lo] == v[hi] {
        return v[lo];
    }
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

#[derive(Debug, Clone)]
pub struct EvalReport {
    pub config: EvalConfig,
    /// Sorted by trial index.
    pub trials: Vec<TrialResult>,
    pub f1: Spread,
    pub precision: Spread,
    pub recall: Spread,
    pub conductance: Spread,
}

impl EvalReport {
    /// Parameters and aggregate metrics. Contains no timings.
    pub fn summary(&self) -> Metadata {
        let c = &self.config;
        let mut m = Metadata::new();
        m.set("command", "eval");
        m.extend(&c.run.metadata());
        m.set_f64("seed_fraction", c.seed_fraction)
            .set("trials", c.trials)
            .set("community", c.community.map_or_else(|| "cycle".to_string(), |i| i.to_string()))
            .set("converged_trials", self.trials.iter().filter(|t| t.converged).count());
        for (name, s) in [
            ("f1", self.f1),
            ("precision", self.precision),
            ("recall", self.recall),
            ("conductance", self.conductance),
        ] {
            m.set_f64(format!("{name}_q20"), s.q20)
                .set_f64(format!("{name}_median"), s.median)
                .set_f64(format!("{name}_q80"), s.q80);
        }
        m
    }

    /// One row per trial. Contains no timings.
    pub fn trials_tsv(&self) -> String {
        let mut out =
            String::from("trial\tcommunity\tseeds\tpushes\twork\tsupport\tconverged\tfound\tconductance\tprecision\trecall\tf1\n");
        for t in &self.trials {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                t.trial,
                t.community,
                t.seeds,
                t.pushes,
                format_f64(t.work),
                t.support,
                t.converged,
                t.found,
                format_f64(t.conductance),
                format_f64(t.precision),
                format_f64(t.recall),
                format_f64(t.f1),
            );
        }
        out
    }

    /// Wallclock per trial, kept apart from the deterministic documents.
    pub fn timings_tsv(&self) -> String {
        let mut out = String::from("trial\twallclock_seconds\n");
        for t in &self.trials {
            let _ = writeln!(out, "{}\t{}", t.trial, format_f64(t.wallclock.as_secs_f64()));
        }
        out
    }
}

/// Number of seeds drawn from a community of `size` nodes.
pub fn seed_count(size: usize, fraction: f64) -> usize {
    ((size as f64 * fraction).ceil() as usize).clamp(1, size)
}

/// Seeds of one trial, a uniform sample without replacement from `community`.
pub fn sample_seeds(community: &NodeSet, fraction: f64, rng_seed: u64, trial: usize) -> NodeSet {
    let mut r = rng(rng_seed, EVAL_STREAM_OFFSET + trial as u64);
    let k = seed_count(community.len(), fraction);
    let ids = community.as_slice();
    index::sample(&mut r, ids.len(), k).into_iter().map(|p| ids[p]).collect()
}

fn run_trial(graph: &Graph, targets: &[NodeSet], config: &EvalConfig, trial: usize) -> RunResult<TrialResult> {
    let community = config.community.unwrap_or(trial % targets.len());
    let target = &targets[community];
    let seeds = sample_seeds(target, config.seed_fraction, config.run.rng_seed, trial);
    let start = Instant::now();
    let problem = config.run.problem(graph, seeds.clone())?;
    let report = pcut_core::solve(&problem, config.run.solver_params())?;
    let (found, conductance) = match sweep_cut(graph, &report.x, config.run.sweep_mode) {
        Ok(s) => (s.best_set, s.best_conductance),
        Err(pcut_core::Error::EmptySupport | pcut_core::Error::FullSupport | pcut_core::Error::UndefinedSet) => {
            (NodeSet::empty(), f64::INFINITY)
        }
        Err(e) => return Err(e.into()),
    };
    let wallclock = start.elapsed();
    let score = recovery(target, &found);
    Ok(TrialResult {
        trial,
        community,
        seeds: seeds.len(),
        pushes: report.pushes,
        work: report.work,
        support: report.x.nnz(),
        converged: report.converged,
        found: found.len(),
        conductance,
        precision: score.precision,
        recall: score.recall,
        f1: score.f1,
        wallclock,
    })
}

/// Seeds each trial from a sample of its target community, solves, sweeps and
/// scores the sweep set against the community. Trials run concurrently; the
/// result is independent of scheduling.
pub fn run_eval(graph: &Graph, communities: &[NodeSet], config: &EvalConfig) -> RunResult<EvalReport> {
    config.run.validate_for_solver()?;
    if config.trials == 0 {
        return Err(RunError::Invalid("at least one trial is required".into()));
    }
    if !(config.seed_fraction > 0.0 && config.seed_fraction <= 1.0) {
        return Err(RunError::Invalid("seed fraction must lie in (0, 1]".into()));
    }
    if communities.is_empty() {
        return Err(RunError::Invalid("no target communities".into()));
    }
    if let Some(c) = config.community {
        if c >= communities.len() {
            return Err(RunError::Invalid(format!(
                "community {c} requested but only {} are listed",
                communities.len()
            )));
        }
    }
    let n = graph.node_count();
    for (k, c) in communities.iter().enumerate() {
        if c.is_empty() {
            return Err(RunError::Invalid(format!("community {k} is empty")));
        }
        if let Some(&top) = c.as_slice().last() {
            if top >= n {
                return Err(pcut_core::Error::NodeOutOfRange { id: top, node_count: n }.into());
            }
        }
        if c.len() == n {
            return Err(RunError::Invalid(format!(
                "community {k} covers the whole graph, so no sweep cut can recover it"
            )));
        }
    }

    let work = || {
        (0..config.trials)
            .into_par_iter()
            .map(|t| run_trial(graph, communities, config, t))
            .collect::<RunResult<Vec<_>>>()
    };
    let mut trials = match config.threads {
        Some(k) => rayon::ThreadPoolBuilder::new().num_threads(k).build()?.install(work)?,
        None => work()?,
    };
    trials.sort_by_key(|t| t.trial);

    let metric = |f: fn(&TrialResult) -> f64| Spread::of(&trials.iter().map(f).collect::<Vec<_>>());
    Ok(EvalReport {
        config: *config,
        f1: metric(|t| t.f1),
        precision: metric(|t| t.precision),
        recall: metric(|t| t.recall),
        conductance: metric(|t| t.conductance),
        trials,
    })
}
