// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use pcut::io::{
    format_communities, format_edge_list, format_node_set, load_graph, parse_communities, parse_seeds,
    parse_solution, read_file, write_file, Metadata,
};
use pcut::run::{
    graph_warnings, run_eval, run_oracle, run_solve, run_sweep, sweep_metadata, sweep_profile_tsv, EvalConfig,
    RunConfig,
};
use pcut_core::gen::{grid, planted_partition, GridSpec, PlantedPartitionSpec, RNG_NAME};
use pcut_core::{Graph, LossKind, NodeSet, OracleParams, SweepMode};

/// Strongly-local p-norm cut diffusions, sweep cuts and recovery benchmarks.
#[derive(Parser)]
#[command(name = "pcut", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic graph as an edge list.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Run the push solver and write the solution TSV and run metadata.
    Solve(SolveArgs),
    /// Run the dense reference solver (small graphs only).
    Oracle(OracleArgs),
    /// Sweep a solution TSV and write the best cluster.
    Sweep(SweepArgs),
    /// Seed from sampled community members, solve, sweep and score recovery.
    Eval(EvalArgs),
}

#[derive(Subcommand)]
enum GenCommand {
    /// Grid with unit edges between axis neighbors; node (r, c) is r*cols + c.
    Grid {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        /// Edge-list output.
        #[arg(long)]
        out: PathBuf,
        /// Generator metadata output.
        #[arg(long)]
        meta: Option<PathBuf>,
    },
    /// Random block graph with ground-truth communities.
    Planted {
        #[arg(long, default_value_t = 2)]
        blocks: usize,
        #[arg(long, default_value_t = 100)]
        block_size: usize,
        #[arg(long, default_value_t = 0.1)]
        p_in: f64,
        #[arg(long, default_value_t = 0.005)]
        p_out: f64,
        #[arg(long, default_value_t = 1)]
        rng_seed: u64,
        /// Edge-list output.
        #[arg(long)]
        out: PathBuf,
        /// Communities output, one block per line.
        #[arg(long)]
        communities: PathBuf,
        /// Generator metadata output.
        #[arg(long)]
        meta: Option<PathBuf>,
    },
}

/// Objective and solver parameters.
#[derive(Args, Clone)]
struct ParamArgs {
    /// Loss family: qnorm, qhuber or berq.
    #[arg(long, default_value = "qnorm")]
    loss: String,
    #[arg(long, default_value_t = 1.2)]
    q: f64,
    /// Huber/Berq transition width.
    #[arg(long, default_value_t = pcut_core::loss::DEFAULT_DELTA)]
    delta: f64,
    /// Localization strength.
    #[arg(long, default_value_t = 0.05)]
    gamma: f64,
    /// Sparsity penalty; must be positive for the push solver.
    #[arg(long, default_value_t = 0.005)]
    kappa: f64,
    /// Push slack in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    rho: f64,
    /// Bisection width per push.
    #[arg(long, default_value_t = 1e-8)]
    eps: f64,
    #[arg(long, default_value_t = 10_000_000)]
    max_pushes: u64,
    /// Start each bisection from a bracket around the previous step at that node.
    #[arg(long)]
    bracket_heuristic: bool,
    /// Sweep ordering: plain or degree.
    #[arg(long, default_value = "plain")]
    sweep_mode: String,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
}

impl ParamArgs {
    fn config(&self) -> Result<RunConfig> {
        Ok(RunConfig {
            loss: self.loss.parse::<LossKind>().map_err(anyhow::Error::new)?,
            q: self.q,
            delta: self.delta,
            gamma: self.gamma,
            kappa: self.kappa,
            rho: self.rho,
            eps: self.eps,
            max_pushes: self.max_pushes,
            bracket_heuristic: self.bracket_heuristic,
            sweep_mode: parse_mode(&self.sweep_mode)?,
            rng_seed: self.rng_seed,
        })
    }
}

/// Graph and seed inputs.
#[derive(Args, Clone)]
struct InputArgs {
    /// Edge list `u v [w]`, 0-indexed.
    #[arg(long)]
    graph: PathBuf,
    /// Seed file, one node id per line.
    #[arg(long, conflicts_with = "seed")]
    seeds_file: Option<PathBuf>,
    /// Seed node id; repeat or comma-separate for several.
    #[arg(long, value_delimiter = ',')]
    seed: Vec<usize>,
}

impl InputArgs {
    fn load(&self) -> Result<(Graph, NodeSet)> {
        let graph = load_graph(&self.graph).with_context(|| format!("loading {}", self.graph.display()))?;
        for w in graph_warnings(&graph) {
            eprintln!("warning: {w}");
        }
        let seeds = match &self.seeds_file {
            Some(p) => parse_seeds(&read_file(p)?).with_context(|| format!("reading {}", p.display()))?,
            None if !self.seed.is_empty() => NodeSet::new(self.seed.clone()),
            None => bail!("give seeds with --seed or --seeds-file"),
        };
        Ok((graph, seeds))
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    params: ParamArgs,
    /// Solution TSV output.
    #[arg(long)]
    out: PathBuf,
    /// Run metadata output.
    #[arg(long)]
    meta: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    params: ParamArgs,
    /// Degree-normalized KKT tolerance.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 1_000_000)]
    max_sweeps: usize,
    #[arg(long, default_value_t = 1e-15)]
    coord_tol: f64,
    /// Solution TSV output.
    #[arg(long)]
    out: PathBuf,
    /// Run metadata output.
    #[arg(long)]
    meta: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Solution TSV as written by `solve` or `oracle`.
    #[arg(long)]
    solution: PathBuf,
    /// plain or degree.
    #[arg(long, default_value = "plain")]
    mode: String,
    /// Best cluster output, one node id per line.
    #[arg(long)]
    out: PathBuf,
    /// Per-prefix conductance output.
    #[arg(long)]
    profile: Option<PathBuf>,
    /// Sweep metadata output.
    #[arg(long)]
    meta: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Communities file, one community per line.
    #[arg(long)]
    communities: PathBuf,
    /// Target this community in every trial instead of cycling through all.
    #[arg(long)]
    community: Option<usize>,
    /// Fraction of the community used as seeds (at least one node).
    #[arg(long, default_value_t = 0.01)]
    seed_fraction: f64,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    threads: Option<usize>,
    #[command(flatten)]
    params: ParamArgs,
    /// Aggregate metrics output.
    #[arg(long)]
    out: PathBuf,
    /// Per-trial metrics output.
    #[arg(long)]
    trials_out: Option<PathBuf>,
    /// Per-trial wallclock output.
    #[arg(long)]
    timings_out: Option<PathBuf>,
}

fn parse_mode(s: &str) -> Result<SweepMode> {
    s.parse::<SweepMode>().map_err(anyhow::Error::new)
}

fn write(path: &Path, contents: &str) -> Result<()> {
    write_file(path, contents)?;
    Ok(())
}

fn gen(cmd: GenCommand) -> Result<()> {
    let mut m = Metadata::new();
    m.set("command", "gen");
    match cmd {
        GenCommand::Grid { rows, cols, out, meta } => {
            let g = grid(GridSpec { rows, cols })?;
            write(&out, &format_edge_list(&g))?;
            m.set("generator", "grid").set("rows", rows).set("cols", cols);
            if let Some(p) = meta {
                write(&p, &m.to_string())?;
            }
        }
        GenCommand::Planted {
            blocks,
            block_size,
            p_in,
            p_out,
            rng_seed,
            out,
            communities,
            meta,
        } => {
            let (g, truth) = planted_partition(PlantedPartitionSpec {
                blocks,
                block_size,
                p_in,
                p_out,
                rng_seed,
            })?;
            write(&out, &format_edge_list(&g))?;
            write(&communities, &format_communities(&truth))?;
            m.set("generator", "planted_partition")
                .set("blocks", blocks)
                .set("block_size", block_size)
                .set("p_in", p_in)
                .set("p_out", p_out)
                .set("rng", RNG_NAME)
                .set("rng_seed", rng_seed);
            if let Some(p) = meta {
                write(&p, &m.to_string())?;
            }
        }
    }
    Ok(())
}

fn solve(args: SolveArgs) -> Result<ExitCode> {
    let config = args.params.config()?;
    config.validate_for_solver()?;
    let (graph, seeds) = args.input.load()?;
    let run = run_solve(&graph, seeds, &config)?;
    write(&args.out, &run.solution_tsv())?;
    let mut m = run.metadata(&graph);
    m.set("graph", args.input.graph.display());
    if let Some(p) = &args.meta {
        write(p, &m.to_string())?;
    }
    if run.report.converged {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "error: push limit reached after {} pushes; outputs are partial",
            run.report.pushes
        );
        Ok(ExitCode::from(2))
    }
}

fn oracle(args: OracleArgs) -> Result<()> {
    let config = args.params.config()?;
    let (graph, seeds) = args.input.load()?;
    let params = OracleParams {
        tol: args.tol,
        max_sweeps: args.max_sweeps,
        coord_tol: args.coord_tol,
    };
    let run = run_oracle(&graph, seeds, &config, params)?;
    write(&args.out, &run.solution_tsv())?;
    let mut m = run.metadata(&graph);
    m.set("graph", args.input.graph.display());
    if let Some(p) = &args.meta {
        write(p, &m.to_string())?;
    }
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<()> {
    let graph = load_graph(&args.graph).with_context(|| format!("loading {}", args.graph.display()))?;
    let (x, _) = parse_solution(&read_file(&args.solution)?)
        .with_context(|| format!("reading {}", args.solution.display()))?;
    let mode = parse_mode(&args.mode)?;
    let result = run_sweep(&graph, &x, mode)?;
    write(&args.out, &format_node_set(&result.best_set))?;
    if let Some(p) = &args.profile {
        write(p, &sweep_profile_tsv(&result))?;
    }
    let m = sweep_metadata(&result, mode);
    match &args.meta {
        Some(p) => write(p, &m.to_string())?,
        None => print!("{m}"),
    }
    Ok(())
}

fn eval(args: EvalArgs) -> Result<()> {
    let run = args.params.config()?;
    let graph = load_graph(&args.graph).with_context(|| format!("loading {}", args.graph.display()))?;
    for w in graph_warnings(&graph) {
        eprintln!("warning: {w}");
    }
    let communities = parse_communities(&read_file(&args.communities)?)
        .with_context(|| format!("reading {}", args.communities.display()))?;
    let config = EvalConfig {
        run,
        seed_fraction: args.seed_fraction,
        trials: args.trials,
        community: args.community,
        threads: args.threads,
    };
    let report = run_eval(&graph, &communities, &config)?;
    let mut m = report.summary();
    m.set("graph", args.graph.display()).set("communities_file", args.communities.display());
    write(&args.out, &m.to_string())?;
    if let Some(p) = &args.trials_out {
        write(p, &report.trials_tsv())?;
    }
    if let Some(p) = &args.timings_out {
        write(p, &report.timings_tsv())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(c) => gen(c).map(|_| ExitCode::SUCCESS),
        Command::Solve(a) => solve(a),
        Command::Oracle(a) => oracle(a).map(|_| ExitCode::SUCCESS),
        Command::Sweep(a) => sweep(a).map(|_| ExitCode::SUCCESS),
        Command::Eval(a) => eval(a).map(|_| ExitCode::SUCCESS),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
