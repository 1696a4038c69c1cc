//! Command-line driver: graph generation, strategy sweeps, initialization
//! graphs, and the verification suite.
//!
//! Exit codes: 0 on success, 1 when some instances failed (partial results
//! were still written), 2 on total failure or a hard verification failure.
//! Instance-level parallelism uses a rayon pool; bound the worker count with
//! the `RAYON_NUM_THREADS` environment variable.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use qaoa_landscape::experiment::{
    run_experiment, run_on_graphs, write_outputs, EnsembleSpec, ExperimentConfig, OptimizerConfig,
    OutputPaths,
};
use qaoa_landscape::initgraph::{build_init_graph, export_graph, ExportFormat, InitGraphOptions};
use qaoa_landscape::optimizer::MinimizeOptions;
use qaoa_landscape::problem::{generate_graph, Ensemble, ProblemGraph};
use qaoa_landscape::strategies::{default_dt_grid, StrategyKind};
use qaoa_landscape::verify::{verify_suite, VerifyConfig};

#[derive(Parser)]
#[command(name = "qaoa-landscape", version, about = "QAOA landscape exploration for MaxCut")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a problem graph and write it as JSON.
    GenGraph(GenGraphArgs),
    /// Run initialization strategies on one graph or a sampled ensemble.
    Run(RunArgs),
    /// Build the initialization graph of minima for one instance.
    Initgraph(InitgraphArgs),
    /// Run the numerical self-check suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct GenGraphArgs {
    /// Ensemble: rrg3, wrrg3, or er.
    #[arg(long)]
    ensemble: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    /// Edge probability (er ensemble only).
    #[arg(long)]
    edge_prob: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config JSON; other flags override its output paths.
    #[arg(long, conflicts_with_all = ["graph", "ensemble"])]
    config: Option<PathBuf>,
    /// Single graph file to run on.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Sample an ensemble instead of loading a graph file.
    #[arg(long, requires = "n")]
    ensemble: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Number of ensemble instances.
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long)]
    edge_prob: Option<f64>,
    /// Comma-separated strategies: greedy, interp, tqa, global.
    #[arg(long, default_value = "greedy")]
    strategy: String,
    #[arg(long, default_value_t = 4)]
    p_max: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    tol_grad: f64,
    #[arg(long, default_value_t = 1000)]
    max_iter: usize,
    #[arg(long, default_value_t = 32)]
    grid_resolution: usize,
    /// Offset along the index-1 direction when leaving a saddle.
    #[arg(long, default_value_t = 1e-2)]
    eps: f64,
    /// Also expand non-symmetric transition states in the greedy sweep.
    #[arg(long)]
    use_nonsymmetric: bool,
    /// Exchange the ramp roles of the two angle families in the tqa init.
    #[arg(long)]
    tqa_swap: bool,
    /// Annealing-ramp step grid as start:stop:step.
    #[arg(long)]
    dt_grid: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct InitgraphArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 4)]
    p_max: usize,
    #[arg(long, default_value_t = 1e-5)]
    dedup_tol: f64,
    /// Expand at most this many lowest-energy nodes per level.
    #[arg(long, default_value_t = 50, conflicts_with = "full_expansion")]
    expand_cap: usize,
    /// Expand every node of every level.
    #[arg(long)]
    full_expansion: bool,
    #[arg(long, default_value_t = 1e-2)]
    eps: f64,
    #[arg(long, default_value_t = 32)]
    grid_resolution: usize,
    #[arg(long)]
    out: PathBuf,
    /// Also write a DOT rendering.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated qubit counts for the random-case checks.
    #[arg(long, default_value = "4,6,8")]
    sizes: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Random cases per check.
    #[arg(long, default_value_t = 20)]
    cases: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::GenGraph(args) => gen_graph(args),
        Command::Run(args) => run(args),
        Command::Initgraph(args) => initgraph(args),
        Command::Verify(args) => verify(args),
    }
}

fn gen_graph(args: GenGraphArgs) -> anyhow::Result<ExitCode> {
    let ensemble = Ensemble::from_str(&args.ensemble)?;
    let graph = generate_graph(ensemble, args.n, args.seed, args.edge_prob)?;
    std::fs::write(&args.out, graph.to_json()?)
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!(
        "wrote {} ({} vertices, {} edges)",
        args.out.display(),
        graph.n,
        graph.edge_count()
    );
    Ok(ExitCode::SUCCESS)
}

fn parse_strategies(text: &str) -> anyhow::Result<Vec<StrategyKind>> {
    text.split(',')
        .map(|s| StrategyKind::from_str(s.trim()).map_err(Into::into))
        .collect()
}

fn parse_dt_grid(text: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        bail!("dt grid must be start:stop:step, got '{text}'");
    }
    let (start, stop, step): (f64, f64, f64) =
        (parts[0].parse()?, parts[1].parse()?, parts[2].parse()?);
    if step <= 0.0 || stop < start {
        bail!("dt grid bounds are inconsistent");
    }
    let mut grid = Vec::new();
    let mut k = 0;
    loop {
        let v = start + step * k as f64;
        if v > stop + 1e-12 {
            break;
        }
        grid.push(v);
        k += 1;
    }
    Ok(grid)
}

fn run(args: RunArgs) -> anyhow::Result<ExitCode> {
    let results = if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        let mut cfg: ExperimentConfig = serde_json::from_str(&text)?;
        if args.out.is_some() {
            cfg.out.results = args.out.clone();
        }
        if args.csv.is_some() {
            cfg.out.csv = args.csv.clone();
        }
        run_experiment(&cfg)?
    } else {
        let strategies = parse_strategies(&args.strategy)?;
        let dt_grid = match &args.dt_grid {
            Some(text) => parse_dt_grid(text)?,
            None => default_dt_grid(),
        };
        let out = OutputPaths { results: args.out.clone(), csv: args.csv.clone() };
        let optimizer = OptimizerConfig {
            tol_grad: args.tol_grad,
            max_iter: args.max_iter,
            grid_resolution: args.grid_resolution,
        };
        if let Some(path) = &args.graph {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let graph = ProblemGraph::from_json(&text)?;
            let cfg = ExperimentConfig {
                schema_version: qaoa_landscape::problem::SCHEMA_VERSION.to_string(),
                ensemble: EnsembleSpec {
                    kind: graph.ensemble,
                    n: graph.n,
                    count: 1,
                    p_e: graph.p_e,
                    seeds: Some(vec![graph.seed]),
                },
                strategies,
                p_max: args.p_max,
                optimizer,
                eps: args.eps,
                dedup_tol: 1e-5,
                dt_grid,
                tqa_swap: args.tqa_swap,
                use_nonsymmetric: args.use_nonsymmetric,
                global_seed: args.seed,
                out,
            };
            run_on_graphs(&cfg, vec![graph])?
        } else if let Some(ens) = &args.ensemble {
            let cfg = ExperimentConfig {
                schema_version: qaoa_landscape::problem::SCHEMA_VERSION.to_string(),
                ensemble: EnsembleSpec {
                    kind: Ensemble::from_str(ens)?,
                    n: args.n.expect("clap enforces --n with --ensemble"),
                    count: args.count,
                    p_e: args.edge_prob,
                    seeds: None,
                },
                strategies,
                p_max: args.p_max,
                optimizer,
                eps: args.eps,
                dedup_tol: 1e-5,
                dt_grid,
                tqa_swap: args.tqa_swap,
                use_nonsymmetric: args.use_nonsymmetric,
                global_seed: args.seed,
                out,
            };
            run_experiment(&cfg)?
        } else {
            bail!("run needs one of --config, --graph, or --ensemble");
        }
    };

    write_outputs(&results)?;
    print!("{}", results.to_csv());
    let failed = results.failed_instances();
    if failed > 0 {
        eprintln!("{failed} of {} instances failed", results.instances.len());
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn initgraph(args: InitgraphArgs) -> anyhow::Result<ExitCode> {
    let text = std::fs::read_to_string(&args.graph)
        .with_context(|| format!("reading {}", args.graph.display()))?;
    let graph = ProblemGraph::from_json(&text)?;
    let opts = InitGraphOptions {
        dedup_tol: args.dedup_tol,
        expand_cap: if args.full_expansion { None } else { Some(args.expand_cap) },
        eps: args.eps,
        minimize: MinimizeOptions::classified(),
        grid_resolution: args.grid_resolution,
    };
    let init = build_init_graph(&graph, args.p_max, &opts)?;
    std::fs::write(&args.out, export_graph(&init, ExportFormat::Json)?)
        .with_context(|| format!("writing {}", args.out.display()))?;
    if let Some(dot) = &args.dot {
        std::fs::write(dot, export_graph(&init, ExportFormat::Dot)?)
            .with_context(|| format!("writing {}", dot.display()))?;
    }
    for (p, count, bound) in init.level_counts() {
        println!("level {p}: {count} unique minima (worst case {bound:.0})");
    }
    if let Some((a, rate)) = init.fit_exponential_growth() {
        println!("growth fit: {a:.3} * exp({rate:.3} p)");
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(args: VerifyArgs) -> anyhow::Result<ExitCode> {
    let sizes: Vec<usize> = args
        .sizes
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .context("parsing --sizes")?;
    let cfg = VerifyConfig { sizes, seed: args.seed, cases: args.cases };
    let report = verify_suite(&cfg)?;
    print!("{}", report.render());
    if report.all_passed() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(2))
    }
}
