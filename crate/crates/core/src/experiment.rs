//! Ensemble experiments: configuration, parallel instance sweeps, and
//! aggregation into the summary table.
//!
//! An experiment runs a list of strategies on a set of graph instances and
//! aggregates approximation ratios per `(strategy, depth)`. Instances run in
//! parallel; results are keyed by instance index so the output is identical
//! regardless of the degree of parallelism. The CSV summary is fully
//! deterministic; per-run JSON additionally records wall-clock times.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use crate::error::Error;
use crate::problem::{generate_ensemble, maxcut_optimum, Ensemble, ProblemGraph, SCHEMA_VERSION};
use crate::rng::derive_seed;
use crate::strategies::{
    default_dt_grid, run_strategy, StrategyKind, StrategyOptions, StrategyRun,
};
use crate::Result;

/// Which graphs an experiment runs on: a sampled ensemble or explicit files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub kind: Ensemble,
    pub n: usize,
    pub count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_e: Option<f64>,
    /// Explicit per-instance seeds; derived from the global seed when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub tol_grad: f64,
    pub max_iter: usize,
    pub grid_resolution: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig { tol_grad: 1e-8, max_iter: 1000, grid_resolution: 32 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OutputPaths {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub results: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

/// Full experiment description; round-trips losslessly through JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_schema")]
    pub schema_version: String,
    pub ensemble: EnsembleSpec,
    pub strategies: Vec<StrategyKind>,
    pub p_max: usize,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_dedup_tol")]
    pub dedup_tol: f64,
    #[serde(default = "default_dt_grid")]
    pub dt_grid: Vec<f64>,
    #[serde(default)]
    pub tqa_swap: bool,
    #[serde(default)]
    pub use_nonsymmetric: bool,
    pub global_seed: u64,
    #[serde(default)]
    pub out: OutputPaths,
}

fn default_schema() -> String {
    SCHEMA_VERSION.to_string()
}

fn default_eps() -> f64 {
    1e-2
}

fn default_dedup_tol() -> f64 {
    1e-5
}

impl ExperimentConfig {
    pub fn strategy_options(&self, instance_seed: u64) -> StrategyOptions {
        StrategyOptions {
            minimize: crate::optimizer::MinimizeOptions {
                tol_grad: self.optimizer.tol_grad,
                max_iter: self.optimizer.max_iter,
                classify: true,
            },
            grid_resolution: self.optimizer.grid_resolution,
            eps: self.eps,
            use_nonsymmetric: self.use_nonsymmetric,
            tqa_swap: self.tqa_swap,
            dt_grid: self.dt_grid.clone(),
            seed: instance_seed,
            ..StrategyOptions::default()
        }
    }

    /// Seeds for each instance: explicit list, or derived from the global
    /// seed in counter mode.
    pub fn instance_seeds(&self) -> Result<Vec<u64>> {
        match &self.ensemble.seeds {
            Some(seeds) => {
                if seeds.len() != self.ensemble.count {
                    return Err(Error::contract(format!(
                        "expected {} explicit seeds, got {}",
                        self.ensemble.count,
                        seeds.len()
                    )));
                }
                Ok(seeds.clone())
            }
            None => Ok((0..self.ensemble.count as u64)
                .map(|i| derive_seed(self.global_seed, i))
                .collect()),
        }
    }
}

/// Per-instance outcome: the strategy runs, or the error that stopped them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceResult {
    pub index: usize,
    pub seed: u64,
    pub graph: ProblemGraph,
    pub c_min: f64,
    pub runs: Vec<StrategyRun>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// One row of the aggregate table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub strategy: StrategyKind,
    pub p: usize,
    pub mean_ratio: f64,
    pub std_ratio: f64,
    pub n_instances: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentResults {
    pub schema_version: String,
    pub config: ExperimentConfig,
    pub instances: Vec<InstanceResult>,
    pub aggregates: Vec<AggregateRow>,
}

impl ExperimentResults {
    pub fn failed_instances(&self) -> usize {
        self.instances.iter().filter(|i| i.error.is_some()).count()
    }

    /// `strategy,p,mean_ratio,std_ratio,n_instances` rows sorted by
    /// (strategy name, depth). Byte-identical across reruns of the same
    /// config.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("strategy,p,mean_ratio,std_ratio,n_instances\n");
        for row in &self.aggregates {
            s.push_str(&format!(
                "{},{},{:.12},{:.12},{}\n",
                row.strategy.as_str(),
                row.p,
                row.mean_ratio,
                row.std_ratio,
                row.n_instances
            ));
        }
        s
    }
}

/// Runs every requested strategy on every instance and aggregates ratios.
///
/// Failures are recorded per instance; the call errs only when every
/// instance failed.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResults> {
    let graphs = match &cfg.ensemble.seeds {
        Some(seeds) => seeds
            .iter()
            .map(|&s| crate::problem::generate_graph(cfg.ensemble.kind, cfg.ensemble.n, s, cfg.ensemble.p_e))
            .collect::<Result<Vec<_>>>()?,
        None => generate_ensemble(
            cfg.ensemble.kind,
            cfg.ensemble.n,
            cfg.ensemble.count,
            cfg.global_seed,
            cfg.ensemble.p_e,
        )?,
    };
    run_on_graphs(cfg, graphs)
}

/// Same as [`run_experiment`] but on an explicit list of graphs (e.g. loaded
/// from files instead of regenerated from seeds).
pub fn run_on_graphs(cfg: &ExperimentConfig, graphs: Vec<ProblemGraph>) -> Result<ExperimentResults> {
    if graphs.len() != cfg.ensemble.count {
        return Err(Error::contract(format!(
            "config names {} instances but {} graphs were provided",
            cfg.ensemble.count,
            graphs.len()
        )));
    }
    let seeds = cfg.instance_seeds()?;
    let mut instances: Vec<InstanceResult> = graphs
        .into_par_iter()
        .enumerate()
        .map(|(index, graph)| run_instance(cfg, index, seeds[index], graph))
        .collect();
    instances.sort_by_key(|i| i.index);

    if instances.iter().all(|i| i.error.is_some()) {
        return Err(Error::AllStartsFailed("every instance failed".into()));
    }
    let aggregates = aggregate(cfg, &instances);
    Ok(ExperimentResults {
        schema_version: SCHEMA_VERSION.to_string(),
        config: cfg.clone(),
        instances,
        aggregates,
    })
}

fn run_instance(cfg: &ExperimentConfig, index: usize, seed: u64, graph: ProblemGraph) -> InstanceResult {
    let opts = cfg.strategy_options(seed);
    let c_min = match maxcut_optimum(&graph) {
        Ok((c, _)) => c,
        Err(e) => {
            return InstanceResult {
                index,
                seed,
                graph,
                c_min: f64::NAN,
                runs: vec![],
                error: Some(e.to_string()),
            }
        }
    };
    let mut runs = Vec::new();
    let mut error = None;
    for &strategy in &cfg.strategies {
        match run_strategy(&graph, strategy, cfg.p_max, &opts) {
            Ok(run) => runs.push(run),
            Err(e) => {
                error = Some(format!("{}: {e}", strategy.as_str()));
                break;
            }
        }
    }
    InstanceResult { index, seed, graph, c_min, runs, error }
}

fn aggregate(cfg: &ExperimentConfig, instances: &[InstanceResult]) -> Vec<AggregateRow> {
    let mut rows = Vec::new();
    let mut strategies = cfg.strategies.clone();
    strategies.sort_by_key(|s| s.as_str());
    for strategy in strategies {
        for p in 1..=cfg.p_max {
            let ratios: Vec<f64> = instances
                .iter()
                .filter(|i| i.error.is_none())
                .flat_map(|i| i.runs.iter().filter(|r| r.strategy == strategy))
                .flat_map(|r| r.per_depth.iter().filter(|d| d.p == p))
                .map(|d| d.ratio)
                .collect();
            if ratios.is_empty() {
                continue;
            }
            let n = ratios.len();
            let mean = ratios.iter().sum::<f64>() / n as f64;
            let var = if n > 1 {
                ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1) as f64
            } else {
                0.0
            };
            rows.push(AggregateRow {
                strategy,
                p,
                mean_ratio: mean,
                std_ratio: var.sqrt(),
                n_instances: n,
            });
        }
    }
    rows
}

/// Writes the results bundle and CSV to the paths named in the config.
pub fn write_outputs(results: &ExperimentResults) -> Result<()> {
    if let Some(path) = &results.config.out.results {
        std::fs::write(path, serde_json::to_vec_pretty(results)?)?;
    }
    if let Some(path) = &results.config.out.csv {
        std::fs::write(path, results.to_csv())?;
    }
    Ok(())
}
