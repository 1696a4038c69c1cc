//! The initialization graph: a leveled DAG whose level-p nodes are the
//! deduplicated minima of the depth-p landscape and whose edges record which
//! saddle descent produced each child.
//!
//! Level 1 holds the grid-search minimum. Expanding a level-p node builds its
//! p+1 symmetric transition states, descends both index-1 directions from
//! each, and files the converged minima into level p+1 after folding and
//! deduplication. Every child's energy is bounded by its parent's because
//! descent starts exactly at the parent energy.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::Error;
use crate::landscape::{
    classify_ts, construct_ts_with, fold_for_reporting, index1_direction, smoothness_score,
};
use crate::optimizer::{
    grid_search_p1, local_minimize_with, Classification, GridSearchOptions, MinimizeOptions,
    Provenance, StationaryPoint,
};
use crate::problem::{maxcut_optimum, ProblemGraph, SCHEMA_VERSION};
use crate::simulator::{approximation_ratio, AngleVector, Simulator};
use crate::Result;

/// One deduplicated minimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitGraphNode {
    pub id: usize,
    pub p: usize,
    /// Folded angles of the representative (lowest-energy member).
    pub angles: AngleVector,
    pub energy: f64,
    pub ratio: f64,
    pub smoothness: f64,
}

/// A descent edge from a level-p node to a level-(p+1) node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitGraphEdge {
    pub parent: usize,
    pub child: usize,
    /// 1-based insertion position of the zero phase angle.
    pub insert_gamma: usize,
    /// 1-based insertion position of the zero mixer angle.
    pub insert_beta: usize,
    /// +1 / -1: which side of the saddle the descent started from.
    pub branch: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitGraph {
    pub schema_version: String,
    pub nodes: Vec<InitGraphNode>,
    pub edges: Vec<InitGraphEdge>,
    /// Node ids per depth, in insertion order.
    pub levels: BTreeMap<usize, Vec<usize>>,
    /// Saddles skipped because of singular Hessians.
    pub singular_ts_count: usize,
    /// Descent branches that failed to converge (skipped, logged).
    pub failed_branches: usize,
}

impl InitGraph {
    pub fn node(&self, id: usize) -> &InitGraphNode {
        &self.nodes[id]
    }

    /// Minimum energy per level; non-increasing in depth.
    pub fn level_minima(&self) -> Vec<(usize, f64)> {
        self.levels
            .iter()
            .map(|(&p, ids)| {
                let e = ids.iter().map(|&id| self.nodes[id].energy).fold(f64::INFINITY, f64::min);
                (p, e)
            })
            .collect()
    }

    /// Unique-minima counts per level, paired with the worst-case count
    /// `2^(p-1) p!` the recursion would produce if no two descents ever met.
    pub fn level_counts(&self) -> Vec<(usize, usize, f64)> {
        self.levels
            .iter()
            .map(|(&p, ids)| (p, ids.len(), naive_minima_bound(p)))
            .collect()
    }

    /// Least-squares exponential fit `count ~ a * exp(rate * p)` over the
    /// levels with at least one node; returns `(a, rate)`.
    pub fn fit_exponential_growth(&self) -> Option<(f64, f64)> {
        let pts: Vec<(f64, f64)> = self
            .levels
            .iter()
            .filter(|(_, ids)| !ids.is_empty())
            .map(|(&p, ids)| (p as f64, (ids.len() as f64).ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let denom = n * sxx - sx * sx;
        if denom.abs() < 1e-12 {
            return None;
        }
        let rate = (n * sxy - sx * sy) / denom;
        let a = ((sy - rate * sx) / n).exp();
        Some((a, rate))
    }
}

/// `2^(p-1) p!` as a float (overflows usize quickly).
pub fn naive_minima_bound(p: usize) -> f64 {
    let factorial: f64 = (1..=p).map(|k| k as f64).product();
    2f64.powi(p as i32 - 1) * factorial
}

/// Options controlling graph construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InitGraphOptions {
    pub dedup_tol: f64,
    /// Expand at most this many lowest-energy nodes per level; `None` means
    /// full expansion.
    pub expand_cap: Option<usize>,
    pub eps: f64,
    pub minimize: MinimizeOptions,
    pub grid_resolution: usize,
}

impl Default for InitGraphOptions {
    fn default() -> Self {
        InitGraphOptions {
            dedup_tol: 1e-5,
            expand_cap: Some(50),
            eps: 1e-2,
            minimize: MinimizeOptions::classified(),
            grid_resolution: 32,
        }
    }
}

/// Deduplicates same-depth minima: two points are equivalent when their
/// folded angles are within `tol` in max-norm and their energies within
/// `10 * tol`. The representative of a class is its lowest-energy member.
/// Idempotent, and never drops the global best.
pub fn dedup_minima(
    graph: &ProblemGraph,
    points: Vec<StationaryPoint>,
    tol: f64,
) -> Vec<StationaryPoint> {
    dedup_with_assignment(graph, points, tol).0
}

/// Returns the representatives plus, for each input index, the index of its
/// representative in the output.
pub fn dedup_with_assignment(
    graph: &ProblemGraph,
    points: Vec<StationaryPoint>,
    tol: f64,
) -> (Vec<StationaryPoint>, Vec<usize>) {
    let folded: Vec<Vec<f64>> =
        points.iter().map(|pt| fold_for_reporting(graph, &pt.angles).to_flat()).collect();
    // Process lowest energy first so the first member of each class is its
    // representative (ties broken lexicographically for determinism).
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .energy
            .partial_cmp(&points[b].energy)
            .unwrap()
            .then_with(|| folded[a].partial_cmp(&folded[b]).unwrap())
    });
    let mut reps: Vec<usize> = Vec::new();
    let mut assignment = vec![usize::MAX; points.len()];
    for &idx in &order {
        let mut found = None;
        for (rep_pos, &rep_idx) in reps.iter().enumerate() {
            let angle_dist = folded[idx]
                .iter()
                .zip(&folded[rep_idx])
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            let energy_dist = (points[idx].energy - points[rep_idx].energy).abs();
            if angle_dist < tol && energy_dist < 10.0 * tol {
                found = Some(rep_pos);
                break;
            }
        }
        match found {
            Some(rep_pos) => assignment[idx] = rep_pos,
            None => {
                assignment[idx] = reps.len();
                reps.push(idx);
            }
        }
    }
    let out: Vec<StationaryPoint> = reps
        .iter()
        .map(|&idx| {
            let mut pt = points[idx].clone();
            pt.angles = AngleVector::from_flat(&folded[idx]).expect("folded vector is well-formed");
            pt
        })
        .collect();
    (out, assignment)
}

/// Builds the initialization graph up to `p_max` levels.
pub fn build_init_graph(
    graph: &ProblemGraph,
    p_max: usize,
    opts: &InitGraphOptions,
) -> Result<InitGraph> {
    if p_max < 2 {
        return Err(Error::contract("the initialization graph needs p_max >= 2"));
    }
    if opts.dedup_tol <= 0.0 {
        return Err(Error::contract("dedup tolerance must be positive"));
    }
    let sim = Simulator::new(graph)?;
    let (c_min, _) = maxcut_optimum(graph)?;
    let mut out = InitGraph {
        schema_version: SCHEMA_VERSION.to_string(),
        nodes: Vec::new(),
        edges: Vec::new(),
        levels: BTreeMap::new(),
        singular_ts_count: 0,
        failed_branches: 0,
    };

    let grid_opts = GridSearchOptions {
        resolution: opts.grid_resolution,
        minimize: MinimizeOptions { classify: true, ..opts.minimize },
    };
    let root = grid_search_p1(graph, &grid_opts)?;
    let mut current_level: Vec<StationaryPoint> = vec![root];
    push_level(graph, &mut out, 1, &current_level, c_min)?;

    for p in 1..p_max {
        let level_ids = out.levels[&p].clone();
        // Expansion order: lowest energy first, so a cap keeps the most
        // promising nodes.
        let mut expand: Vec<(usize, StationaryPoint)> = level_ids
            .iter()
            .cloned()
            .zip(current_level.iter().cloned())
            .collect();
        expand.sort_by(|a, b| a.1.energy.partial_cmp(&b.1.energy).unwrap());
        if let Some(cap) = opts.expand_cap {
            expand.truncate(cap);
        }

        let mut raw_children: Vec<StationaryPoint> = Vec::new();
        let mut raw_edges: Vec<(usize, usize, usize, i8)> = Vec::new(); // (parent, i, j, branch)
        for (parent_id, parent) in &expand {
            for i in 1..=(p + 1) {
                let ts = construct_ts_with(&sim, parent, i, i, *parent_id)?;
                let (class, hess) = classify_ts(&sim, &ts)?;
                match class {
                    Classification::TransitionState => {}
                    Classification::Singular => {
                        out.singular_ts_count += 1;
                        continue;
                    }
                    _ => continue,
                }
                let dir = index1_direction(&hess)?;
                let flat = ts.angles.to_flat();
                for sign in [1.0f64, -1.0] {
                    let start: Vec<f64> =
                        flat.iter().zip(&dir).map(|(x, d)| x + sign * opts.eps * d).collect();
                    let provenance = if sign > 0.0 {
                        Provenance::TsDescentPlus
                    } else {
                        Provenance::TsDescentMinus
                    };
                    let mut run_opts = opts.minimize;
                    run_opts.classify = true;
                    let child = local_minimize_with(
                        &sim,
                        &AngleVector::from_flat(&start)?,
                        &run_opts,
                        provenance,
                    )?;
                    if !child.converged || child.classification != Classification::Minimum {
                        out.failed_branches += 1;
                        continue;
                    }
                    debug_assert!(child.energy <= parent.energy + 1e-9);
                    raw_children.push(child);
                    raw_edges.push((*parent_id, i, i, if sign > 0.0 { 1 } else { -1 }));
                }
            }
        }
        if raw_children.is_empty() {
            break;
        }
        let (reps, assignment) = dedup_with_assignment(graph, raw_children, opts.dedup_tol);
        let first_new_id = out.nodes.len();
        push_level(graph, &mut out, p + 1, &reps, c_min)?;
        for (raw_idx, (parent_id, i, j, branch)) in raw_edges.into_iter().enumerate() {
            out.edges.push(InitGraphEdge {
                parent: parent_id,
                child: first_new_id + assignment[raw_idx],
                insert_gamma: i,
                insert_beta: j,
                branch,
            });
        }
        current_level = reps;
    }
    Ok(out)
}

fn push_level(
    graph: &ProblemGraph,
    out: &mut InitGraph,
    p: usize,
    points: &[StationaryPoint],
    c_min: f64,
) -> Result<()> {
    let mut ids = Vec::with_capacity(points.len());
    for pt in points {
        let id = out.nodes.len();
        let angles = fold_for_reporting(graph, &pt.angles);
        out.nodes.push(InitGraphNode {
            id,
            p,
            smoothness: smoothness_score(&angles),
            angles,
            energy: pt.energy,
            ratio: approximation_ratio(pt.energy, c_min)?,
        });
        ids.push(id);
    }
    out.levels.insert(p, ids);
    Ok(())
}

/// Export format selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Json,
}

/// Serializes the graph: DOT with depth-ranked clusters and `(p, ratio)`
/// labels, or JSON mirroring the full data model (round-trips exactly).
pub fn export_graph(graph: &InitGraph, format: ExportFormat) -> Result<Vec<u8>> {
    match format {
        ExportFormat::Json => Ok(serde_json::to_vec_pretty(graph)?),
        ExportFormat::Dot => {
            use std::fmt::Write;
            let mut s = String::new();
            writeln!(s, "digraph initgraph {{").unwrap();
            writeln!(s, "  rankdir=TB;").unwrap();
            writeln!(s, "  node [shape=ellipse, fontsize=10];").unwrap();
            for (p, ids) in &graph.levels {
                writeln!(s, "  {{ rank=same; /* depth {p} */").unwrap();
                for &id in ids {
                    let node = &graph.nodes[id];
                    writeln!(s, "    n{id} [label=\"p={} r={:.4}\"];", node.p, node.ratio).unwrap();
                }
                writeln!(s, "  }}").unwrap();
            }
            for e in &graph.edges {
                let sign = if e.branch > 0 { "+" } else { "-" };
                writeln!(
                    s,
                    "  n{} -> n{} [label=\"i={}{}\"];",
                    e.parent, e.child, e.insert_gamma, sign
                )
                .unwrap();
            }
            writeln!(s, "}}").unwrap();
            Ok(s.into_bytes())
        }
    }
}

/// Parses a JSON export back into an [`InitGraph`].
pub fn import_graph_json(bytes: &[u8]) -> Result<InitGraph> {
    let graph: InitGraph = serde_json::from_slice(bytes)?;
    if graph.schema_version != SCHEMA_VERSION {
        return Err(Error::Format(format!(
            "unsupported schema version '{}'",
            graph.schema_version
        )));
    }
    Ok(graph)
}
