//! MaxCut problem instances: graph ensembles, the cost diagonal, and the
//! exact optimum.
//!
//! The cost Hamiltonian is `H_C = sum_{(u,v) in E} w_uv Z_u Z_v`, a diagonal
//! operator in the computational basis. For basis index `z`, qubit `k`
//! contributes the spin `s_k(z) = +1` if bit `k` of `z` is 0 and `-1`
//! otherwise, so the diagonal entry is `sum w_uv s_u(z) s_v(z)`. Solving
//! MaxCut is finding the basis states that minimize this diagonal.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::rng::{derive_seed, SplitMix64};
use crate::Result;

/// Largest qubit count the dense diagonal/statevector code paths accept.
pub const MAX_QUBITS: usize = 24;

/// Version tag embedded in every JSON file this crate emits.
pub const SCHEMA_VERSION: &str = "1";

/// Supported random-graph ensembles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ensemble {
    /// Random 3-regular graph, unit weights.
    Rrg3,
    /// Random 3-regular graph with i.i.d. weights in [0, 1).
    Wrrg3,
    /// Erdos-Renyi graph: each pair present independently with probability `p_e`.
    Er,
}

impl Ensemble {
    pub fn as_str(&self) -> &'static str {
        match self {
            Ensemble::Rrg3 => "rrg3",
            Ensemble::Wrrg3 => "wrrg3",
            Ensemble::Er => "er",
        }
    }
}

impl std::str::FromStr for Ensemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rrg3" => Ok(Ensemble::Rrg3),
            "wrrg3" => Ok(Ensemble::Wrrg3),
            "er" => Ok(Ensemble::Er),
            other => Err(Error::Format(format!("unknown ensemble '{other}'"))),
        }
    }
}

/// A weighted undirected graph defining one MaxCut instance.
///
/// Edges are stored as `(u, v, w)` with `u < v`, sorted lexicographically;
/// no self-loops or duplicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemGraph {
    pub n: usize,
    pub ensemble: Ensemble,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_e: Option<f64>,
    pub edges: Vec<(usize, usize, f64)>,
}

impl ProblemGraph {
    /// Builds a graph from an explicit edge list (normalizing edge order) and
    /// validates the basic invariants.
    pub fn from_edges(
        n: usize,
        ensemble: Ensemble,
        seed: u64,
        p_e: Option<f64>,
        edges: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        let mut norm: Vec<(usize, usize, f64)> = Vec::with_capacity(edges.len());
        for (u, v, w) in edges {
            if u == v {
                return Err(Error::contract(format!("self-loop at vertex {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::contract(format!("edge ({u},{v}) out of range for n={n}")));
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            norm.push((a, b, w));
        }
        norm.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
        if norm.windows(2).any(|p| (p[0].0, p[0].1) == (p[1].0, p[1].1)) {
            return Err(Error::contract("duplicate edge".to_string()));
        }
        Ok(ProblemGraph { n, ensemble, seed, p_e, edges: norm })
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.2).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for &(u, v, _) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// True when every vertex has odd degree and all weights are exactly 1.
    /// This is the condition under which the half-period gamma symmetry of
    /// the energy landscape holds, enabling the tighter fundamental region.
    pub fn is_odd_regular_unweighted(&self) -> bool {
        self.has_unit_weights() && self.degrees().iter().all(|&d| d % 2 == 1)
    }

    pub fn has_unit_weights(&self) -> bool {
        self.edges.iter().all(|e| e.2 == 1.0)
    }

    /// Whether all weights are integers (gamma is then periodic with period pi).
    pub fn has_integer_weights(&self) -> bool {
        self.edges.iter().all(|e| e.2.fract() == 0.0)
    }

    /// Sorted eigenvalue spectrum of the weighted adjacency matrix. Used as a
    /// cheap isomorphism-collision check when sampling ensembles: isomorphic
    /// graphs share the spectrum, so distinct spectra certify distinct graphs.
    pub fn adjacency_spectrum(&self) -> Vec<f64> {
        let mut m = nalgebra::DMatrix::<f64>::zeros(self.n, self.n);
        for &(u, v, w) in &self.edges {
            m[(u, v)] = w;
            m[(v, u)] = w;
        }
        let mut eig: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
        eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
        eig
    }

    /// Serializes to the graph file format:
    /// `{schema_version, n, ensemble, seed, p_E?, edges: [[u, v, w], ...]}`.
    pub fn to_json(&self) -> Result<String> {
        let file = GraphFile {
            schema_version: SCHEMA_VERSION.to_string(),
            n: self.n,
            ensemble: self.ensemble,
            seed: self.seed,
            p_e: self.p_e,
            edges: self.edges.iter().map(|&(u, v, w)| (u, v, w)).collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text)?;
        ProblemGraph::from_edges(file.n, file.ensemble, file.seed, file.p_e, file.edges)
    }
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    #[serde(default = "default_schema")]
    schema_version: String,
    n: usize,
    ensemble: Ensemble,
    seed: u64,
    #[serde(rename = "p_E", default, skip_serializing_if = "Option::is_none")]
    p_e: Option<f64>,
    edges: Vec<(usize, usize, f64)>,
}

fn default_schema() -> String {
    SCHEMA_VERSION.to_string()
}

const REGULAR_DEGREE: usize = 3;
const CONFIG_MODEL_RETRIES: usize = 10_000;

/// Samples a graph from the requested ensemble. Deterministic for fixed
/// `(ensemble, n, seed, p_e)`.
pub fn generate_graph(ensemble: Ensemble, n: usize, seed: u64, p_e: Option<f64>) -> Result<ProblemGraph> {
    if n < 2 {
        return Err(Error::contract(format!("need at least 2 vertices, got {n}")));
    }
    match ensemble {
        Ensemble::Rrg3 => {
            let edges = random_regular_edges(n, REGULAR_DEGREE, seed)?;
            ProblemGraph::from_edges(n, ensemble, seed, None, edges)
        }
        Ensemble::Wrrg3 => {
            let mut edges = random_regular_edges(n, REGULAR_DEGREE, seed)?;
            // Weights are drawn after the topology is accepted, in sorted
            // edge order, from a stream decoupled from the topology sampler.
            let mut rng = SplitMix64::new(derive_seed(seed, 0x77));
            edges.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
            for e in &mut edges {
                e.2 = rng.next_f64();
            }
            ProblemGraph::from_edges(n, ensemble, seed, None, edges)
        }
        Ensemble::Er => {
            let p = p_e.ok_or_else(|| Error::contract("ER ensemble requires p_e"))?;
            if !(0.0 < p && p < 1.0) {
                return Err(Error::contract(format!("p_e must lie in (0, 1), got {p}")));
            }
            let mut rng = SplitMix64::new(seed);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.next_f64() < p {
                        edges.push((u, v, 1.0));
                    }
                }
            }
            ProblemGraph::from_edges(n, ensemble, seed, Some(p), edges)
        }
    }
}

/// Configuration model with rejection: shuffle the stub multiset, pair stubs
/// halfway across, reject on self-loops or multi-edges, retry.
fn random_regular_edges(n: usize, degree: usize, seed: u64) -> Result<Vec<(usize, usize, f64)>> {
    if n * degree % 2 != 0 || n <= degree {
        return Err(Error::InfeasibleRegularGraph { n, degree });
    }
    let mut rng = SplitMix64::new(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(degree)).collect();
    let half = stubs.len() / 2;
    'attempt: for _ in 0..CONFIG_MODEL_RETRIES {
        rng.shuffle(&mut stubs);
        let mut seen = std::collections::HashSet::with_capacity(half);
        let mut edges = Vec::with_capacity(half);
        for i in 0..half {
            let (u, v) = (stubs[i], stubs[i + half]);
            if u == v {
                continue 'attempt;
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                continue 'attempt;
            }
            edges.push((key.0, key.1, 1.0));
        }
        return Ok(edges);
    }
    Err(Error::GenerationBudgetExceeded { n, degree, attempts: CONFIG_MODEL_RETRIES })
}

/// Samples `count` instances with per-index seeds derived from `global_seed`,
/// re-seeding any instance whose adjacency spectrum collides with an earlier
/// one (spectral collision is a cheap stand-in for an isomorphism test).
pub fn generate_ensemble(
    ensemble: Ensemble,
    n: usize,
    count: usize,
    global_seed: u64,
    p_e: Option<f64>,
) -> Result<Vec<ProblemGraph>> {
    const SPECTRUM_TOL: f64 = 1e-9;
    let mut graphs: Vec<ProblemGraph> = Vec::with_capacity(count);
    let mut spectra: Vec<Vec<f64>> = Vec::with_capacity(count);
    for index in 0..count as u64 {
        let mut seed = derive_seed(global_seed, index);
        loop {
            let g = generate_graph(ensemble, n, seed, p_e)?;
            let spec = g.adjacency_spectrum();
            let collides = spectra.iter().any(|s| {
                s.len() == spec.len()
                    && s.iter().zip(&spec).all(|(a, b)| (a - b).abs() < SPECTRUM_TOL)
            });
            if collides {
                seed = derive_seed(seed, 0xC0111DE);
                continue;
            }
            spectra.push(spec);
            graphs.push(g);
            break;
        }
    }
    Ok(graphs)
}

/// The cost Hamiltonian as a dense diagonal over the computational basis.
#[derive(Debug, Clone)]
pub struct CostDiagonal {
    pub n: usize,
    pub values: Vec<f64>,
    pub c_min: f64,
    pub c_max: f64,
}

/// Evaluates the full `2^n` cost diagonal.
pub fn cost_diagonal(g: &ProblemGraph) -> Result<CostDiagonal> {
    if g.n > MAX_QUBITS {
        return Err(Error::Capacity { n: g.n, max: MAX_QUBITS });
    }
    let dim = 1usize << g.n;
    let mut values = vec![0.0f64; dim];
    for &(u, v, w) in &g.edges {
        let mu = 1usize << u;
        let mv = 1usize << v;
        for (z, val) in values.iter_mut().enumerate() {
            // s_u * s_v = +1 when bits u and v agree, -1 otherwise.
            let aligned = ((z & mu) == 0) == ((z & mv) == 0);
            *val += if aligned { w } else { -w };
        }
    }
    let mut c_min = f64::INFINITY;
    let mut c_max = f64::NEG_INFINITY;
    for &v in &values {
        c_min = c_min.min(v);
        c_max = c_max.max(v);
    }
    Ok(CostDiagonal { n: g.n, values, c_min, c_max })
}

/// Exact MaxCut optimum: the minimal diagonal entry together with every basis
/// state attaining it. The argmin set is closed under global bit-flip.
pub fn maxcut_optimum(g: &ProblemGraph) -> Result<(f64, Vec<usize>)> {
    let diag = cost_diagonal(g)?;
    let argmin: Vec<usize> = diag
        .values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v == diag.c_min)
        .map(|(z, _)| z)
        .collect();
    Ok((diag.c_min, argmin))
}
