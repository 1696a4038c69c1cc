//! Quasi-Newton local minimization and the depth-1 grid search.
//!
//! The minimizer is a dense BFGS with a strong-Wolfe line search (bracketing
//! phase plus bisection zoom) and a Newton finisher for the endgame where
//! energy differences drop below fp resolution. It is fully deterministic:
//! no randomized restarts, no time-dependent behavior, so a fixed start and
//! fixed options reproduce the trajectory bit for bit.
//! Angles are optimized unconstrained; symmetry folding is applied only when
//! reporting results.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::landscape::fold_for_reporting;
use crate::problem::ProblemGraph;
use crate::simulator::{inf_norm, AngleVector, Inertia, Simulator};
use crate::Result;

/// Classification of a converged stationary point by Hessian inertia.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Minimum,
    TransitionState,
    /// Hessian has eigenvalues below the zero tolerance; inertia unreliable.
    Singular,
    /// Stationary but neither minimum nor index-1 saddle.
    Other,
    /// Not classified (no Hessian requested, or the run did not converge).
    Unclassified,
}

/// How a stationary point was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Grid,
    TsDescentPlus,
    TsDescentMinus,
    Interp,
    Tqa,
    Random,
}

/// A converged (or best-effort) stationary point of the energy landscape.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StationaryPoint {
    pub angles: AngleVector,
    pub energy: f64,
    /// Infinity norm of the gradient at `angles`.
    pub grad_norm: f64,
    pub inertia: Option<Inertia>,
    pub classification: Classification,
    pub iterations: usize,
    pub provenance: Provenance,
    pub converged: bool,
}

impl StationaryPoint {
    pub fn depth(&self) -> usize {
        self.angles.depth()
    }

    pub fn is_minimum(&self) -> bool {
        self.classification == Classification::Minimum
    }
}

/// Options for [`local_minimize`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MinimizeOptions {
    /// Convergence threshold on the gradient infinity norm.
    pub tol_grad: f64,
    pub max_iter: usize,
    /// Compute the Hessian at the converged point and classify it.
    pub classify: bool,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions { tol_grad: 1e-8, max_iter: 1000, classify: false }
    }
}

impl MinimizeOptions {
    pub fn classified() -> Self {
        MinimizeOptions { classify: true, ..Default::default() }
    }
}

const WOLFE_C1: f64 = 1e-4;
const WOLFE_C2: f64 = 0.9;
const MAX_LINE_SEARCH_STEPS: usize = 40;
/// Below this gradient norm a failed line search switches to bare
/// quasi-Newton steps: near the minimum the energy differences fall under
/// the fp noise floor, so sufficient-decrease tests stop being meaningful
/// while the (exact) gradient still has plenty of signal.
const POLISH_GRAD_THRESHOLD: f64 = 1e-4;

struct Objective<'a> {
    sim: &'a Simulator,
}

impl Objective<'_> {
    fn value_and_grad(&self, x: &[f64]) -> (f64, Vec<f64>) {
        self.sim.energy_and_gradient(&AngleVector::from_flat(x).expect("even-length flat vector"))
    }
}

/// BFGS from `init`, unconstrained in angle space.
///
/// Returns a point with `converged = true` and `grad_norm < tol_grad`, or,
/// when the iteration budget runs out or the line search stalls, the best
/// point seen flagged `converged = false` and left `Unclassified`.
pub fn local_minimize(
    graph: &ProblemGraph,
    init: &AngleVector,
    opts: &MinimizeOptions,
) -> Result<StationaryPoint> {
    let sim = Simulator::new(graph)?;
    local_minimize_with(&sim, init, opts, Provenance::Random)
}

/// Same as [`local_minimize`] but reuses a prepared simulator and records the
/// provenance of the start point.
pub fn local_minimize_with(
    sim: &Simulator,
    init: &AngleVector,
    opts: &MinimizeOptions,
    provenance: Provenance,
) -> Result<StationaryPoint> {
    if init.depth() == 0 {
        return Err(Error::contract("cannot optimize a depth-0 angle vector"));
    }
    let obj = Objective { sim };
    let dim = 2 * init.depth();
    let mut x = init.to_flat();
    let (mut fx, mut grad) = obj.value_and_grad(&x);
    let mut h_inv = nalgebra::DMatrix::<f64>::identity(dim, dim);
    let mut scaled = false;
    let mut iterations = 0usize;
    let mut converged = inf_norm(&grad) < opts.tol_grad;

    while !converged && iterations < opts.max_iter {
        iterations += 1;
        let g = nalgebra::DVector::from_column_slice(&grad);
        let mut dir = -(&h_inv * &g);
        if dir.dot(&g) >= 0.0 {
            // Not a descent direction (stale curvature); fall back to steepest
            // descent and rebuild the approximation from scratch.
            h_inv = nalgebra::DMatrix::identity(dim, dim);
            scaled = false;
            dir = -g.clone();
        }
        let step = match line_search_strong_wolfe(&obj, &x, fx, &grad, dir.as_slice()) {
            Some(step) => step,
            None if inf_norm(&grad) <= POLISH_GRAD_THRESHOLD => {
                // Energy differences are below fp resolution here; finish by
                // driving the gradient itself to zero.
                match newton_polish(sim, &obj, &x, &grad, opts.tol_grad) {
                    Some(step) => step,
                    None => break,
                }
            }
            None => {
                if scaled || h_inv != nalgebra::DMatrix::identity(dim, dim) {
                    h_inv = nalgebra::DMatrix::identity(dim, dim);
                    scaled = false;
                    let dir = grad.iter().map(|v| -v).collect::<Vec<_>>();
                    match line_search_strong_wolfe(&obj, &x, fx, &grad, &dir) {
                        Some(step) => step,
                        None => break,
                    }
                } else {
                    break;
                }
            }
        };
        let s: Vec<f64> = step.x.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = step.grad.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        let yy: f64 = y.iter().map(|v| v * v).sum();
        if !scaled && sy > 0.0 && yy > 0.0 {
            h_inv = nalgebra::DMatrix::identity(dim, dim) * (sy / yy);
            scaled = true;
        }
        let s_norm = s.iter().map(|v| v * v).sum::<f64>().sqrt();
        let y_norm = yy.sqrt();
        if sy > 1e-12 * s_norm * y_norm {
            bfgs_update(&mut h_inv, &s, &y, sy);
        }
        x = step.x;
        fx = step.value;
        grad = step.grad;
        converged = inf_norm(&grad) < opts.tol_grad;
    }

    let grad_norm = inf_norm(&grad);
    let angles = AngleVector::from_flat(&x)?;
    let mut point = StationaryPoint {
        angles,
        energy: fx,
        grad_norm,
        inertia: None,
        classification: Classification::Unclassified,
        iterations,
        provenance,
        converged,
    };
    if converged && opts.classify {
        classify_in_place(sim, &mut point)?;
    }
    Ok(point)
}

/// Computes the Hessian at the point and fills in inertia + classification.
pub fn classify_in_place(sim: &Simulator, point: &mut StationaryPoint) -> Result<()> {
    let hess = sim.hessian(&point.angles, None)?;
    let dim = 2 * point.depth();
    let inertia = hess.inertia;
    point.inertia = Some(inertia);
    point.classification = if inertia.n_zero > 0 {
        Classification::Singular
    } else if inertia.n_pos == dim {
        Classification::Minimum
    } else if inertia.n_neg == 1 && inertia.n_pos == dim - 1 {
        Classification::TransitionState
    } else {
        Classification::Other
    };
    Ok(())
}

struct LineSearchPoint {
    x: Vec<f64>,
    value: f64,
    grad: Vec<f64>,
}

/// Newton iteration on the stationarity system `grad(x) = 0`, using the
/// finite-difference Hessian of the analytic gradient and backtracking on
/// the gradient norm. Converges quadratically near a non-degenerate
/// stationary point where energy-based line searches have run out of fp
/// resolution. Returns `None` when no backtracked step shrinks the gradient.
fn newton_polish(
    sim: &Simulator,
    obj: &Objective<'_>,
    x0: &[f64],
    g0: &[f64],
    tol_grad: f64,
) -> Option<LineSearchPoint> {
    const MAX_NEWTON_STEPS: usize = 30;
    const MAX_BACKTRACKS: u32 = 8;
    let mut x = x0.to_vec();
    let mut grad = g0.to_vec();
    for _ in 0..MAX_NEWTON_STEPS {
        if inf_norm(&grad) < tol_grad {
            let (value, grad) = obj.value_and_grad(&x);
            return Some(LineSearchPoint { x, value, grad });
        }
        let angles = AngleVector::from_flat(&x).ok()?;
        let hess = sim.hessian(&angles, None).ok()?;
        let rhs = -nalgebra::DVector::from_column_slice(&grad);
        let step = hess.matrix.clone().lu().solve(&rhs)?;
        let mut improved = false;
        for k in 0..=MAX_BACKTRACKS {
            let alpha = 0.5f64.powi(k as i32);
            let x_try: Vec<f64> =
                x.iter().zip(step.iter()).map(|(a, s)| a + alpha * s).collect();
            let (_, g_try) = obj.value_and_grad(&x_try);
            if inf_norm(&g_try) < inf_norm(&grad) {
                x = x_try;
                grad = g_try;
                improved = true;
                break;
            }
        }
        if !improved {
            return None;
        }
    }
    if inf_norm(&grad) < tol_grad {
        let (value, grad) = obj.value_and_grad(&x);
        return Some(LineSearchPoint { x, value, grad });
    }
    None
}

/// Strong-Wolfe line search (sufficient decrease + curvature), bracketing
/// phase followed by bisection zoom. Returns the accepted point or `None`.
fn line_search_strong_wolfe(
    obj: &Objective<'_>,
    x0: &[f64],
    f0: f64,
    g0: &[f64],
    dir: &[f64],
) -> Option<LineSearchPoint> {
    let d0: f64 = g0.iter().zip(dir).map(|(a, b)| a * b).sum();
    if d0 >= 0.0 {
        return None;
    }
    let eval = |alpha: f64| -> (Vec<f64>, f64, Vec<f64>, f64) {
        let x: Vec<f64> = x0.iter().zip(dir).map(|(a, b)| a + alpha * b).collect();
        let (v, g) = obj.value_and_grad(&x);
        let slope = g.iter().zip(dir).map(|(a, b)| a * b).sum();
        (x, v, g, slope)
    };

    let mut alpha_prev = 0.0f64;
    let mut f_prev = f0;
    let mut alpha = 1.0f64;
    let alpha_max = 64.0f64;

    for i in 0..MAX_LINE_SEARCH_STEPS {
        let (x, f, g, slope) = eval(alpha);
        if f > f0 + WOLFE_C1 * alpha * d0 || (i > 0 && f >= f_prev) {
            return zoom(obj, x0, f0, d0, dir, alpha_prev, f_prev, alpha);
        }
        if slope.abs() <= -WOLFE_C2 * d0 {
            return Some(LineSearchPoint { x, value: f, grad: g });
        }
        if slope >= 0.0 {
            return zoom(obj, x0, f0, d0, dir, alpha, f, alpha_prev);
        }
        alpha_prev = alpha;
        f_prev = f;
        alpha = (2.0 * alpha).min(alpha_max);
        if alpha >= alpha_max {
            return Some(LineSearchPoint { x, value: f, grad: g });
        }
    }
    None
}

/// Zoom phase: maintains a bracket [lo, hi] with lo the best-so-far end.
#[allow(clippy::too_many_arguments)]
fn zoom(
    obj: &Objective<'_>,
    x0: &[f64],
    f0: f64,
    d0: f64,
    dir: &[f64],
    mut alpha_lo: f64,
    mut f_lo: f64,
    mut alpha_hi: f64,
) -> Option<LineSearchPoint> {
    let eval = |alpha: f64| -> (Vec<f64>, f64, Vec<f64>, f64) {
        let x: Vec<f64> = x0.iter().zip(dir).map(|(a, b)| a + alpha * b).collect();
        let (v, g) = obj.value_and_grad(&x);
        let slope = g.iter().zip(dir).map(|(a, b)| a * b).sum();
        (x, v, g, slope)
    };
    let mut fallback: Option<LineSearchPoint> = None;
    for _ in 0..MAX_LINE_SEARCH_STEPS {
        let alpha = 0.5 * (alpha_lo + alpha_hi);
        if (alpha_hi - alpha_lo).abs() < 1e-16 {
            break;
        }
        let (x, f, g, slope) = eval(alpha);
        if f > f0 + WOLFE_C1 * alpha * d0 || f >= f_lo {
            alpha_hi = alpha;
        } else {
            if slope.abs() <= -WOLFE_C2 * d0 {
                return Some(LineSearchPoint { x, value: f, grad: g });
            }
            if slope * (alpha_hi - alpha_lo) >= 0.0 {
                alpha_hi = alpha_lo;
            }
            alpha_lo = alpha;
            f_lo = f;
            fallback = Some(LineSearchPoint { x, value: f, grad: g });
        }
    }
    // Accept the best Armijo-satisfying point even if the curvature condition
    // was never met; the BFGS update guards on s.y positivity anyway.
    fallback
}

fn bfgs_update(h_inv: &mut nalgebra::DMatrix<f64>, s: &[f64], y: &[f64], sy: f64) {
    let dim = s.len();
    let rho = 1.0 / sy;
    let s = nalgebra::DVector::from_column_slice(s);
    let y = nalgebra::DVector::from_column_slice(y);
    // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
    let hy = &*h_inv * &y;
    let yhy = y.dot(&hy);
    let shy = &s * hy.transpose();
    let term = (&s * s.transpose()) * (rho * rho * yhy + rho);
    let correction = (&shy + shy.transpose()) * rho;
    for i in 0..dim {
        for j in 0..dim {
            h_inv[(i, j)] += term[(i, j)] - correction[(i, j)];
        }
    }
}

/// Options for the depth-1 grid search.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GridSearchOptions {
    /// Points per axis on the fundamental region.
    pub resolution: usize,
    pub minimize: MinimizeOptions,
}

impl Default for GridSearchOptions {
    fn default() -> Self {
        GridSearchOptions { resolution: 32, minimize: MinimizeOptions::classified() }
    }
}

/// Global search at depth 1: local minimization from every node of an evenly
/// spaced grid on the fundamental region `beta in [-pi/4, pi/4]`,
/// `gamma in (0, pi/4)`; the lowest-energy converged minimum wins and is
/// folded into the fundamental region for reporting.
pub fn grid_search_p1(graph: &ProblemGraph, opts: &GridSearchOptions) -> Result<StationaryPoint> {
    use std::f64::consts::FRAC_PI_4;
    if opts.resolution < 8 {
        return Err(Error::contract(format!(
            "grid resolution must be at least 8, got {}",
            opts.resolution
        )));
    }
    let sim = Simulator::new(graph)?;
    let res = opts.resolution;
    let mut best: Option<StationaryPoint> = None;
    let mut any_converged = false;
    // Cell-centered nodes keep gamma strictly inside the open interval.
    for bi in 0..res {
        let beta = -FRAC_PI_4 + (bi as f64 + 0.5) / res as f64 * (2.0 * FRAC_PI_4);
        for gi in 0..res {
            let gamma = (gi as f64 + 0.5) / res as f64 * FRAC_PI_4;
            let init = AngleVector::new(vec![beta], vec![gamma])?;
            let mut run_opts = opts.minimize;
            run_opts.classify = false;
            let point = local_minimize_with(&sim, &init, &run_opts, Provenance::Grid)?;
            if !point.converged {
                continue;
            }
            any_converged = true;
            let better = match &best {
                None => true,
                Some(b) => point.energy < b.energy,
            };
            if better {
                best = Some(point);
            }
        }
    }
    if !any_converged {
        return Err(Error::AllStartsFailed("no grid start converged at depth 1".into()));
    }
    let mut best = best.expect("any_converged implies a best point");
    best.angles = fold_for_reporting(graph, &best.angles);
    let (energy, grad) = sim.energy_and_gradient(&best.angles);
    best.energy = energy;
    best.grad_norm = inf_norm(&grad);
    if opts.minimize.classify {
        classify_in_place(&sim, &mut best)?;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{generate_graph, Ensemble, ProblemGraph};
    use crate::rng::SplitMix64;
    use approx::assert_abs_diff_eq;

    fn single_edge() -> ProblemGraph {
        ProblemGraph::from_edges(2, Ensemble::Er, 0, None, vec![(0, 1, 1.0)]).unwrap()
    }

    #[test]
    fn converges_on_single_edge_from_small_start() {
        let g = single_edge();
        let init = AngleVector::new(vec![0.1], vec![0.1]).unwrap();
        let point = local_minimize(&g, &init, &MinimizeOptions::classified()).unwrap();
        assert!(point.converged);
        assert!(point.grad_norm < 1e-8);
        // The depth-1 optimum of a single edge reaches the exact cut value.
        assert_abs_diff_eq!(point.energy, -1.0, epsilon = 1e-9);
        assert_eq!(point.classification, Classification::Minimum);
    }

    #[test]
    fn restarting_at_a_minimum_is_a_fixed_point() {
        let g = generate_graph(Ensemble::Rrg3, 6, 3, None).unwrap();
        let init = AngleVector::new(vec![0.2], vec![0.15]).unwrap();
        let first = local_minimize(&g, &init, &MinimizeOptions::default()).unwrap();
        assert!(first.converged);
        let second = local_minimize(&g, &first.angles, &MinimizeOptions::default()).unwrap();
        assert!(second.converged);
        assert!(second.iterations <= 2, "restart took {} iterations", second.iterations);
        assert_abs_diff_eq!(second.energy, first.energy, epsilon = 1e-12);
    }

    #[test]
    fn descent_never_increases_energy() {
        let g = generate_graph(Ensemble::Er, 6, 8, Some(0.5)).unwrap();
        let sim = Simulator::new(&g).unwrap();
        let mut rng = SplitMix64::new(5);
        for _ in 0..10 {
            let p = 1 + rng.next_index(3);
            let beta: Vec<f64> = (0..p).map(|_| rng.next_f64() - 0.5).collect();
            let gamma: Vec<f64> = (0..p).map(|_| rng.next_f64() - 0.5).collect();
            let init = AngleVector::new(beta, gamma).unwrap();
            let e0 = sim.energy(&init);
            let point = local_minimize(&g, &init, &MinimizeOptions::default()).unwrap();
            assert!(point.energy <= e0 + 1e-12);
        }
    }

    #[test]
    fn trajectories_are_bit_deterministic() {
        let g = generate_graph(Ensemble::Rrg3, 8, 11, None).unwrap();
        let init = AngleVector::new(vec![0.3, -0.1], vec![0.2, 0.25]).unwrap();
        let a = local_minimize(&g, &init, &MinimizeOptions::default()).unwrap();
        let b = local_minimize(&g, &init, &MinimizeOptions::default()).unwrap();
        assert_eq!(a.energy.to_bits(), b.energy.to_bits());
        assert_eq!(a.iterations, b.iterations);
        for (x, y) in a.angles.to_flat().iter().zip(b.angles.to_flat().iter()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn grid_search_single_edge_matches_random_multistart() {
        let g = single_edge();
        let grid = grid_search_p1(&g, &GridSearchOptions::default()).unwrap();
        assert!(grid.grad_norm < 1e-8);
        // Oracle: 1000 random starts over a wide angle box.
        let mut rng = SplitMix64::new(77);
        let mut best = f64::INFINITY;
        for _ in 0..1000 {
            let init = AngleVector::new(
                vec![2.0 * rng.next_f64() - 1.0],
                vec![2.0 * rng.next_f64() - 1.0],
            )
            .unwrap();
            if let Ok(p) = local_minimize(&g, &init, &MinimizeOptions::default()) {
                if p.converged {
                    best = best.min(p.energy);
                }
            }
        }
        assert_abs_diff_eq!(grid.energy, best, epsilon = 1e-9);
    }

    #[test]
    fn grid_search_resolution_self_consistency() {
        let g = generate_graph(Ensemble::Rrg3, 4, 2, None).unwrap();
        let coarse = grid_search_p1(
            &g,
            &GridSearchOptions { resolution: 32, minimize: MinimizeOptions::default() },
        )
        .unwrap();
        let fine = grid_search_p1(
            &g,
            &GridSearchOptions { resolution: 64, minimize: MinimizeOptions::default() },
        )
        .unwrap();
        assert_abs_diff_eq!(coarse.energy, fine.energy, epsilon = 1e-9);
    }

    #[test]
    fn grid_search_classifies_the_reported_minimum() {
        let g = generate_graph(Ensemble::Rrg3, 6, 4, None).unwrap();
        let point = grid_search_p1(&g, &GridSearchOptions::default()).unwrap();
        assert!(point.grad_norm < 1e-8);
        assert_eq!(point.classification, Classification::Minimum);
        assert_eq!(point.inertia, Some(crate::simulator::Inertia { n_neg: 0, n_zero: 0, n_pos: 2 }));
    }
}
