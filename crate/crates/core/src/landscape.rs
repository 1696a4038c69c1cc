//! Landscape structure: symmetry folding, analytic transition-state
//! construction from minima, index-1 directions, and descent from saddles.
//!
//! A depth-p minimum yields `2p+1` saddle points of the depth-(p+1)
//! landscape by inserting a zero mixer angle at position `l` and a zero
//! phase angle at position `k`, with `k = l` ("symmetric": the inserted
//! identities form one whole layer) or `k = l + 1` ("non-symmetric": the
//! zeros straddle the parent's layer-l gates, splitting that layer in two).
//! Either way the circuit is unchanged, so the saddle has exactly the
//! parent's energy, and its Hessian has exactly one negative eigenvalue;
//! descending both ways along that eigenvector reaches two depth-(p+1)
//! minima at or below the parent energy.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::error::Error;
use crate::optimizer::{
    local_minimize_with, Classification, MinimizeOptions, Provenance, StationaryPoint,
};
use crate::problem::ProblemGraph;
use crate::simulator::{AngleVector, HessianMatrix, Simulator};
use crate::Result;

/// Symmetric (zero phase and mixer in the same layer) or non-symmetric
/// (zero phase one layer after the zero mixer) insertion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TsKind {
    Symmetric,
    NonSymmetric,
}

/// A constructed transition state at depth `p + 1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransitionStateRecord {
    pub angles: AngleVector,
    /// Identifier of the parent minimum assigned by the caller (graph node
    /// id, depth index, ...); purely informational here.
    pub parent_id: usize,
    /// 1-based position of the inserted zero in the mixer angles.
    pub insert_beta: usize,
    /// 1-based position of the inserted zero in the phase angles.
    pub insert_gamma: usize,
    pub kind: TsKind,
    pub energy: f64,
}

impl TransitionStateRecord {
    /// Removes the inserted zeros, recovering the parent angle vector.
    pub fn parent_angles(&self) -> AngleVector {
        let mut beta = self.angles.beta().to_vec();
        let mut gamma = self.angles.gamma().to_vec();
        beta.remove(self.insert_beta - 1);
        gamma.remove(self.insert_gamma - 1);
        AngleVector::new(beta, gamma).expect("removing one entry from each keeps lengths equal")
    }
}

fn wrap_centered(x: f64, period: f64) -> f64 {
    let half = period / 2.0;
    // Leave in-range values untouched so folding is exactly idempotent.
    if x.abs() <= half {
        return x;
    }
    let y = (x + half).rem_euclid(period) - half;
    if y >= half {
        y - period
    } else {
        y
    }
}

/// Folds an angle vector into the fundamental region.
///
/// Mixer angles always fold into `[-pi/4, pi/4]` (half-period shift of a
/// single mixer angle is a symmetry for every ZZ cost Hamiltonian). Phase
/// angles fold into `[-pi/2, pi/2]` via the full-period shift, which
/// requires integer edge weights; with `odd_regular` set they fold further
/// into `[-pi/4, pi/4]` by flipping the sign of every later mixer angle and
/// shifting that one phase angle by a half period (valid on unweighted
/// graphs whose vertices all have odd degree). Finally a global sign flip
/// makes `gamma_1` non-negative. Idempotent, and energy-preserving whenever
/// the used symmetries hold for the problem at hand.
pub fn fold_to_fundamental(angles: &AngleVector, odd_regular: bool) -> AngleVector {
    let p = angles.depth();
    let mut beta: Vec<f64> = angles.beta().iter().map(|&b| wrap_centered(b, FRAC_PI_2)).collect();
    let mut gamma: Vec<f64> = angles.gamma().to_vec();
    for l in 0..p {
        gamma[l] = wrap_centered(gamma[l], 2.0 * FRAC_PI_2);
        if odd_regular && gamma[l].abs() > FRAC_PI_4 {
            gamma[l] -= FRAC_PI_2.copysign(gamma[l]);
            for b in beta.iter_mut().skip(l) {
                *b = -*b;
            }
        }
    }
    if p > 0 && gamma[0] < 0.0 {
        for x in beta.iter_mut().chain(gamma.iter_mut()) {
            *x = -*x;
        }
    }
    AngleVector::new(beta, gamma).expect("folding preserves lengths and finiteness")
}

/// Folds using only the symmetries valid for `graph`: the full region for
/// unweighted graphs (tight gamma range when odd-regular), and only the
/// universally valid mixer fold plus global sign flip for weighted graphs.
pub fn fold_for_reporting(graph: &ProblemGraph, angles: &AngleVector) -> AngleVector {
    if graph.has_integer_weights() {
        fold_to_fundamental(angles, graph.is_odd_regular_unweighted())
    } else {
        let p = angles.depth();
        let mut beta: Vec<f64> =
            angles.beta().iter().map(|&b| wrap_centered(b, FRAC_PI_2)).collect();
        let mut gamma: Vec<f64> = angles.gamma().to_vec();
        if p > 0 && gamma[0] < 0.0 {
            for x in beta.iter_mut().chain(gamma.iter_mut()) {
                *x = -*x;
            }
        }
        AngleVector::new(beta, gamma).expect("folding preserves lengths and finiteness")
    }
}

/// Admissible insertion positions `(insert_beta, insert_gamma)` for a
/// depth-p parent: `(l, l)` for `l in [1, p+1]` and `(l, l+1)` for
/// `l in [1, p]`.
pub fn admissible_insertions(p: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(2 * p + 1);
    for l in 1..=(p + 1) {
        out.push((l, l));
    }
    for l in 1..=p {
        out.push((l, l + 1));
    }
    out
}

/// Builds the transition state obtained from a depth-p minimum by inserting
/// a zero mixer angle at position `insert_beta` and a zero phase angle at
/// position `insert_gamma` (both 1-based, equal or differing by one with the
/// phase insertion later). Only these placements keep the inserted gates
/// acting as identities on the circuit.
///
/// The returned record's energy is recomputed from the padded angles and
/// checked against the parent energy to 1e-12.
pub fn construct_ts(
    graph: &ProblemGraph,
    parent: &StationaryPoint,
    insert_beta: usize,
    insert_gamma: usize,
) -> Result<TransitionStateRecord> {
    let sim = Simulator::new(graph)?;
    construct_ts_with(&sim, parent, insert_beta, insert_gamma, 0)
}

pub(crate) fn construct_ts_with(
    sim: &Simulator,
    parent: &StationaryPoint,
    insert_beta: usize,
    insert_gamma: usize,
    parent_id: usize,
) -> Result<TransitionStateRecord> {
    if parent.classification != Classification::Minimum {
        return Err(Error::contract(format!(
            "transition states are constructed from minima, parent is {:?}",
            parent.classification
        )));
    }
    let p = parent.depth();
    let kind = if insert_gamma == insert_beta {
        TsKind::Symmetric
    } else if insert_gamma == insert_beta + 1 {
        TsKind::NonSymmetric
    } else {
        return Err(Error::contract(format!(
            "insertion ({insert_beta}, {insert_gamma}) must place the zero phase angle in the \
             same layer as the zero mixer angle or one layer later"
        )));
    };
    let valid = match kind {
        TsKind::Symmetric => (1..=p + 1).contains(&insert_beta),
        TsKind::NonSymmetric => (1..=p).contains(&insert_beta),
    };
    if !valid {
        return Err(Error::contract(format!(
            "insertion ({insert_beta}, {insert_gamma}) out of range for a depth-{p} parent"
        )));
    }
    let mut beta = parent.angles.beta().to_vec();
    let mut gamma = parent.angles.gamma().to_vec();
    beta.insert(insert_beta - 1, 0.0);
    gamma.insert(insert_gamma - 1, 0.0);
    let angles = AngleVector::new(beta, gamma)?;
    let energy = sim.energy(&angles);
    if (energy - parent.energy).abs() > 1e-12 {
        return Err(Error::NumericalFailure(format!(
            "padded state changed energy by {:.3e}",
            (energy - parent.energy).abs()
        )));
    }
    Ok(TransitionStateRecord { angles, parent_id, insert_beta, insert_gamma, kind, energy })
}

/// All `2p+1` transition states of a depth-p minimum: `p+1` symmetric then
/// `p` non-symmetric, in insertion order.
pub fn enumerate_ts(graph: &ProblemGraph, parent: &StationaryPoint) -> Result<Vec<TransitionStateRecord>> {
    let sim = Simulator::new(graph)?;
    admissible_insertions(parent.depth())
        .into_iter()
        .map(|(i, j)| construct_ts_with(&sim, parent, i, j, 0))
        .collect()
}

/// Unit eigenvector of the unique negative Hessian eigenvalue.
///
/// Requires inertia `(1, 0, dim-1)`; the sign is fixed so the
/// largest-magnitude component is positive.
pub fn index1_direction(hessian: &HessianMatrix) -> Result<Vec<f64>> {
    let dim = hessian.eigenvalues.len();
    let inertia = hessian.inertia;
    if !(inertia.n_neg == 1 && inertia.n_zero == 0) {
        return Err(Error::ClassificationMismatch {
            expected: "index-1 (one negative eigenvalue, none zero)",
            n_neg: inertia.n_neg,
            n_zero: inertia.n_zero,
            n_pos: inertia.n_pos,
        });
    }
    let mut v: Vec<f64> = (0..dim).map(|r| hessian.eigenvectors[(r, 0)]).collect();
    normalize_sign(&mut v);
    Ok(v)
}

fn normalize_sign(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in v.iter_mut() {
        *x /= norm;
    }
    let lead = v
        .iter()
        .cloned()
        .fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
    if lead < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

/// Cheap stand-in for [`index1_direction`] that avoids diagonalizing: the
/// exact index-1 eigenvector concentrates on the inserted zero angles and
/// the gates adjacent to them in circuit order, so we place unit weight on
/// the insertions and half weight on their neighbors (at most 4 nonzero
/// components) and normalize.
pub fn approx_index1_direction(ts: &TransitionStateRecord) -> Vec<f64> {
    let p1 = ts.angles.depth();
    let mut v = vec![0.0f64; 2 * p1];
    let beta_idx = |l: usize| l - 1;
    let gamma_idx = |l: usize| p1 + l - 1;
    v[beta_idx(ts.insert_beta)] = 1.0;
    v[gamma_idx(ts.insert_gamma)] = 1.0;
    match ts.kind {
        TsKind::Symmetric => {
            // Inserted layer l: neighbors in circuit order are the previous
            // mixer (beta_{l-1}) and the next phase (gamma_{l+1}).
            if ts.insert_beta > 1 {
                v[beta_idx(ts.insert_beta - 1)] = 0.5;
            }
            if ts.insert_gamma < p1 {
                v[gamma_idx(ts.insert_gamma + 1)] = 0.5;
            }
        }
        TsKind::NonSymmetric => {
            // The zeros at beta_l and gamma_{l+1} straddle the parent's
            // layer-l gates, which act as the neighbors.
            v[gamma_idx(ts.insert_gamma - 1)] = 0.5;
            v[beta_idx(ts.insert_beta + 1)] = 0.5;
        }
    }
    normalize_sign(&mut v);
    v
}

/// Both minima reached from a transition state by stepping `eps` along the
/// positive and negative index-1 direction and minimizing.
pub fn descend_from_ts(
    graph: &ProblemGraph,
    ts: &TransitionStateRecord,
    direction: &[f64],
    eps: f64,
    opts: &MinimizeOptions,
) -> Result<(StationaryPoint, StationaryPoint)> {
    if eps <= 0.0 {
        return Err(Error::contract("descent offset eps must be positive"));
    }
    let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::contract(format!("direction must be a unit vector (norm {norm})")));
    }
    let sim = Simulator::new(graph)?;
    let flat = ts.angles.to_flat();
    if direction.len() != flat.len() {
        return Err(Error::DimensionMismatch { expected: flat.len(), got: direction.len() });
    }
    let offset = |sign: f64| -> Result<AngleVector> {
        let shifted: Vec<f64> =
            flat.iter().zip(direction).map(|(x, d)| x + sign * eps * d).collect();
        AngleVector::from_flat(&shifted)
    };
    let plus =
        local_minimize_with(&sim, &offset(1.0)?, opts, Provenance::TsDescentPlus)?;
    let minus =
        local_minimize_with(&sim, &offset(-1.0)?, opts, Provenance::TsDescentMinus)?;
    Ok((plus, minus))
}

/// Total variation of the angle pattern across layers:
/// `sum_l |beta_{l+1} - beta_l| + |gamma_{l+1} - gamma_l|`. Lower is
/// smoother; the sum is empty (0) below depth 2. Used only for reporting and
/// tie-breaking, never asserted as a hard property.
pub fn smoothness_score(angles: &AngleVector) -> f64 {
    let tv = |xs: &[f64]| xs.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>();
    tv(angles.beta()) + tv(angles.gamma())
}

/// Classifies a freshly constructed transition state, returning its Hessian
/// for reuse (index-1 extraction) alongside the classification.
pub fn classify_ts(
    sim: &Simulator,
    ts: &TransitionStateRecord,
) -> Result<(Classification, HessianMatrix)> {
    let hess = sim.hessian(&ts.angles, None)?;
    let dim = 2 * ts.angles.depth();
    let class = if hess.inertia.n_zero > 0 {
        Classification::Singular
    } else if hess.inertia.n_neg == 1 && hess.inertia.n_pos == dim - 1 {
        Classification::TransitionState
    } else if hess.inertia.n_pos == dim {
        Classification::Minimum
    } else {
        Classification::Other
    };
    Ok((class, hess))
}

/// Convenience: classified minimum from an optimizer result, used by tests
/// and strategies to assert the parent contract before TS construction.
pub fn require_minimum(point: &StationaryPoint) -> Result<()> {
    if point.classification != Classification::Minimum {
        return Err(Error::contract(format!(
            "expected a classified minimum, got {:?}",
            point.classification
        )));
    }
    Ok(())
}
