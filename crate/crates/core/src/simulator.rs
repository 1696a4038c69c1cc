//! Exact statevector simulation of the alternating-layer ansatz.
//!
//! The variational state is
//! `|beta, gamma> = U_B(beta_p) U_C(gamma_p) ... U_B(beta_1) U_C(gamma_1) |+>^n`
//! with `U_C(g) = exp(-i g H_C)` a diagonal phase and
//! `U_B(b) = exp(-i b H_B)` the mixer layer. We fix `H_B = -sum_i X_i`, so a
//! mixer layer rotates every qubit by `exp(+i b X)`.
//!
//! Energies come from the diagonal quadratic form; gradients from a single
//! reverse (adjoint) sweep that peels the circuit off both the forward state
//! and the cost-applied state, at total cost of roughly three evolutions.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::problem::{cost_diagonal, CostDiagonal, ProblemGraph};
use crate::Result;

/// Variational angles for a depth-`p` ansatz.
///
/// Serializes as the flat JSON array `[beta_1..beta_p, gamma_1..gamma_p]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleVector {
    beta: Vec<f64>,
    gamma: Vec<f64>,
}

impl AngleVector {
    pub fn new(beta: Vec<f64>, gamma: Vec<f64>) -> Result<Self> {
        if beta.len() != gamma.len() {
            return Err(Error::contract(format!(
                "beta has length {} but gamma has length {}",
                beta.len(),
                gamma.len()
            )));
        }
        if beta.iter().chain(gamma.iter()).any(|x| !x.is_finite()) {
            return Err(Error::contract("angles must be finite"));
        }
        Ok(AngleVector { beta, gamma })
    }

    pub fn zero(p: usize) -> Self {
        AngleVector { beta: vec![0.0; p], gamma: vec![0.0; p] }
    }

    pub fn depth(&self) -> usize {
        self.beta.len()
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    /// Flat parameter vector `(beta_1..beta_p, gamma_1..gamma_p)`; this is the
    /// index order used by gradients and Hessians.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.depth());
        out.extend_from_slice(&self.beta);
        out.extend_from_slice(&self.gamma);
        out
    }

    pub fn from_flat(flat: &[f64]) -> Result<Self> {
        if flat.len() % 2 != 0 {
            return Err(Error::contract(format!("flat angle vector has odd length {}", flat.len())));
        }
        let p = flat.len() / 2;
        AngleVector::new(flat[..p].to_vec(), flat[p..].to_vec())
    }
}

impl Serialize for AngleVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_flat().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AngleVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let flat = Vec::<f64>::deserialize(deserializer)?;
        AngleVector::from_flat(&flat).map_err(D::Error::custom)
    }
}

/// Dense complex statevector over `2^n` basis states.
#[derive(Debug, Clone)]
pub struct StateVector {
    pub amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Uniform superposition |+>^n.
    pub fn plus(n: usize) -> Self {
        let dim = 1usize << n;
        let amp = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        StateVector { amplitudes: vec![amp; dim] }
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Eigenvalue sign counts of a symmetric matrix under a relative tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inertia {
    pub n_neg: usize,
    pub n_zero: usize,
    pub n_pos: usize,
}

/// Symmetrized Hessian of the energy in the flat parameter order, with its
/// eigendecomposition and inertia.
#[derive(Debug, Clone)]
pub struct HessianMatrix {
    pub matrix: nalgebra::DMatrix<f64>,
    /// Eigenvalues sorted ascending.
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors as columns, matching `eigenvalues` order.
    pub eigenvectors: nalgebra::DMatrix<f64>,
    pub inertia: Inertia,
    pub tol_eig: f64,
}

impl HessianMatrix {
    pub fn determinant(&self) -> f64 {
        self.eigenvalues.iter().product()
    }
}

/// Relative eigenvalue tolerance below which an eigenvalue counts as zero.
pub const DEFAULT_EIG_TOL: f64 = 1e-7;
/// Default step for the finite-difference Hessian of the analytic gradient.
pub const DEFAULT_HESSIAN_STEP: f64 = 1e-4;

/// Boundary layer selector for the second-derivative expectation `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCase {
    /// Identity layer appended at the end of the circuit.
    LastLayer,
    /// Identity layer prepended at the start of the circuit.
    FirstLayer,
}

/// Exact simulator for one problem instance. Caches the cost diagonal.
#[derive(Debug, Clone)]
pub struct Simulator {
    n: usize,
    diag: CostDiagonal,
    mixer_sign: f64,
}

impl Simulator {
    pub fn new(graph: &ProblemGraph) -> Result<Self> {
        let diag = cost_diagonal(graph)?;
        Ok(Simulator { n: graph.n, diag, mixer_sign: 1.0 })
    }

    /// Validation hook: reverses the rotation sense of the mixer layers while
    /// leaving the gradient's generator untouched, so analytic gradients stop
    /// matching finite differences. Exists to prove the gradient check can
    /// detect a miswired mixer; never set in production paths.
    pub fn set_mixer_sign_for_validation(&mut self, sign: f64) {
        self.mixer_sign = sign;
    }

    pub fn qubit_count(&self) -> usize {
        self.n
    }

    pub fn diagonal(&self) -> &CostDiagonal {
        &self.diag
    }

    pub fn c_min(&self) -> f64 {
        self.diag.c_min
    }

    pub fn c_max(&self) -> f64 {
        self.diag.c_max
    }

    fn dim(&self) -> usize {
        1usize << self.n
    }

    /// exp(-i g H_C): multiply each amplitude by a diagonal phase.
    fn apply_phase_layer(&self, state: &mut [Complex64], gamma: f64) {
        for (z, amp) in state.iter_mut().enumerate() {
            *amp *= Complex64::from_polar(1.0, -gamma * self.diag.values[z]);
        }
    }

    /// exp(-i b H_B) with H_B = -sum X: each qubit rotates by exp(+i b X),
    /// i.e. (a0, a1) -> (c a0 + i s a1, i s a0 + c a1).
    fn apply_mixer_layer(&self, state: &mut [Complex64], beta: f64) {
        let c = beta.cos();
        let is = Complex64::new(0.0, self.mixer_sign * beta.sin());
        for qubit in 0..self.n {
            let bit = 1usize << qubit;
            for z in 0..self.dim() {
                if z & bit == 0 {
                    let a0 = state[z];
                    let a1 = state[z | bit];
                    state[z] = c * a0 + is * a1;
                    state[z | bit] = is * a0 + c * a1;
                }
            }
        }
    }

    /// H_C |psi>: multiply by the diagonal.
    fn apply_cost_hamiltonian(&self, state: &[Complex64]) -> Vec<Complex64> {
        state.iter().zip(&self.diag.values).map(|(a, &d)| a * d).collect()
    }

    /// H_B |psi> with H_B = -sum_i X_i.
    fn apply_mixer_hamiltonian(&self, state: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); state.len()];
        for qubit in 0..self.n {
            let bit = 1usize << qubit;
            for z in 0..state.len() {
                out[z] -= state[z ^ bit];
            }
        }
        out
    }

    /// Prepares the ansatz state for the given angles.
    pub fn evolve(&self, angles: &AngleVector) -> StateVector {
        let mut state = StateVector::plus(self.n);
        for l in 0..angles.depth() {
            self.apply_phase_layer(&mut state.amplitudes, angles.gamma()[l]);
            self.apply_mixer_layer(&mut state.amplitudes, angles.beta()[l]);
        }
        state
    }

    /// `<psi| H_C |psi>` for an explicit state (Kahan-compensated sum).
    pub fn energy_of_state(&self, state: &StateVector) -> f64 {
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for (amp, &d) in state.amplitudes.iter().zip(&self.diag.values) {
            let term = amp.norm_sqr() * d - comp;
            let t = sum + term;
            comp = (t - sum) - term;
            sum = t;
        }
        sum
    }

    pub fn energy(&self, angles: &AngleVector) -> f64 {
        self.energy_of_state(&self.evolve(angles))
    }

    /// Energy and analytic gradient in one reverse sweep.
    ///
    /// The gradient entry for an angle is `2 Im <lambda| H |kappa>` where
    /// `kappa` is the circuit applied up to and including that layer,
    /// `lambda` is the cost-applied final state with later layers peeled off,
    /// and `H` is the corresponding generator.
    pub fn energy_and_gradient(&self, angles: &AngleVector) -> (f64, Vec<f64>) {
        let p = angles.depth();
        let psi = self.evolve(angles);
        let energy = self.energy_of_state(&psi);

        let mut lambda = self.apply_cost_hamiltonian(&psi.amplitudes);
        let mut kappa = psi.amplitudes;
        let mut grad = vec![0.0f64; 2 * p];

        for l in (0..p).rev() {
            // d/d beta_l: generator H_B, inserted after the full layer l.
            grad[l] = 2.0 * self.im_inner_with_mixer(&lambda, &kappa);
            self.unapply_mixer_layer(&mut kappa, angles.beta()[l]);
            self.unapply_mixer_layer(&mut lambda, angles.beta()[l]);
            // d/d gamma_l: generator H_C, inserted after the phase of layer l
            // (H_C commutes with the phase, so evaluating here is exact).
            grad[p + l] = 2.0 * self.im_inner_with_cost(&lambda, &kappa);
            self.unapply_phase_layer(&mut kappa, angles.gamma()[l]);
            self.unapply_phase_layer(&mut lambda, angles.gamma()[l]);
        }
        (energy, grad)
    }

    pub fn gradient(&self, angles: &AngleVector) -> Vec<f64> {
        self.energy_and_gradient(angles).1
    }

    fn unapply_phase_layer(&self, state: &mut [Complex64], gamma: f64) {
        self.apply_phase_layer(state, -gamma);
    }

    fn unapply_mixer_layer(&self, state: &mut [Complex64], beta: f64) {
        self.apply_mixer_layer(state, -beta);
    }

    /// Im <a| H_B |b> without materializing H_B |b>.
    fn im_inner_with_mixer(&self, a: &[Complex64], b: &[Complex64]) -> f64 {
        let mut im = 0.0f64;
        for qubit in 0..self.n {
            let bit = 1usize << qubit;
            for z in 0..a.len() {
                im -= (a[z].conj() * b[z ^ bit]).im;
            }
        }
        im
    }

    /// Im <a| H_C |b>.
    fn im_inner_with_cost(&self, a: &[Complex64], b: &[Complex64]) -> f64 {
        let mut im = 0.0f64;
        for z in 0..a.len() {
            im += (a[z].conj() * b[z]).im * self.diag.values[z];
        }
        im
    }

    /// Hessian by central finite differences of the analytic gradient,
    /// symmetrized, with eigendecomposition and inertia. `step` defaults to
    /// [`DEFAULT_HESSIAN_STEP`] when `None`.
    pub fn hessian(&self, angles: &AngleVector, step: Option<f64>) -> Result<HessianMatrix> {
        let h = step.unwrap_or(DEFAULT_HESSIAN_STEP);
        if h <= 0.0 {
            return Err(Error::contract("hessian step must be positive"));
        }
        let dim = 2 * angles.depth();
        let flat = angles.to_flat();
        let mut m = nalgebra::DMatrix::<f64>::zeros(dim, dim);
        for j in 0..dim {
            let mut plus = flat.clone();
            let mut minus = flat.clone();
            plus[j] += h;
            minus[j] -= h;
            let gp = self.gradient(&AngleVector::from_flat(&plus)?);
            let gm = self.gradient(&AngleVector::from_flat(&minus)?);
            for i in 0..dim {
                m[(i, j)] = (gp[i] - gm[i]) / (2.0 * h);
            }
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::NumericalFailure("non-finite Hessian entry".into()));
        }
        let sym = (&m + m.transpose()) * 0.5;
        Self::eigen_classify(sym, DEFAULT_EIG_TOL)
    }

    pub(crate) fn eigen_classify(sym: nalgebra::DMatrix<f64>, tol_eig: f64) -> Result<HessianMatrix> {
        let eig = sym.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
        let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut eigenvectors = nalgebra::DMatrix::<f64>::zeros(sym.nrows(), sym.ncols());
        for (new_col, &old_col) in order.iter().enumerate() {
            eigenvectors.set_column(new_col, &eig.eigenvectors.column(old_col));
        }
        let scale = eigenvalues.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
        let cut = tol_eig * scale;
        let n_neg = eigenvalues.iter().filter(|&&v| v < -cut).count();
        let n_pos = eigenvalues.iter().filter(|&&v| v > cut).count();
        let n_zero = eigenvalues.len() - n_neg - n_pos;
        Ok(HessianMatrix {
            matrix: sym,
            eigenvalues,
            eigenvectors,
            inertia: Inertia { n_neg, n_zero, n_pos },
            tol_eig,
        })
    }

    /// The boundary second derivative `b` that controls the determinant of a
    /// saddle Hessian relative to its parent minimum.
    ///
    /// For [`BoundaryCase::LastLayer`] this is
    /// `<psi| [[H_B, H_C], H_C] |psi>` over the ansatz state at `angles`; for
    /// [`BoundaryCase::FirstLayer`] it is
    /// `<+| [H_C, [U^dag H_C U, H_B]] |+>` with `U` the circuit at `angles`.
    /// Both are evaluated by explicit operator application to statevectors.
    ///
    /// `angles` must be a stationary point (gradient inf-norm below 1e-6).
    pub fn commutator_expectation_b(&self, angles: &AngleVector, case: BoundaryCase) -> Result<f64> {
        const STATIONARY_TOL: f64 = 1e-6;
        const IMAG_TOL: f64 = 1e-10;
        let grad_norm = inf_norm(&self.gradient(angles));
        if grad_norm >= STATIONARY_TOL {
            return Err(Error::NotStationary { grad_norm, tol: STATIONARY_TOL });
        }
        let value = match case {
            BoundaryCase::LastLayer => {
                let psi = self.evolve(angles).amplitudes;
                // [[H_B, H_C], H_C] = H_B H_C^2 - 2 H_C H_B H_C + H_C^2 H_B
                let c_psi = self.apply_cost_hamiltonian(&psi);
                let cc_psi = self.apply_cost_hamiltonian(&c_psi);
                let t1 = self.apply_mixer_hamiltonian(&cc_psi);
                let t2 = self.apply_cost_hamiltonian(&self.apply_mixer_hamiltonian(&c_psi));
                let t3 = {
                    let b_psi = self.apply_mixer_hamiltonian(&psi);
                    self.apply_cost_hamiltonian(&self.apply_cost_hamiltonian(&b_psi))
                };
                let mut acc = Complex64::new(0.0, 0.0);
                for z in 0..psi.len() {
                    acc += psi[z].conj() * (t1[z] - 2.0 * t2[z] + t3[z]);
                }
                acc
            }
            BoundaryCase::FirstLayer => {
                // b = <+|C M H_B|+> - <+|C H_B M|+> - <+|M H_B C|+> + <+|H_B M C|+>
                // with M = U^dag H_C U. Uses H_B|+> = -n|+>.
                let plus = StateVector::plus(self.n).amplitudes;
                let c_plus = self.apply_cost_hamiltonian(&plus);
                let m_plus = self.conjugated_cost(angles, &plus);
                let m_c_plus = self.conjugated_cost(angles, &c_plus);
                let nf = self.n as f64;
                let term1 = -nf * inner(&c_plus, &m_plus);
                let term2 = inner(&c_plus, &self.apply_mixer_hamiltonian(&m_plus));
                let term3 = inner(&m_plus, &self.apply_mixer_hamiltonian(&c_plus));
                let term4 = -nf * inner(&plus, &m_c_plus);
                term1 - term2 - term3 + term4
            }
        };
        if value.im.abs() >= IMAG_TOL {
            return Err(Error::NumericalFailure(format!(
                "commutator expectation has imaginary residue {:.3e}",
                value.im
            )));
        }
        Ok(value.re)
    }

    /// U^dag H_C U |phi> for the circuit at `angles`.
    fn conjugated_cost(&self, angles: &AngleVector, phi: &[Complex64]) -> Vec<Complex64> {
        let mut state = phi.to_vec();
        for l in 0..angles.depth() {
            self.apply_phase_layer(&mut state, angles.gamma()[l]);
            self.apply_mixer_layer(&mut state, angles.beta()[l]);
        }
        let mut state = self.apply_cost_hamiltonian(&state);
        for l in (0..angles.depth()).rev() {
            self.unapply_mixer_layer(&mut state, angles.beta()[l]);
            self.unapply_phase_layer(&mut state, angles.gamma()[l]);
        }
        state
    }
}

/// `<a|b>`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Infinity norm of a real vector.
pub fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()))
}

/// Approximation ratio `energy / c_min`; requires a negative optimum.
pub fn approximation_ratio(energy: f64, c_min: f64) -> Result<f64> {
    if c_min >= 0.0 {
        return Err(Error::InvalidProblem { c_min });
    }
    Ok(energy / c_min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{generate_graph, Ensemble, ProblemGraph};
    use approx::assert_abs_diff_eq;

    fn single_edge() -> ProblemGraph {
        ProblemGraph::from_edges(2, Ensemble::Er, 0, None, vec![(0, 1, 1.0)]).unwrap()
    }

    fn central_fd_gradient(sim: &Simulator, angles: &AngleVector, h: f64) -> Vec<f64> {
        let flat = angles.to_flat();
        (0..flat.len())
            .map(|j| {
                let mut plus = flat.clone();
                let mut minus = flat.clone();
                plus[j] += h;
                minus[j] -= h;
                let ep = sim.energy(&AngleVector::from_flat(&plus).unwrap());
                let em = sim.energy(&AngleVector::from_flat(&minus).unwrap());
                (ep - em) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn depth_zero_is_uniform_superposition() {
        let g = generate_graph(Ensemble::Rrg3, 4, 1, None).unwrap();
        let sim = Simulator::new(&g).unwrap();
        let s = sim.evolve(&AngleVector::zero(0));
        for amp in &s.amplitudes {
            assert_abs_diff_eq!(amp.re, 0.25, epsilon = 1e-15);
            assert_abs_diff_eq!(amp.im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn zero_angles_act_as_identity() {
        let g = generate_graph(Ensemble::Rrg3, 6, 2, None).unwrap();
        let sim = Simulator::new(&g).unwrap();
        let s = sim.evolve(&AngleVector::zero(3));
        let expect = 1.0 / (64f64).sqrt();
        for amp in &s.amplitudes {
            assert_abs_diff_eq!(amp.re, expect, epsilon = 1e-14);
            assert_abs_diff_eq!(amp.im, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn unweighted_energy_at_depth_zero_is_zero() {
        let g = generate_graph(Ensemble::Rrg3, 8, 5, None).unwrap();
        let sim = Simulator::new(&g).unwrap();
        assert_abs_diff_eq!(sim.energy(&AngleVector::zero(0)), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn evolution_is_unitary() {
        let g = generate_graph(Ensemble::Er, 6, 3, Some(0.5)).unwrap();
        let sim = Simulator::new(&g).unwrap();
        let mut rng = crate::rng::SplitMix64::new(17);
        for _ in 0..20 {
            let p = 1 + rng.next_index(4);
            let beta: Vec<f64> = (0..p).map(|_| 4.0 * rng.next_f64() - 2.0).collect();
            let gamma: Vec<f64> = (0..p).map(|_| 4.0 * rng.next_f64() - 2.0).collect();
            let s = sim.evolve(&AngleVector::new(beta, gamma).unwrap());
            assert_abs_diff_eq!(s.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn energy_stays_within_spectral_bounds() {
        let g = generate_graph(Ensemble::Wrrg3, 6, 9, None).unwrap();
        let sim = Simulator::new(&g).unwrap();
        let mut rng = crate::rng::SplitMix64::new(4);
        for _ in 0..30 {
            let p = 1 + rng.next_index(3);
            let beta: Vec<f64> = (0..p).map(|_| 6.0 * rng.next_f64() - 3.0).collect();
            let gamma: Vec<f64> = (0..p).map(|_| 6.0 * rng.next_f64() - 3.0).collect();
            let e = sim.energy(&AngleVector::new(beta, gamma).unwrap());
            assert!(e >= sim.c_min() - 1e-10 && e <= sim.c_max() + 1e-10);
        }
    }

    #[test]
    fn energy_invariant_under_full_pi_shift() {
        let g = generate_graph(Ensemble::Rrg3, 8, 13, None).unwrap();
        let sim = Simulator::new(&g).unwrap();
        let a = AngleVector::new(vec![0.21, -0.13], vec![0.17, 0.31]).unwrap();
        let shifted = AngleVector::new(
            a.beta().iter().map(|b| b + std::f64::consts::PI).collect(),
            a.gamma().iter().map(|g| g + std::f64::consts::PI).collect(),
        )
        .unwrap();
        assert_abs_diff_eq!(sim.energy(&a), sim.energy(&shifted), epsilon = 1e-12);
    }

    #[test]
    fn gradient_vanishes_at_zero_angles() {
        let g = generate_graph(Ensemble::Rrg3, 6, 7, None).unwrap();
        let sim = Simulator::new(&g).unwrap();
        let grad = sim.gradient(&AngleVector::zero(3));
        let fd = central_fd_gradient(&sim, &AngleVector::zero(3), 1e-5);
        for (a, f) in grad.iter().zip(&fd) {
            assert_abs_diff_eq!(*a, 0.0, epsilon = 1e-10);
            assert_abs_diff_eq!(*f, 0.0, epsilon = 1e-7);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = crate::rng::SplitMix64::new(99);
        for &n in &[4usize, 6] {
            let g = generate_graph(Ensemble::Rrg3, n, 31 + n as u64, None).unwrap();
            let sim = Simulator::new(&g).unwrap();
            for p in 1..=4 {
                let beta: Vec<f64> = (0..p).map(|_| 2.0 * rng.next_f64() - 1.0).collect();
                let gamma: Vec<f64> = (0..p).map(|_| 2.0 * rng.next_f64() - 1.0).collect();
                let a = AngleVector::new(beta, gamma).unwrap();
                let analytic = sim.gradient(&a);
                let fd = central_fd_gradient(&sim, &a, 1e-5);
                for (x, y) in analytic.iter().zip(&fd) {
                    assert_abs_diff_eq!(*x, *y, epsilon = 1e-6);
                }
            }
        }
    }

    #[test]
    fn flipped_mixer_breaks_gradient_fd_agreement() {
        let g = generate_graph(Ensemble::Rrg3, 6, 21, None).unwrap();
        let mut sim = Simulator::new(&g).unwrap();
        sim.set_mixer_sign_for_validation(-1.0);
        let a = AngleVector::new(vec![0.4, -0.2], vec![0.3, 0.5]).unwrap();
        let analytic = sim.gradient(&a);
        let fd = central_fd_gradient(&sim, &a, 1e-5);
        let max_err = analytic
            .iter()
            .zip(&fd)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0f64, f64::max);
        assert!(max_err > 1e-3, "sign error went undetected (max err {max_err:.3e})");
    }

    #[test]
    fn angle_vector_serializes_flat() {
        let a = AngleVector::new(vec![0.1, 0.2], vec![0.3, 0.4]).unwrap();
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, "[0.1,0.2,0.3,0.4]");
        let back: AngleVector = serde_json::from_str(&json).unwrap();
        assert_eq!(a, back);
    }

    #[test]
    fn approximation_ratio_contract() {
        assert_abs_diff_eq!(approximation_ratio(-2.0, -2.0).unwrap(), 1.0);
        assert_abs_diff_eq!(approximation_ratio(0.0, -1.0).unwrap(), 0.0);
        assert!(matches!(approximation_ratio(1.0, 0.0), Err(Error::InvalidProblem { .. })));
    }

    #[test]
    fn commutator_b_requires_stationarity() {
        let g = single_edge();
        let sim = Simulator::new(&g).unwrap();
        let a = AngleVector::new(vec![0.3], vec![0.5]).unwrap();
        assert!(matches!(
            sim.commutator_expectation_b(&a, BoundaryCase::LastLayer),
            Err(Error::NotStationary { .. })
        ));
    }
}
