//! Exact statevector simulation of the QAOA ansatz for MaxCut, with analytic
//! construction of index-1 saddle points (transition states) from converged
//! minima and a recursive greedy initialization built on top of them.
//!
//! The crate is organised around the pipeline:
//!
//! 1. [`problem`]: graph ensembles, the MaxCut cost diagonal, and the exact
//!    brute-force optimum.
//! 2. [`simulator`]: ansatz evolution, energy, analytic gradient (adjoint
//!    sweep), and finite-difference Hessians with eigenvalue inertia.
//! 3. [`optimizer`]: BFGS with a strong-Wolfe line search, plus the depth-1
//!    grid search.
//! 4. [`landscape`]: symmetry folding, transition-state construction,
//!    index-1 directions, and descent from saddles.
//! 5. [`strategies`]: the greedy transition-state strategy and the
//!    interpolation / annealing-ramp / multistart baselines.
//! 6. [`initgraph`]: the leveled graph of deduplicated minima connected by
//!    saddle descents, with DOT/JSON export.
//! 7. [`experiment`] + [`verify`]: ensemble sweeps, CSV aggregation, and the
//!    self-check suite behind the `verify` CLI subcommand.
//!
//! Conventions used throughout: qubit `k` is bit `k` of the basis index
//! (qubit 0 is the least-significant bit); the mixer Hamiltonian is
//! `-sum_i X_i`, so one mixer layer rotates every qubit by `exp(+i beta X)`;
//! parameter vectors are ordered `(beta_1..beta_p, gamma_1..gamma_p)`.

pub mod error;
pub mod experiment;
pub mod initgraph;
pub mod landscape;
pub mod optimizer;
pub mod problem;
pub mod rng;
pub mod simulator;
pub mod strategies;
pub mod verify;

pub use error::Error;

/// Convenience result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
