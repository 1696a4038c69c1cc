//! Self-check suite behind the `verify` CLI subcommand.
//!
//! Each check exercises one hard property of the implementation on small
//! instances and reports the measured residual against its threshold.

use serde::{Deserialize, Serialize};

use crate::landscape::{classify_ts, enumerate_ts, fold_to_fundamental};
use crate::optimizer::{grid_search_p1, Classification, GridSearchOptions, MinimizeOptions};
use crate::problem::{generate_graph, Ensemble};
use crate::rng::SplitMix64;
use crate::simulator::{inf_norm, AngleVector, BoundaryCase, Simulator};
use crate::strategies::{greedy_run, interp_init, StrategyOptions};
use crate::Result;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PropertyCheck {
    pub name: String,
    pub passed: bool,
    pub max_residual: f64,
    pub threshold: f64,
    pub details: String,
}

impl PropertyCheck {
    fn new(name: &str, max_residual: f64, threshold: f64, details: String) -> Self {
        PropertyCheck {
            name: name.to_string(),
            passed: max_residual < threshold,
            max_residual,
            threshold,
            details,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<PropertyCheck>,
    pub singular_ts_count: usize,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            s.push_str(&format!(
                "{}  {:<28} residual {:>12.3e}  (threshold {:.0e})  {}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.max_residual,
                c.threshold,
                c.details
            ));
        }
        s.push_str(&format!("singular transition states encountered: {}\n", self.singular_ts_count));
        s
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub sizes: Vec<usize>,
    pub seed: u64,
    /// Random cases per check.
    pub cases: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { sizes: vec![4, 6, 8], seed: 42, cases: 20 }
    }
}

fn random_angles(rng: &mut SplitMix64, p: usize, span: f64) -> AngleVector {
    let beta: Vec<f64> = (0..p).map(|_| span * (rng.next_f64() - 0.5)).collect();
    let gamma: Vec<f64> = (0..p).map(|_| span * (rng.next_f64() - 0.5)).collect();
    AngleVector::new(beta, gamma).expect("finite angles")
}

/// Analytic gradient vs central finite differences on random cases. The
/// simulator is passed in so a deliberately miswired one can be checked to
/// make sure this test has teeth.
pub fn gradient_fd_check(sims: &[(Simulator, usize)], cases: usize, seed: u64) -> PropertyCheck {
    if sims.is_empty() || cases == 0 {
        return PropertyCheck::new("gradient-vs-fd", f64::INFINITY, 1e-6, "no cases".into());
    }
    let mut rng = SplitMix64::new(seed);
    let mut max_err = 0.0f64;
    let mut count = 0;
    'outer: loop {
        for (sim, _) in sims {
            for p in 1..=4 {
                if count >= cases {
                    break 'outer;
                }
                let a = random_angles(&mut rng, p, 2.0);
                let analytic = sim.gradient(&a);
                let flat = a.to_flat();
                for (j, &g) in analytic.iter().enumerate() {
                    let h = 1e-5;
                    let mut plus = flat.clone();
                    let mut minus = flat.clone();
                    plus[j] += h;
                    minus[j] -= h;
                    let fd = (sim.energy(&AngleVector::from_flat(&plus).unwrap())
                        - sim.energy(&AngleVector::from_flat(&minus).unwrap()))
                        / (2.0 * h);
                    max_err = max_err.max((g - fd).abs());
                }
                count += 1;
            }
        }
    }
    PropertyCheck::new("gradient-vs-fd", max_err, 1e-6, format!("{count} random cases"))
}

fn symmetry_check(cfg: &VerifyConfig) -> PropertyCheck {
    use std::f64::consts::{FRAC_PI_2, PI};
    let mut rng = SplitMix64::new(cfg.seed ^ 0x51);
    let mut max_err = 0.0f64;
    let mut cases = 0;
    for &n in &cfg.sizes {
        let n = if n % 2 == 1 { n + 1 } else { n };
        let g = generate_graph(Ensemble::Rrg3, n, 100 + n as u64, None).unwrap();
        let sim = Simulator::new(&g).unwrap();
        for _ in 0..cfg.cases / 2 {
            let p = 1 + rng.next_index(4);
            let a = random_angles(&mut rng, p, 3.0);
            let e0 = sim.energy(&a);
            // (i) add pi to every angle.
            let shifted = AngleVector::new(
                a.beta().iter().map(|b| b + PI).collect(),
                a.gamma().iter().map(|gm| gm + PI).collect(),
            )
            .unwrap();
            max_err = max_err.max((sim.energy(&shifted) - e0).abs());
            // (ii) add pi/2 to one mixer angle (odd-regular instance).
            let l = rng.next_index(p);
            let mut beta = a.beta().to_vec();
            beta[l] += FRAC_PI_2;
            let one = AngleVector::new(beta, a.gamma().to_vec()).unwrap();
            max_err = max_err.max((sim.energy(&one) - e0).abs());
            // (iii) global sign flip.
            let neg = AngleVector::new(
                a.beta().iter().map(|b| -b).collect(),
                a.gamma().iter().map(|gm| -gm).collect(),
            )
            .unwrap();
            max_err = max_err.max((sim.energy(&neg) - e0).abs());
            // (iv') tail transform from a random layer onward: composing the
            // single-layer mixer-sign flip across the tail flips every later
            // mixer angle, shifts the chosen phase angle by a half period,
            // and shifts each later phase angle by a full period.
            let k = rng.next_index(p);
            let mut beta = a.beta().to_vec();
            let mut gamma = a.gamma().to_vec();
            gamma[k] += FRAC_PI_2;
            for j in k..p {
                beta[j] = -beta[j];
                if j > k {
                    gamma[j] += PI;
                }
            }
            let tail = AngleVector::new(beta, gamma).unwrap();
            max_err = max_err.max((sim.energy(&tail) - e0).abs());
            cases += 4;
        }
    }
    PropertyCheck::new("symmetry-suite", max_err, 1e-10, format!("{cases} transformations"))
}

fn ts_checks() -> (PropertyCheck, PropertyCheck, PropertyCheck, usize) {
    let mut grad_res = 0.0f64;
    let mut energy_res = 0.0f64;
    let mut inertia_failures = 0usize;
    let mut singular = 0usize;
    let mut total = 0usize;
    for instance in 0..3u64 {
        let g = generate_graph(Ensemble::Rrg3, 8, 200 + instance, None).unwrap();
        let sim = Simulator::new(&g).unwrap();
        let opts = StrategyOptions { grid_resolution: 16, ..Default::default() };
        let run = greedy_run(&g, 3, &opts).unwrap();
        for record in &run.per_depth {
            let parent = crate::optimizer::local_minimize(
                &g,
                &record.angles,
                &MinimizeOptions::classified(),
            )
            .unwrap();
            if parent.classification != Classification::Minimum {
                continue;
            }
            for ts in enumerate_ts(&g, &parent).unwrap() {
                total += 1;
                grad_res = grad_res.max(inf_norm(&sim.gradient(&ts.angles)));
                energy_res = energy_res.max((ts.energy - parent.energy).abs());
                let (class, _) = classify_ts(&sim, &ts).unwrap();
                match class {
                    Classification::TransitionState => {}
                    Classification::Singular => singular += 1,
                    _ => inertia_failures += 1,
                }
            }
        }
    }
    (
        PropertyCheck::new("ts-stationarity", grad_res, 1e-6, format!("{total} saddles")),
        PropertyCheck::new("ts-energy-conservation", energy_res, 1e-12, format!("{total} saddles")),
        PropertyCheck::new(
            "ts-inertia",
            inertia_failures as f64,
            0.5,
            format!("{inertia_failures} of {total} saddles misclassified"),
        ),
        singular,
    )
}

fn determinant_identity_check() -> PropertyCheck {
    let mut max_rel = 0.0f64;
    let mut cases = 0;
    for instance in 0..2u64 {
        let g = generate_graph(Ensemble::Rrg3, 6, 300 + instance, None).unwrap();
        let sim = Simulator::new(&g).unwrap();
        let opts = StrategyOptions { grid_resolution: 16, ..Default::default() };
        let run = greedy_run(&g, 2, &opts).unwrap();
        for record in &run.per_depth {
            let parent = crate::optimizer::local_minimize(
                &g,
                &record.angles,
                &MinimizeOptions::classified(),
            )
            .unwrap();
            if parent.classification != Classification::Minimum {
                continue;
            }
            let p = parent.depth();
            let h_parent = sim.hessian(&parent.angles, Some(1e-5)).unwrap();
            for (case, (i, j)) in
                [(BoundaryCase::FirstLayer, (1, 1)), (BoundaryCase::LastLayer, (p + 1, p + 1))]
            {
                let ts = crate::landscape::construct_ts(&g, &parent, i, j).unwrap();
                let h_ts = sim.hessian(&ts.angles, Some(1e-5)).unwrap();
                let b = sim.commutator_expectation_b(&parent.angles, case).unwrap();
                let lhs = h_ts.determinant() / h_parent.determinant();
                let rhs = -b * b;
                max_rel = max_rel.max((lhs - rhs).abs() / rhs.abs());
                cases += 1;
            }
        }
    }
    PropertyCheck::new("determinant-identity", max_rel, 1e-3, format!("{cases} boundary saddles"))
}

fn monotonicity_check() -> PropertyCheck {
    let g = generate_graph(Ensemble::Rrg3, 8, 400, None).unwrap();
    let opts = StrategyOptions { grid_resolution: 16, ..Default::default() };
    let run = greedy_run(&g, 4, &opts).unwrap();
    let worst = run
        .per_depth
        .windows(2)
        .map(|w| w[1].energy - w[0].energy)
        .fold(0.0f64, f64::max);
    PropertyCheck::new("greedy-monotonicity", worst, 1e-9, "depths 1..=4".into())
}

fn interp_identity_check() -> PropertyCheck {
    let g = generate_graph(Ensemble::Rrg3, 6, 500, None).unwrap();
    let grid = grid_search_p1(
        &g,
        &GridSearchOptions { resolution: 16, minimize: MinimizeOptions::classified() },
    )
    .unwrap();
    let via_formula = interp_init(&grid.angles).unwrap().to_flat();
    let ts_list = enumerate_ts(&g, &grid).unwrap();
    let p = grid.depth();
    let mut via_ts = vec![0.0f64; 2 * (p + 1)];
    for ts in ts_list.iter().filter(|t| t.kind == crate::landscape::TsKind::Symmetric) {
        for (acc, x) in via_ts.iter_mut().zip(ts.angles.to_flat()) {
            *acc += x;
        }
    }
    for x in via_ts.iter_mut() {
        *x /= p as f64;
    }
    let res = via_formula
        .iter()
        .zip(&via_ts)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    PropertyCheck::new("interp-identity", res, 1e-14, "center-of-mass route".into())
}

fn fold_check(cfg: &VerifyConfig) -> PropertyCheck {
    let g = generate_graph(Ensemble::Rrg3, 8, 600, None).unwrap();
    let sim = Simulator::new(&g).unwrap();
    let mut rng = SplitMix64::new(cfg.seed ^ 0xF01D);
    let mut max_err = 0.0f64;
    for _ in 0..cfg.cases {
        let p = 1 + rng.next_index(4);
        let a = random_angles(&mut rng, p, 12.0);
        let folded = fold_to_fundamental(&a, true);
        let twice = fold_to_fundamental(&folded, true);
        max_err = max_err.max((sim.energy(&a) - sim.energy(&folded)).abs());
        for (x, y) in folded.to_flat().iter().zip(twice.to_flat()) {
            max_err = max_err.max((x - y).abs());
        }
    }
    PropertyCheck::new("fold-energy-idempotence", max_err, 1e-10, format!("{} cases", cfg.cases))
}

/// Runs the whole suite on small instances.
pub fn verify_suite(cfg: &VerifyConfig) -> Result<VerifyReport> {
    let mut sims = Vec::new();
    for &n in &cfg.sizes {
        let n = if n % 2 == 1 { n + 1 } else { n };
        let g = generate_graph(Ensemble::Rrg3, n, n as u64, None)?;
        sims.push((Simulator::new(&g)?, n));
    }
    let mut checks = vec![gradient_fd_check(&sims, 50.min(cfg.cases * 3), cfg.seed)];
    checks.push(symmetry_check(cfg));
    let (stationarity, energy, inertia, singular) = ts_checks();
    checks.push(stationarity);
    checks.push(energy);
    checks.push(inertia);
    checks.push(determinant_identity_check());
    checks.push(monotonicity_check());
    checks.push(interp_identity_check());
    checks.push(fold_check(cfg));
    Ok(VerifyReport { checks, singular_ts_count: singular })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_on_default_instances() {
        let cfg = VerifyConfig { sizes: vec![4, 6], cases: 8, ..Default::default() };
        let report = verify_suite(&cfg).unwrap();
        assert!(report.all_passed(), "{}", report.render());
        assert_eq!(report.singular_ts_count, 0);
    }

    #[test]
    fn injected_mixer_sign_error_fails_the_gradient_check() {
        let g = generate_graph(Ensemble::Rrg3, 6, 6, None).unwrap();
        let mut sim = Simulator::new(&g).unwrap();
        sim.set_mixer_sign_for_validation(-1.0);
        let check = gradient_fd_check(&[(sim, 6)], 10, 42);
        assert!(!check.passed, "mutated simulator slipped through: {check:?}");
    }
}
