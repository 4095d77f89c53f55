//! Constrained online-mirror-descent engine: optimistic decision sets, the
//! entropic Bregman projection onto the simplex intersected with halfspaces,
//! and the fixed-share mix.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::ConstraintEstimator;
use crate::offline::minimax_over_simplex;
use crate::strategy::{ArmIndex, Strategy};

/// Default stopping tolerance on constraint residuals.
pub const PROJECTION_TOL: f64 = 1e-7;
/// Default iteration budget for the dual solver.
pub const PROJECTION_MAX_ITER: usize = 10_000;
/// Exponent clamp applied before exponentiation.
const EXP_CLAMP: f64 = 500.0;

/// Optimistic feasible region: simplex points `x` with `rows[i] . x <= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionSet {
    /// m rows of K optimistic constraint coefficients.
    pub rows: Vec<Vec<f64>>,
}

impl DecisionSet {
    pub fn new(rows: Vec<Vec<f64>>) -> Self {
        debug_assert!(rows
            .iter()
            .flatten()
            .all(|v| (-3.0..=3.0).contains(v)));
        Self { rows }
    }

    /// Worst residual of `x` over the rows.
    pub fn max_residual(&self, x: &Strategy) -> f64 {
        self.rows
            .iter()
            .map(|row| x.dot(row))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// How the projection terminated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectionStatus {
    /// The point was already feasible; no multiplier is active.
    Interior,
    /// At least one constraint is active at the solution.
    Boundary,
    /// The dual solver ran out of iterations; the returned point minimizes the
    /// worst residual instead.
    Fallback,
}

/// Result of a Bregman projection.
#[derive(Debug, Clone)]
pub struct ProjectionResult {
    pub point: Strategy,
    pub multipliers: Vec<f64>,
    pub status: ProjectionStatus,
    pub iterations: usize,
}

/// Builds the optimistic set `rows[i][a] = mean(i, a) - radius(a)`.
pub fn build_decision_set(est: &ConstraintEstimator) -> DecisionSet {
    let params = est.params();
    let rows = (0..params.constraints)
        .map(|i| {
            (0..params.arms)
                .map(|a| est.mean(i, ArmIndex(a)) - est.radius(ArmIndex(a)))
                .collect()
        })
        .collect();
    DecisionSet::new(rows)
}

/// Optimistic set with the known-corruption radius in place of the plain one.
pub fn build_decision_set_known_c(est: &ConstraintEstimator, c: f64) -> Result<DecisionSet> {
    let params = est.params();
    let mut rows = Vec::with_capacity(params.constraints);
    for i in 0..params.constraints {
        let mut row = Vec::with_capacity(params.arms);
        for a in 0..params.arms {
            row.push(est.mean(i, ArmIndex(a)) - est.radius_known_c(ArmIndex(a), c)?);
        }
        rows.push(row);
    }
    Ok(DecisionSet::new(rows))
}

/// Unnormalized exponentiated-gradient point `x(a) * exp(-eta * loss(a))`.
pub fn unconstrained_md_point(x: &Strategy, loss_vec: &[f64], eta: f64) -> Vec<f64> {
    debug_assert_eq!(x.len(), loss_vec.len());
    x.probs()
        .iter()
        .zip(loss_vec.iter())
        .map(|(p, l)| p * (-eta * l).exp())
        .collect()
}

/// Mixes toward uniform at rate `1/T`; every output entry is at least
/// `1/(T K)`.
pub fn fixed_share_mix(x_tilde: &Strategy, horizon: u64, arms: usize) -> Strategy {
    let uniform = Strategy::uniform(arms).expect("arms >= 1");
    x_tilde.mix(&uniform, 1.0 / horizon as f64)
}

/// Whether the set contains any simplex point, together with the point
/// minimizing the worst residual.
pub fn feasibility_check(ds: &DecisionSet) -> Result<(bool, Strategy)> {
    let (worst, witness) = minimax_over_simplex(&ds.rows)?;
    Ok((worst <= PROJECTION_TOL, witness))
}

struct DualProblem<'a> {
    log_raw: Vec<f64>,
    rows: &'a [Vec<f64>],
}

impl<'a> DualProblem<'a> {
    /// Primal point for multipliers `lambda`, via a stable softmax.
    fn point(&self, lambda: &[f64]) -> Vec<f64> {
        let logits: Vec<f64> = self
            .log_raw
            .iter()
            .enumerate()
            .map(|(a, lr)| {
                let penalty: f64 = lambda
                    .iter()
                    .zip(self.rows.iter())
                    .map(|(l, row)| l * row[a])
                    .sum();
                lr - penalty.clamp(-EXP_CLAMP, EXP_CLAMP)
            })
            .collect();
        let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
        let sum: f64 = weights.iter().sum();
        weights.iter().map(|w| w / sum).collect()
    }

    /// Dual objective (up to an additive constant); concave in `lambda`.
    fn value(&self, lambda: &[f64]) -> f64 {
        let logits: Vec<f64> = self
            .log_raw
            .iter()
            .enumerate()
            .map(|(a, lr)| {
                let penalty: f64 = lambda
                    .iter()
                    .zip(self.rows.iter())
                    .map(|(l, row)| l * row[a])
                    .sum();
                lr - penalty.clamp(-EXP_CLAMP, EXP_CLAMP)
            })
            .collect();
        let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + logits.iter().map(|l| (l - max).exp()).sum::<f64>().ln();
        -lse
    }

    fn residuals(&self, point: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.iter().zip(point.iter()).map(|(a, p)| a * p).sum())
            .collect()
    }

    fn residual_row(&self, lambda: &[f64], i: usize) -> f64 {
        let point = self.point(lambda);
        self.rows[i]
            .iter()
            .zip(point.iter())
            .map(|(a, p)| a * p)
            .sum()
    }
}

fn converged(lambda: &[f64], residuals: &[f64], tol: f64) -> bool {
    let max_resid = residuals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let compl: f64 = lambda
        .iter()
        .zip(residuals.iter())
        .map(|(l, r)| l * r.abs())
        .sum();
    max_resid <= tol && compl <= tol
}

fn finish(
    problem: &DualProblem<'_>,
    lambda: Vec<f64>,
    iterations: usize,
) -> Result<ProjectionResult> {
    let point = Strategy::normalized(&problem.point(&lambda))?;
    let status = if lambda.iter().all(|l| *l <= 1e-12) {
        ProjectionStatus::Interior
    } else {
        ProjectionStatus::Boundary
    };
    Ok(ProjectionResult {
        point,
        multipliers: lambda,
        status,
        iterations,
    })
}

fn fallback(ds: &DecisionSet, lambda: Vec<f64>, iterations: usize) -> Result<ProjectionResult> {
    let (_, witness) = feasibility_check(ds)?;
    Ok(ProjectionResult {
        point: witness,
        multipliers: lambda,
        status: ProjectionStatus::Fallback,
        iterations,
    })
}

/// Entropic Bregman projection of `raw` onto the set.
///
/// Maximizes the concave dual by cyclic coordinate ascent: each multiplier is
/// driven to its exact one-dimensional optimum by doubling until the row
/// residual changes sign and then bisecting. A single row needs one such
/// solve. `warm_start` seeds the multipliers, typically with the previous
/// round's values.
pub fn kl_project(
    raw: &[f64],
    ds: &DecisionSet,
    tol: f64,
    max_iter: usize,
    warm_start: Option<&[f64]>,
) -> Result<ProjectionResult> {
    if raw.is_empty() {
        return Err(Error::InvalidDimension);
    }
    if raw.iter().any(|v| !v.is_finite() || *v <= 0.0) {
        return Err(Error::NonPositiveWeight);
    }
    let m = ds.rows.len();
    let problem = DualProblem {
        log_raw: raw.iter().map(|v| v.ln()).collect(),
        rows: &ds.rows,
    };
    if m == 0 {
        return finish(&problem, Vec::new(), 0);
    }
    let mut lambda: Vec<f64> = match warm_start {
        Some(w) if w.len() == m && w.iter().all(|l| l.is_finite() && *l >= 0.0) => w.to_vec(),
        _ => vec![0.0; m],
    };
    let compl_tol = tol / (2.0 * m as f64);
    let mut iterations = 0usize;
    let mut value = problem.value(&lambda);
    loop {
        let point = problem.point(&lambda);
        let residuals = problem.residuals(&point);
        if converged(&lambda, &residuals, tol) {
            return finish(&problem, lambda, iterations.max(1));
        }
        if iterations >= max_iter {
            return fallback(ds, lambda, iterations);
        }
        let mut moved = false;
        for i in 0..m {
            iterations += 1;
            let before = lambda[i];
            match coordinate_optimum(&problem, &mut lambda, i, compl_tol) {
                Some(li) => lambda[i] = li,
                None => return fallback(ds, lambda, iterations),
            }
            if (lambda[i] - before).abs() > 1e-14 * before.abs().max(1.0) {
                moved = true;
            }
            if iterations >= max_iter {
                break;
            }
        }
        // Each exact coordinate solve ascends the dual.
        let new_value = problem.value(&lambda);
        debug_assert!(new_value >= value - 1e-9 * value.abs().max(1.0));
        value = new_value;
        if !moved {
            // Coordinate-wise optimum of a smooth concave function is the
            // global optimum; if the stopping rule still fails the problem is
            // numerically degenerate.
            let point = problem.point(&lambda);
            let residuals = problem.residuals(&point);
            if converged(&lambda, &residuals, tol) {
                return finish(&problem, lambda, iterations);
            }
            return fallback(ds, lambda, iterations);
        }
    }
}

/// One-dimensional maximizer in coordinate `i` with the other multipliers
/// fixed: zero when the row is already satisfied there, otherwise the root of
/// the monotone residual. `None` when no finite multiplier satisfies the row.
fn coordinate_optimum(
    problem: &DualProblem<'_>,
    lambda: &mut [f64],
    i: usize,
    compl_tol: f64,
) -> Option<f64> {
    let saved = lambda[i];
    let eval = |li: f64, lambda: &mut [f64]| -> f64 {
        lambda[i] = li;
        let r = problem.residual_row(lambda, i);
        lambda[i] = saved;
        r
    };
    if eval(0.0, lambda) <= 0.0 {
        return Some(0.0);
    }
    let mut hi = saved.max(1.0);
    while eval(hi, lambda) > 0.0 {
        hi *= 2.0;
        if hi > 1e30 {
            return None;
        }
    }
    let mut lo = 0.0f64;
    for _ in 0..200 {
        let r_hi = eval(hi, lambda);
        if r_hi <= 0.0 && hi * r_hi.abs() <= compl_tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if eval(mid, lambda) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= f64::EPSILON * hi.max(1.0) {
            break;
        }
    }
    Some(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{ConstraintEstimator, EstimatorParams, FeedbackMode};
    use crate::offline::grid_oracle;
    use crate::strategy::RngStream;

    /// KL divergence with the linear correction term, defined for x on the
    /// simplex and y entrywise positive.
    fn kl_div(x: &[f64], y: &[f64]) -> f64 {
        x.iter()
            .zip(y.iter())
            .map(|(a, b)| {
                let entropy = if *a > 0.0 { a * (a / b).ln() } else { 0.0 };
                entropy - a + b
            })
            .sum()
    }

    #[test]
    fn md_point_identity_cases() {
        let x = Strategy::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(unconstrained_md_point(&x, &[1.0, 0.0], 0.0), vec![0.5, 0.5]);
        assert_eq!(unconstrained_md_point(&x, &[0.0, 0.0], 1.0), vec![0.5, 0.5]);
        let moved = unconstrained_md_point(&x, &[1.0, 0.0], std::f64::consts::LN_2);
        assert!((moved[0] - 0.25).abs() < 1e-12);
        assert!((moved[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn decision_set_from_estimator() {
        let params = EstimatorParams {
            horizon: 100,
            arms: 2,
            constraints: 1,
            delta: 0.1,
        };
        let est = ConstraintEstimator::new(FeedbackMode::Bandit, params);
        let ds = build_decision_set(&est);
        // No samples: mean 0, radius capped at 2.
        assert_eq!(ds.rows, vec![vec![-2.0, -2.0]]);
    }

    #[test]
    fn projection_of_feasible_point_is_identity() {
        let ds = DecisionSet::new(vec![vec![-1.0, -1.0]]);
        let raw = vec![0.6, 0.9];
        let result = kl_project(&raw, &ds, PROJECTION_TOL, 1000, None).unwrap();
        assert_eq!(result.status, ProjectionStatus::Interior);
        assert!((result.point.probs()[0] - 0.4).abs() < 1e-12);
        assert!(result.multipliers.iter().all(|l| *l == 0.0));
    }

    #[test]
    fn projection_hits_boundary_with_known_multiplier() {
        let ds = DecisionSet::new(vec![vec![1.0, -1.0]]);
        let raw = vec![0.8, 0.2];
        let result = kl_project(&raw, &ds, 1e-10, 10_000, None).unwrap();
        assert_eq!(result.status, ProjectionStatus::Boundary);
        assert!((result.point.probs()[0] - 0.5).abs() < 1e-6);
        assert!((result.multipliers[0] - std::f64::consts::LN_2).abs() < 1e-4);
    }

    #[test]
    fn projection_rejects_nonpositive_input() {
        let ds = DecisionSet::new(vec![vec![-1.0, -1.0]]);
        assert!(matches!(
            kl_project(&[0.0, 1.0], &ds, 1e-7, 100, None),
            Err(Error::NonPositiveWeight)
        ));
    }

    #[test]
    fn projection_matches_grid_on_two_rows() {
        let mut rng = RngStream::new(77);
        for _ in 0..25 {
            let raw: Vec<f64> = (0..3).map(|_| 0.05 + rng.next_f64()).collect();
            let rows: Vec<Vec<f64>> = (0..2)
                .map(|_| (0..3).map(|_| rng.next_f64() * 1.2 - 0.7).collect())
                .collect();
            let ds = DecisionSet::new(rows.clone());
            let (nonempty, _) = feasibility_check(&ds).unwrap();
            if !nonempty {
                continue;
            }
            let result = kl_project(&raw, &ds, PROJECTION_TOL, PROJECTION_MAX_ITER, None).unwrap();
            assert_ne!(result.status, ProjectionStatus::Fallback);
            let grid = grid_oracle(3, |x| kl_div(x, &raw), &rows, 1e-3)
                .unwrap()
                .expect("nonempty set has lattice points");
            // The projector is never worse than the best lattice point, and
            // the locally refined lattice argmin does not drift away from it.
            assert!(kl_div(result.point.probs(), &raw) <= grid.0 + 1e-9);
            let refined = crate::validation::refined_lattice_argmin(
                3,
                |x| kl_div(x, &raw),
                &rows,
                result.point.probs(),
                3e-3,
                1e-5,
            )
            .unwrap();
            let dist: f64 = result
                .point
                .probs()
                .iter()
                .zip(refined.1.iter())
                .map(|(a, b)| (a - b).abs())
                .sum();
            assert!(dist <= 1e-3, "distance {dist}");
        }
    }

    #[test]
    fn projection_idempotent() {
        let ds = DecisionSet::new(vec![vec![0.5, -0.5], vec![-0.2, 0.1]]);
        let raw = vec![0.9, 0.1];
        let first = kl_project(&raw, &ds, PROJECTION_TOL, PROJECTION_MAX_ITER, None).unwrap();
        let second = kl_project(
            first.point.probs(),
            &ds,
            PROJECTION_TOL,
            PROJECTION_MAX_ITER,
            None,
        )
        .unwrap();
        assert!(first.point.l1_distance(&second.point) <= 1e-6);
    }

    #[test]
    fn generalized_pythagorean_inequality() {
        let mut rng = RngStream::new(3);
        let ds = DecisionSet::new(vec![vec![0.6, -0.4, -0.1], vec![-0.5, 0.3, -0.2]]);
        let raw = vec![0.7, 0.2, 0.1];
        let raw_norm = Strategy::normalized(&raw).unwrap();
        let proj = kl_project(&raw, &ds, 1e-9, PROJECTION_MAX_ITER, None)
            .unwrap()
            .point;
        let mut tested = 0;
        while tested < 50 {
            let candidate: Vec<f64> = (0..3).map(|_| 0.01 + rng.next_f64()).collect();
            let u = Strategy::normalized(&candidate).unwrap();
            if ds.max_residual(&u) > 0.0 {
                continue;
            }
            tested += 1;
            let lhs = kl_div(u.probs(), raw_norm.probs());
            let rhs = kl_div(u.probs(), proj.probs()) + kl_div(proj.probs(), raw_norm.probs());
            assert!(lhs >= rhs - 1e-6, "lhs {lhs} rhs {rhs}");
        }
    }

    #[test]
    fn fixed_share_examples_and_floor() {
        let x = Strategy::new(vec![1.0, 0.0]).unwrap();
        let mixed = fixed_share_mix(&x, 10, 2);
        assert!((mixed.probs()[0] - 0.95).abs() < 1e-12);
        assert!((mixed.probs()[1] - 0.05).abs() < 1e-12);

        let u = Strategy::uniform(5).unwrap();
        let mixed = fixed_share_mix(&u, 100, 5);
        assert!(mixed.l1_distance(&u) < 1e-12);

        for (t, k) in [(10u64, 2usize), (10, 5), (10_000, 2), (10_000, 5)] {
            let mut point = vec![0.0; k];
            point[0] = 1.0;
            let x = Strategy::new(point).unwrap();
            let mixed = fixed_share_mix(&x, t, k);
            let floor = 1.0 / (t as f64 * k as f64);
            for p in mixed.probs() {
                assert!(*p >= floor - 1e-15);
            }
        }
    }

    #[test]
    fn feasibility_examples() {
        let ds = DecisionSet::new(vec![vec![-2.0, -2.0]]);
        assert!(feasibility_check(&ds).unwrap().0);

        let ds = DecisionSet::new(vec![vec![1.0, 1.0]]);
        assert!(!feasibility_check(&ds).unwrap().0);

        let ds = DecisionSet::new(vec![vec![0.4, -0.6]]);
        let (nonempty, witness) = feasibility_check(&ds).unwrap();
        assert!(nonempty);
        assert!((witness.probs()[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn fallback_on_empty_set() {
        let ds = DecisionSet::new(vec![vec![0.5, 0.5]]);
        let result = kl_project(&[0.5, 0.5], &ds, 1e-7, 200, None).unwrap();
        assert_eq!(result.status, ProjectionStatus::Fallback);
    }
}
