//! Theory-facing post-processing: the corruption-aware comparator path, the
//! doubling phase partition, and concentration-coverage counting.

use crate::env::{sample_round, time_average_means, ProblemInstance};
use crate::error::{Error, Result};
use crate::estimators::{ConstraintEstimator, EstimatorParams, FeedbackMode, RADIUS_CAP};
use crate::offline::OfflineSolution;
use crate::strategy::{ArmIndex, RngStream, Strategy};

/// Which feasibility witness anchors the comparator path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaMode {
    /// Mixed-strategy witness; the mixing weight grows with the round index.
    Full,
    /// Single-arm witness; the weight is constant, set by the exploration
    /// length `T^beta`.
    Bandit { beta: f64 },
}

/// Per-round comparator path `(1 - alpha_t) * witness + alpha_t * optimum`.
#[derive(Debug, Clone)]
pub struct AlphaBenchmark {
    pub alphas: Vec<f64>,
    pub comparators: Vec<Strategy>,
}

/// Builds the comparator path from ground truth.
///
/// `corruption` is the realized level from the environment, never an estimate.
/// Zero corruption collapses the path onto the optimum. Fails when the
/// relevant margin is not strictly positive.
pub fn build_alpha_benchmark(
    offline: &OfflineSolution,
    corruption: f64,
    mode: AlphaMode,
    horizon: u64,
) -> Result<AlphaBenchmark> {
    if corruption < 0.0 {
        return Err(Error::NegativeCorruption(corruption));
    }
    let (margin, witness) = match mode {
        AlphaMode::Full => (offline.rho, offline.rho_strategy.clone()),
        AlphaMode::Bandit { .. } => (
            offline.rho_arm_value,
            Strategy::point_mass(offline.opt_strategy.len(), offline.rho_arm)?,
        ),
    };
    if margin <= 0.0 {
        return Err(Error::NonPositiveMargin(margin));
    }
    let alpha_at = |denom_rate: f64| margin / (margin + denom_rate);
    let mut alphas = Vec::with_capacity(horizon as usize);
    match mode {
        AlphaMode::Full => {
            for t in 1..=horizon {
                alphas.push(alpha_at(2.0 * corruption / t as f64));
            }
        }
        AlphaMode::Bandit { beta } => {
            let pulls = (horizon as f64).powf(beta).ceil();
            let alpha = alpha_at(2.0 * corruption / pulls);
            alphas = vec![alpha; horizon as usize];
        }
    }
    let comparators = alphas
        .iter()
        .map(|alpha| witness.mix(&offline.opt_strategy, *alpha))
        .collect();
    Ok(AlphaBenchmark {
        alphas,
        comparators,
    })
}

/// Phases starting at 1, 2, 4, ... with the last phase truncated at `horizon`.
/// Returns inclusive 1-based `(start, end)` ranges.
pub fn doubling_partition(horizon: u64) -> Vec<(u64, u64)> {
    let mut phases = Vec::new();
    let mut start = 1u64;
    while start <= horizon {
        let end = (2 * start - 1).min(horizon);
        phases.push((start, end));
        start *= 2;
    }
    phases
}

/// Which concentration bound a coverage trial checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverageBound {
    /// Estimate vs the time-averaged mean: `radius + C/N + C/T`, capped.
    TimeAverage,
    /// Estimate vs the stationary anchor: `radius + C/N`, capped.
    Anchor,
}

/// Outcome of one seeded coverage trial.
#[derive(Debug, Clone, Copy)]
pub struct CoverageTrial {
    pub held_everywhere: bool,
    /// Largest observed `deviation - bound` over all (round, arm, constraint).
    pub worst_gap: f64,
}

/// Streams one estimator trajectory and checks the requested bound at every
/// round, arm, and constraint with at least one sample.
///
/// Bandit trials pull arms uniformly at random; full trials ingest the whole
/// violation matrix each round.
pub fn run_coverage_trial(
    inst: &ProblemInstance,
    mode: FeedbackMode,
    bound: CoverageBound,
    corruption: f64,
    delta: f64,
    rng: &mut RngStream,
) -> Result<CoverageTrial> {
    let params = EstimatorParams {
        horizon: inst.horizon,
        arms: inst.arms,
        constraints: inst.constraints,
        delta,
    };
    let mut est = ConstraintEstimator::new(mode, params);
    let averages = time_average_means(inst);
    let anchors = crate::env::compute_corruption(inst).anchors;
    let targets = match bound {
        CoverageBound::TimeAverage => &averages,
        CoverageBound::Anchor => &anchors,
    };
    let mut worst_gap = f64::NEG_INFINITY;
    for t in 1..=inst.horizon {
        let (losses, violations) = sample_round(inst, t, rng)?;
        let feedback = match mode {
            FeedbackMode::Full => crate::env::RoundFeedback {
                chosen: ArmIndex(0),
                loss: crate::env::LossFeedback::Full(losses),
                violations: crate::env::ViolationFeedback::Full(violations),
            },
            FeedbackMode::Bandit => {
                let arm = ArmIndex(rng.next_usize(inst.arms));
                crate::env::RoundFeedback {
                    chosen: arm,
                    loss: crate::env::LossFeedback::Bandit(losses[arm.get()]),
                    violations: crate::env::ViolationFeedback::Bandit(
                        violations.iter().map(|v| v[arm.get()]).collect(),
                    ),
                }
            }
        };
        est.update(&feedback)?;
        for a in 0..inst.arms {
            let arm = ArmIndex(a);
            let n = est.count(arm);
            if n == 0 {
                continue;
            }
            let mut allowance = est.radius(arm) + corruption / n as f64;
            if bound == CoverageBound::TimeAverage {
                allowance += corruption / inst.horizon as f64;
            }
            let allowance = allowance.min(RADIUS_CAP);
            for i in 0..inst.constraints {
                let deviation = (est.mean(i, arm) - targets[i][a]).abs();
                worst_gap = worst_gap.max(deviation - allowance);
            }
        }
    }
    Ok(CoverageTrial {
        held_everywhere: worst_gap <= 1e-12,
        worst_gap,
    })
}

/// Fraction of trials whose bound held at every checkpoint.
pub fn coverage_count(trials: &[CoverageTrial]) -> f64 {
    if trials.is_empty() {
        return 0.0;
    }
    trials.iter().filter(|t| t.held_everywhere).count() as f64 / trials.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{
        build_instance, compute_corruption, CorruptionPreset, CorruptionSchedule, EnvConfig,
        LossPattern,
    };
    use crate::offline::solve_opt;

    fn corrupted_instance() -> ProblemInstance {
        let schedule = CorruptionSchedule::from_preset(
            vec![vec![0.1, -0.7], vec![-0.2, -0.6]],
            CorruptionPreset::Spread,
            10.0,
            400,
            0,
            vec![0.5, 0.0],
        )
        .unwrap();
        let config = EnvConfig {
            horizon: 400,
            arms: 2,
            constraints: 2,
            loss_pattern: LossPattern::Constant {
                means: vec![0.2, 0.6],
            },
            schedule,
            rho_min: 0.05,
        };
        let mut rng = RngStream::new(0);
        build_instance(&config, &mut rng).unwrap()
    }

    #[test]
    fn alpha_full_formula() {
        let inst = corrupted_instance();
        let offline = solve_opt(&inst).unwrap();
        // Known margin and corruption give alpha = rho / (rho + 2C/t).
        let bench =
            build_alpha_benchmark(&offline, 10.0, AlphaMode::Full, inst.horizon).unwrap();
        let t = 100.0;
        let expected = offline.rho / (offline.rho + 2.0 * 10.0 / t);
        assert!((bench.alphas[99] - expected).abs() < 1e-12);
        // Monotone non-decreasing in t.
        for w in bench.alphas.windows(2) {
            assert!(w[0] <= w[1] + 1e-15);
        }
        // Every comparator stays on the simplex.
        for u in &bench.comparators {
            let sum: f64 = u.probs().iter().sum();
            assert!((sum - 1.0).abs() < 1e-9);
            assert!(u.probs().iter().all(|p| *p >= 0.0));
        }
    }

    #[test]
    fn alpha_zero_corruption_is_the_optimum() {
        let inst = corrupted_instance();
        let offline = solve_opt(&inst).unwrap();
        let bench = build_alpha_benchmark(&offline, 0.0, AlphaMode::Full, 50).unwrap();
        for (alpha, u) in bench.alphas.iter().zip(bench.comparators.iter()) {
            assert_eq!(*alpha, 1.0);
            assert!(u.l1_distance(&offline.opt_strategy) < 1e-12);
        }
    }

    #[test]
    fn alpha_bandit_constant() {
        let inst = corrupted_instance();
        let offline = solve_opt(&inst).unwrap();
        let bench = build_alpha_benchmark(
            &offline,
            10.0,
            AlphaMode::Bandit { beta: 0.5 },
            inst.horizon,
        )
        .unwrap();
        let pulls = (inst.horizon as f64).sqrt().ceil();
        let expected = offline.rho_arm_value / (offline.rho_arm_value + 20.0 / pulls);
        for alpha in &bench.alphas {
            assert!((alpha - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn alpha_requires_positive_margin() {
        let inst = corrupted_instance();
        let mut offline = solve_opt(&inst).unwrap();
        offline.rho = 0.0;
        assert!(matches!(
            build_alpha_benchmark(&offline, 1.0, AlphaMode::Full, 10),
            Err(Error::NonPositiveMargin(_))
        ));
    }

    #[test]
    fn doubling_partition_shapes() {
        assert_eq!(doubling_partition(1), vec![(1, 1)]);
        assert_eq!(doubling_partition(8), vec![(1, 1), (2, 3), (4, 7), (8, 8)]);
        for t in [1u64, 2, 3, 5, 8, 100, 1023, 1024] {
            let phases = doubling_partition(t);
            // Exactly floor(log2(T)) + 1 phases.
            assert_eq!(phases.len() as u32, t.ilog2() + 1, "T = {t}");
            // Disjoint cover of [1, T].
            let mut next = 1;
            for (start, end) in &phases {
                assert_eq!(*start, next);
                assert!(end >= start);
                next = end + 1;
            }
            assert_eq!(next, t + 1);
        }
    }

    #[test]
    fn coverage_holds_on_stochastic_instances() {
        let inst = corrupted_instance();
        let c = compute_corruption(&inst).level;
        for mode in [FeedbackMode::Full, FeedbackMode::Bandit] {
            let mut held = 0;
            let trials: Vec<CoverageTrial> = (0..40)
                .map(|seed| {
                    let mut rng = RngStream::new(1000 + seed);
                    run_coverage_trial(&inst, mode, CoverageBound::TimeAverage, c, 0.1, &mut rng)
                        .unwrap()
                })
                .collect();
            for t in &trials {
                if t.held_everywhere {
                    held += 1;
                }
            }
            assert!(held >= 36, "{mode:?}: {held}/40");
            assert_eq!(coverage_count(&trials), held as f64 / 40.0);
        }
    }

    #[test]
    fn coverage_exact_on_deterministic_means() {
        // Point-mass means at the boundary are noiseless, so the bound holds
        // in every trial.
        let config = EnvConfig {
            horizon: 50,
            arms: 2,
            constraints: 1,
            loss_pattern: LossPattern::Constant {
                means: vec![0.0, 1.0],
            },
            schedule: CorruptionSchedule::stationary(vec![vec![-1.0, -1.0]]),
            rho_min: 0.05,
        };
        let mut rng = RngStream::new(0);
        let inst = build_instance(&config, &mut rng).unwrap();
        for seed in 0..10 {
            let mut rng = RngStream::new(seed);
            let trial = run_coverage_trial(
                &inst,
                FeedbackMode::Bandit,
                CoverageBound::Anchor,
                0.0,
                0.1,
                &mut rng,
            )
            .unwrap();
            assert!(trial.held_everywhere);
        }
    }
}
