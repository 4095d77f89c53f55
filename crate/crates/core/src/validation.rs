//! Oracle-equivalence suites: every analytic path in the crate is checked
//! against an independent brute-force oracle. The CLI exposes these as
//! `validate`; the acceptance tests pin the same thresholds.

use serde::Serialize;

use crate::diagnostics::{coverage_count, run_coverage_trial, CoverageBound, CoverageTrial};
use crate::env::{
    build_instance, compute_corruption, CorruptionPreset, CorruptionSchedule, EnvConfig,
    LossPattern, ProblemInstance,
};
use crate::error::Result;
use crate::estimators::FeedbackMode;
use crate::offline::{
    compute_rho, grid_oracle, solve_opt, RhoMode, FEAS_TOL,
};
use crate::omd::{feasibility_check, kl_project, DecisionSet, ProjectionStatus};
use crate::strategy::RngStream;

/// Point tolerance for projection-vs-grid comparisons (l1).
pub const PROJECTION_MATCH_TOL: f64 = 1e-3;
/// Grid step used by the projection and LP suites.
pub const GRID_STEP: f64 = 1e-3;
/// Value tolerance for LP-vs-grid comparisons.
pub const LP_MATCH_TOL: f64 = 1e-3;
/// Value tolerance for the corruption meter against its anchor grid.
pub const CORRUPTION_MATCH_TOL: f64 = 1e-2;
/// Required coverage fraction at delta = 0.1.
pub const COVERAGE_FLOOR: f64 = 0.9;

/// Outcome of one validation suite.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub passed: bool,
    pub cases: usize,
    /// Worst observed discrepancy, suite-specific units.
    pub worst: f64,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(suite: &'static str) -> Self {
        Self {
            suite,
            passed: true,
            cases: 0,
            worst: 0.0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, gap: f64, limit: f64, context: String) {
        self.cases += 1;
        if gap > self.worst {
            self.worst = gap;
        }
        if gap > limit {
            self.passed = false;
            self.failures.push(format!("{context}: gap {gap:.3e}"));
        }
    }
}

/// KL divergence with the linear correction term; `x` on the simplex, `y`
/// entrywise positive.
pub fn kl_divergence(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y.iter())
        .map(|(a, b)| {
            let entropy = if *a > 0.0 { a * (a / b).ln() } else { 0.0 };
            entropy - a + b
        })
        .sum()
}

fn random_rows(rng: &mut RngStream, m: usize, k: usize) -> Vec<Vec<f64>> {
    (0..m)
        .map(|_| (0..k).map(|_| rng.next_f64() * 1.2 - 0.7).collect())
        .collect()
}

/// Exhaustive minimization over the fine sub-lattice inside a box around
/// `center`. Sharpens the coarse lattice argmin so point comparisons are not
/// dominated by lattice quantization.
pub fn refined_lattice_argmin<F>(
    k: usize,
    objective: F,
    rows: &[Vec<f64>],
    center: &[f64],
    radius: f64,
    fine_step: f64,
) -> Option<(f64, Vec<f64>)>
where
    F: Fn(&[f64]) -> f64,
{
    assert!(k == 2 || k == 3, "refinement supports K in {{2, 3}}");
    let feasible = |x: &[f64]| {
        rows.iter()
            .all(|row| row.iter().zip(x.iter()).map(|(a, v)| a * v).sum::<f64>() <= 1e-9)
    };
    let grid_range = |c: f64| {
        let lo = (((c - radius).max(0.0)) / fine_step).ceil() as i64;
        let hi = (((c + radius).min(1.0)) / fine_step).floor() as i64;
        (lo, hi)
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut consider = |x: Vec<f64>| {
        if x.iter().all(|v| *v >= -1e-12) && feasible(&x) {
            let value = objective(&x);
            if best.as_ref().map_or(true, |(v, _)| value < *v) {
                best = Some((value, x));
            }
        }
    };
    let (lo0, hi0) = grid_range(center[0]);
    for i in lo0..=hi0 {
        let x0 = i as f64 * fine_step;
        if k == 2 {
            consider(vec![x0, 1.0 - x0]);
        } else {
            let (lo1, hi1) = grid_range(center[1]);
            for j in lo1..=hi1 {
                let x1 = j as f64 * fine_step;
                let x2 = 1.0 - x0 - x1;
                if x2 >= -1e-12 {
                    consider(vec![x0, x1, x2]);
                }
            }
        }
    }
    best
}

/// Projection engine vs exhaustive lattice minimization of the divergence.
///
/// The coarse lattice provides a value certificate (the projector may never
/// lose to any feasible lattice point); the locally refined lattice pins the
/// argmin tightly enough for the point comparison at the same tolerance.
pub fn projection_suite(pairs: usize, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("projection_vs_grid");
    let mut rng = RngStream::new(seed);
    let mut produced = 0usize;
    while produced < pairs {
        let k = 2 + (produced % 2);
        let m = 1 + ((produced / 2) % 2);
        let raw: Vec<f64> = (0..k).map(|_| 0.05 + rng.next_f64()).collect();
        let rows = random_rows(&mut rng, m, k);
        produced += 1;
        let ds = DecisionSet::new(rows.clone());
        let (nonempty, _) = feasibility_check(&ds)?;
        if !nonempty {
            continue;
        }
        let proj = kl_project(&raw, &ds, 1e-9, 20_000, None)?;
        if proj.status == ProjectionStatus::Fallback {
            report.record(f64::INFINITY, 0.0, format!("pair {produced}: fallback"));
            continue;
        }
        let grid = grid_oracle(k, |x| kl_divergence(x, &raw), &rows, GRID_STEP)?
            .expect("nonempty set contains lattice points");
        // The projector must never lose to any feasible point of the global
        // coarse lattice.
        let value_gap = kl_divergence(proj.point.probs(), &raw) - grid.0;
        report.record(value_gap, 1e-7, format!("pair {produced} value"));
        // A fine lattice centered on the returned point must not drift away:
        // strict convexity pins the argmin, so a wrong point pushes the local
        // argmin to the box edge.
        let refined = refined_lattice_argmin(
            k,
            |x| kl_divergence(x, &raw),
            &rows,
            proj.point.probs(),
            3.0 * GRID_STEP,
            GRID_STEP / 100.0,
        );
        match refined {
            Some((_, point)) => {
                let dist: f64 = proj
                    .point
                    .probs()
                    .iter()
                    .zip(point.iter())
                    .map(|(a, b)| (a - b).abs())
                    .sum();
                report.record(dist, PROJECTION_MATCH_TOL, format!("pair {produced}"));
            }
            // The feasible region around the point is thinner than the fine
            // lattice; the value certificate above is the binding check.
            None => report.record(0.0, PROJECTION_MATCH_TOL, format!("pair {produced}")),
        }
    }
    Ok(report)
}

/// Random desk-scale instance with one guaranteed strictly feasible arm.
pub fn random_small_instance(rng: &mut RngStream, k: usize, m: usize, t: u64) -> ProblemInstance {
    let safe_arm = k - 1;
    let loss_means = (0..t)
        .map(|_| (0..k).map(|_| rng.next_f64()).collect())
        .collect();
    let constraint_means = (0..m)
        .map(|_| {
            (0..t)
                .map(|_| {
                    (0..k)
                        .map(|a| {
                            if a == safe_arm {
                                -0.1 - 0.9 * rng.next_f64()
                            } else {
                                rng.next_f64() * 2.0 - 1.0
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    ProblemInstance {
        horizon: t,
        arms: k,
        constraints: m,
        loss_means,
        constraint_means,
    }
}

/// Hindsight optimum and both feasibility margins vs the lattice oracle.
pub fn lp_suite(instances: usize, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("lp_vs_grid");
    let mut rng = RngStream::new(seed);
    for case in 0..instances {
        let k = 2 + (case % 2);
        let m = 1 + (case % 2);
        let t = 5 + (case as u64 % 16);
        let inst = random_small_instance(&mut rng, k, m, t);
        let sol = solve_opt(&inst)?;
        let aggregated = crate::offline::aggregated_rows(&inst);

        // Objective compared on the per-round scale so the tolerance is
        // horizon-independent.
        let objective: Vec<f64> = (0..k)
            .map(|a| {
                inst.loss_means.iter().map(|row| row[a]).sum::<f64>() / t as f64
            })
            .collect();
        let grid_opt = grid_oracle(
            k,
            |x| objective.iter().zip(x.iter()).map(|(c, v)| c * v).sum(),
            &aggregated,
            GRID_STEP,
        )?
        .expect("safe arm keeps the program feasible");
        let gap = (sol.opt_value / t as f64 - grid_opt.0).abs();
        report.record(gap, LP_MATCH_TOL, format!("case {case} opt"));

        // Mixed margin: maximize the worst slack over the lattice.
        let rows = crate::offline::distinct_rows(&inst);
        let grid_rho = grid_oracle(
            k,
            |x| {
                rows.iter()
                    .map(|row| row.iter().zip(x.iter()).map(|(a, v)| a * v).sum::<f64>())
                    .fold(f64::NEG_INFINITY, f64::max)
            },
            &[],
            GRID_STEP,
        )?
        .expect("unconstrained lattice");
        let (rho_mixed, _) = compute_rho(&inst, RhoMode::Mixed)?;
        let gap = (rho_mixed - (-grid_rho.0)).abs();
        report.record(gap, LP_MATCH_TOL, format!("case {case} rho_mixed"));

        // Arm margin: the lattice contains every vertex, so the scan must
        // match the vertex-restricted oracle exactly.
        let (rho_arm, _) = compute_rho(&inst, RhoMode::Arm)?;
        let mut vertex_best = f64::NEG_INFINITY;
        for a in 0..k {
            let mut margin = f64::INFINITY;
            for i in 0..m {
                for round in 1..=t {
                    margin = margin.min(-inst.constraint_row(i, round)[a]);
                }
            }
            vertex_best = vertex_best.max(margin);
        }
        report.record(
            (rho_arm - vertex_best).abs(),
            1e-12,
            format!("case {case} rho_arm"),
        );
        // Mixed margin dominates the best arm.
        report.record(
            (rho_arm - rho_mixed).max(0.0),
            FEAS_TOL,
            format!("case {case} rho ordering"),
        );
    }
    Ok(report)
}

/// Corruption meter vs a brute-force anchor grid, plus the exact bound tying
/// the anchor to the time-averaged means.
pub fn corruption_suite(instances: usize, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("corruption_vs_grid");
    let mut rng = RngStream::new(seed);
    for case in 0..instances {
        let k = 2 + (case % 2);
        let m = 1 + (case % 2);
        let t = 3 + (case as u64 % 18);
        let inst = random_small_instance(&mut rng, k, m, t);
        let measured = compute_corruption(&inst);

        // Anchor grid search at 1e-3 over [-1, 1], per constraint.
        let mut grid_level: f64 = 0.0;
        for i in 0..m {
            let mut total = 0.0;
            for a in 0..k {
                let column: Vec<f64> = (1..=t).map(|r| inst.constraint_row(i, r)[a]).collect();
                let mut best = f64::INFINITY;
                let steps = 2000;
                for s in 0..=steps {
                    let h = -1.0 + 2.0 * s as f64 / steps as f64;
                    let cost: f64 = column.iter().map(|v| (v - h).abs()).sum();
                    if cost < best {
                        best = cost;
                    }
                }
                total += best;
            }
            grid_level = grid_level.max(total);
        }
        report.record(
            (measured.level - grid_level).abs(),
            CORRUPTION_MATCH_TOL,
            format!("case {case} level"),
        );
        // The analytic minimizer can only be at least as good as the grid.
        report.record(
            measured.level - grid_level,
            1e-12,
            format!("case {case} minimality"),
        );

        // Anchor vs time-average bound holds exactly.
        let averages = crate::env::time_average_means(&inst);
        let worst = (0..m)
            .map(|i| {
                (0..k)
                    .map(|a| (measured.anchors[i][a] - averages[i][a]).abs())
                    .sum::<f64>()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        report.record(
            worst - measured.level / t as f64,
            1e-12,
            format!("case {case} anchor bound"),
        );

        // Random anchors never beat the measured minimum.
        for probe in 0..10 {
            for i in 0..m {
                let h: Vec<f64> = (0..k).map(|_| rng.next_f64() * 2.0 - 1.0).collect();
                let cost: f64 = (1..=t)
                    .map(|r| {
                        inst.constraint_row(i, r)
                            .iter()
                            .zip(h.iter())
                            .map(|(v, hh)| (v - hh).abs())
                            .sum::<f64>()
                    })
                    .sum();
                report.record(
                    measured.per_constraint[i] - cost,
                    1e-12,
                    format!("case {case} probe {probe}"),
                );
            }
        }
    }
    Ok(report)
}

/// Instance used by the coverage suite: corrupted constraints at a known
/// level with maximal-variance feedback.
pub fn coverage_instance() -> Result<(ProblemInstance, f64)> {
    let schedule = CorruptionSchedule::from_preset(
        vec![vec![0.2, -0.1, -0.8], vec![-0.1, 0.1, -0.7]],
        CorruptionPreset::Spread,
        40.0,
        1500,
        0,
        vec![0.5, 0.5, 0.0],
    )?;
    let config = EnvConfig {
        horizon: 1500,
        arms: 3,
        constraints: 2,
        loss_pattern: LossPattern::Constant {
            means: vec![0.2, 0.5, 0.8],
        },
        schedule,
        rho_min: 0.05,
    };
    let mut rng = RngStream::new(0);
    let inst = build_instance(&config, &mut rng)?;
    let level = compute_corruption(&inst).level;
    Ok((inst, level))
}

/// Concentration coverage at delta = 0.1 for both feedback modes and both
/// bound flavors.
pub fn coverage_suite(seeds: usize, seed_base: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("concentration_coverage");
    let (inst, level) = coverage_instance()?;
    let delta = 0.1;
    for mode in [FeedbackMode::Full, FeedbackMode::Bandit] {
        for bound in [CoverageBound::TimeAverage, CoverageBound::Anchor] {
            let trials: Result<Vec<CoverageTrial>> = (0..seeds)
                .map(|s| {
                    let mut rng = RngStream::with_stream(seed_base + s as u64, 11);
                    run_coverage_trial(&inst, mode, bound, level, delta, &mut rng)
                })
                .collect();
            let trials = trials?;
            let fraction = coverage_count(&trials);
            report.record(
                COVERAGE_FLOOR - fraction,
                0.0,
                format!("{mode:?}/{bound:?} coverage {fraction:.3}"),
            );
        }
    }
    Ok(report)
}

/// Runs the requested suites ("all" for every one of them).
pub fn run_suites(which: &str) -> Result<Vec<SuiteReport>> {
    let mut reports = Vec::new();
    let all = which == "all";
    if all || which == "projection" {
        reports.push(projection_suite(200, 101)?);
    }
    if all || which == "lp" {
        reports.push(lp_suite(200, 202)?);
    }
    if all || which == "corruption" {
        reports.push(corruption_suite(100, 303)?);
    }
    if all || which == "coverage" {
        reports.push(coverage_suite(200, 404)?);
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_suite_small() {
        let report = projection_suite(40, 9).unwrap();
        assert!(report.passed, "{:?}", report.failures);
    }

    #[test]
    fn lp_suite_small() {
        let report = lp_suite(40, 10).unwrap();
        assert!(report.passed, "{:?}", report.failures);
    }

    #[test]
    fn corruption_suite_small() {
        let report = corruption_suite(25, 11).unwrap();
        assert!(report.passed, "{:?}", report.failures);
    }
}
