//! Regret and positive-violation accounting, scaling-law fits, and the
//! switching-benchmark regret used by the diagnostics.

use crate::env::ProblemInstance;
use crate::error::{Error, Result};
use crate::omd::DecisionSet;
use crate::strategy::Strategy;

/// Accumulates realized loss and per-constraint positive violation.
///
/// Violations are evaluated white-box against the instance's mean vectors;
/// the loss side uses realized per-round losses.
#[derive(Debug, Clone)]
pub struct MetricsAccumulator {
    opt_value: f64,
    loss_sum: f64,
    violation_sums: Vec<f64>,
    rounds: u64,
}

impl MetricsAccumulator {
    pub fn new(opt_value: f64, constraints: usize) -> Self {
        Self {
            opt_value,
            loss_sum: 0.0,
            violation_sums: vec![0.0; constraints],
            rounds: 0,
        }
    }

    /// Adds one round: realized loss plus the clipped-positive expected
    /// violation of the played strategy under every constraint.
    pub fn update_round(
        &mut self,
        inst: &ProblemInstance,
        t: u64,
        x: &Strategy,
        realized_loss: f64,
    ) -> Result<()> {
        if t == 0 || t > inst.horizon {
            return Err(Error::RoundOutOfRange {
                round: t,
                horizon: inst.horizon,
            });
        }
        self.loss_sum += realized_loss;
        for (i, sum) in self.violation_sums.iter_mut().enumerate() {
            let v = x.dot(inst.constraint_row(i, t));
            *sum += v.max(0.0);
        }
        self.rounds += 1;
        Ok(())
    }

    pub fn loss_sum(&self) -> f64 {
        self.loss_sum
    }

    pub fn violation_sums(&self) -> &[f64] {
        &self.violation_sums
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    /// `(regret, violation)`: loss sum minus the hindsight optimum, and the
    /// worst per-constraint positive-violation total.
    pub fn finalize(&self) -> (f64, f64) {
        let regret = self.loss_sum - self.opt_value;
        let violation = self
            .violation_sums
            .iter()
            .cloned()
            .fold(0.0, f64::max);
        (regret, violation)
    }
}

/// Piecewise-constant comparator sequence over a phase partition.
///
/// Each comparator must satisfy every decision set of its phase.
#[derive(Debug, Clone)]
pub struct SwitchBenchmark {
    /// Inclusive 1-based `(start, end)` ranges partitioning `[1, T]`.
    pub phases: Vec<(u64, u64)>,
    pub comparators: Vec<Strategy>,
}

impl SwitchBenchmark {
    /// Checks the partition shape and that each comparator satisfies all of
    /// its phase's decision sets within `tol`.
    pub fn validate(&self, decision_sets: &[DecisionSet], tol: f64) -> Result<()> {
        if self.phases.len() != self.comparators.len() || self.phases.is_empty() {
            return Err(Error::InvalidConfig(
                "benchmark phases and comparators must align".into(),
            ));
        }
        let mut expected_start = 1;
        for (j, ((start, end), u)) in self.phases.iter().zip(self.comparators.iter()).enumerate() {
            if *start != expected_start || end < start {
                return Err(Error::InvalidConfig(format!(
                    "phase {j} does not continue the partition"
                )));
            }
            expected_start = end + 1;
            for t in *start..=*end {
                let ds = &decision_sets[(t - 1) as usize];
                let slack = ds.max_residual(u);
                if slack > tol {
                    return Err(Error::InvalidBenchmark { phase: j, slack });
                }
            }
        }
        if expected_start != decision_sets.len() as u64 + 1 {
            return Err(Error::InvalidConfig(
                "phases do not cover the horizon".into(),
            ));
        }
        Ok(())
    }

    /// The comparator active at round `t` (1-based).
    pub fn comparator_at(&self, t: u64) -> &Strategy {
        let j = self
            .phases
            .iter()
            .position(|(start, end)| t >= *start && t <= *end)
            .expect("t inside the partition");
        &self.comparators[j]
    }
}

/// Dynamic regret of the played strategies against a validated benchmark,
/// using realized per-round loss vectors.
pub fn switching_regret(
    played: &[Strategy],
    benchmark: &SwitchBenchmark,
    decision_sets: &[DecisionSet],
    losses: &[Vec<f64>],
    tol: f64,
) -> Result<f64> {
    if played.len() != losses.len() || played.len() != decision_sets.len() {
        return Err(Error::InvalidConfig(
            "trace, losses, and decision sets must have equal length".into(),
        ));
    }
    benchmark.validate(decision_sets, tol)?;
    let mut total = 0.0;
    for (idx, (x, loss)) in played.iter().zip(losses.iter()).enumerate() {
        let u = benchmark.comparator_at(idx as u64 + 1);
        total += x.dot(loss) - u.dot(loss);
    }
    Ok(total)
}

/// Least-squares fit of `ln(value)` against `ln(horizon)`.
#[derive(Debug, Clone, Copy)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

pub fn fit_scaling_exponent(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < 3 || points.iter().any(|(t, v)| *t <= 0.0 || *v <= 0.0) {
        return Err(Error::InvalidFitInput);
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|(t, _)| t.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, v)| v.ln()).collect();
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(ys.iter())
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    if sxx <= 0.0 {
        return Err(Error::InvalidFitInput);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = xs
        .iter()
        .zip(ys.iter())
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - mean_y).powi(2)).sum();
    let r_squared = if ss_tot <= f64::EPSILON {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok(ScalingFit {
        slope,
        intercept,
        r_squared,
        points: points.len(),
    })
}

/// Fit that drops the smallest-horizon point and refits once when the first
/// fit explains the data poorly (transient constants dominate tiny horizons).
pub fn fit_scaling_with_transient_drop(points: &[(f64, f64)]) -> Result<ScalingFit> {
    let fit = fit_scaling_exponent(points)?;
    if fit.r_squared >= 0.9 || points.len() < 4 {
        return Ok(fit);
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite horizons"));
    fit_scaling_exponent(&sorted[1..])
}
