//! Running constraint-mean estimators for full and bandit feedback, their
//! confidence radii, and the implicit-exploration loss estimator.

use crate::env::{RoundFeedback, ViolationFeedback};
use crate::error::{Error, Result};
use crate::strategy::{ArmIndex, Strategy};

/// Radii never exceed the width of the violation range `[-1, 1]`.
pub const RADIUS_CAP: f64 = 2.0;

/// Which feedback channel feeds the estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeedbackMode {
    /// Every arm's violation is observed each round.
    Full,
    /// Only the chosen arm's violation is observed.
    Bandit,
}

/// Shared confidence parameters.
#[derive(Debug, Clone, Copy)]
pub struct EstimatorParams {
    pub horizon: u64,
    pub arms: usize,
    pub constraints: usize,
    pub delta: f64,
}

impl EstimatorParams {
    /// `ln(T K m / delta)`, the log factor shared by all radii.
    pub fn log_factor(&self) -> f64 {
        ((self.horizon as f64) * (self.arms as f64) * (self.constraints as f64) / self.delta).ln()
    }
}

/// Per-arm running means of observed violations with pull counts.
#[derive(Debug, Clone)]
pub struct ConstraintEstimator {
    mode: FeedbackMode,
    params: EstimatorParams,
    /// m x K sums of observed violations.
    sums: Vec<Vec<f64>>,
    /// Pull counts per arm; in full mode every entry equals the round count.
    counts: Vec<u64>,
}

impl ConstraintEstimator {
    pub fn new(mode: FeedbackMode, params: EstimatorParams) -> Self {
        Self {
            mode,
            params,
            sums: vec![vec![0.0; params.arms]; params.constraints],
            counts: vec![0; params.arms],
        }
    }

    pub fn mode(&self) -> FeedbackMode {
        self.mode
    }

    pub fn params(&self) -> &EstimatorParams {
        &self.params
    }

    pub fn count(&self, arm: ArmIndex) -> u64 {
        self.counts[arm.get()]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Running mean for constraint `i` at `arm`; zero before the first sample.
    pub fn mean(&self, i: usize, arm: ArmIndex) -> f64 {
        let n = self.counts[arm.get()];
        if n == 0 {
            0.0
        } else {
            self.sums[i][arm.get()] / n as f64
        }
    }

    /// Folds one round of feedback into the running means.
    pub fn update(&mut self, feedback: &RoundFeedback) -> Result<()> {
        match (&feedback.violations, self.mode) {
            (ViolationFeedback::Full(vectors), FeedbackMode::Full) => {
                if vectors.len() != self.params.constraints
                    || vectors.iter().any(|v| v.len() != self.params.arms)
                {
                    return Err(Error::InvalidConfig("feedback has wrong shape".into()));
                }
                for (sums_i, obs_i) in self.sums.iter_mut().zip(vectors.iter()) {
                    for (s, v) in sums_i.iter_mut().zip(obs_i.iter()) {
                        *s += v;
                    }
                }
                for c in self.counts.iter_mut() {
                    *c += 1;
                }
                Ok(())
            }
            (ViolationFeedback::Bandit(values), FeedbackMode::Bandit) => {
                if values.len() != self.params.constraints {
                    return Err(Error::InvalidConfig("feedback has wrong shape".into()));
                }
                let a = feedback.chosen.get();
                for (sums_i, v) in self.sums.iter_mut().zip(values.iter()) {
                    sums_i[a] += v;
                }
                self.counts[a] += 1;
                Ok(())
            }
            _ => Err(Error::FeedbackModeMismatch),
        }
    }

    /// Confidence radius `min(4 sqrt(ln(TKm/delta) / N(a)), 2)`.
    ///
    /// A zero count returns the cap.
    pub fn radius(&self, arm: ArmIndex) -> f64 {
        let n = self.counts[arm.get()];
        if n == 0 {
            return RADIUS_CAP;
        }
        let raw = 4.0 * (self.params.log_factor() / n as f64).sqrt();
        raw.min(RADIUS_CAP)
    }

    /// Radius widened for a known corruption budget:
    /// `min(radius_raw + C/N(a) + C/T, 2)`.
    pub fn radius_known_c(&self, arm: ArmIndex, c: f64) -> Result<f64> {
        if c < 0.0 {
            return Err(Error::NegativeCorruption(c));
        }
        let n = self.counts[arm.get()];
        if n == 0 {
            return Ok(RADIUS_CAP);
        }
        let raw = 4.0 * (self.params.log_factor() / n as f64).sqrt()
            + c / n as f64
            + c / self.params.horizon as f64;
        Ok(raw.min(RADIUS_CAP))
    }
}

/// Importance-weighted loss estimate with implicit exploration: the chosen
/// arm gets `loss / (x(a) + gamma)`, every other arm gets zero.
pub fn ix_estimate(gamma: f64, chosen: ArmIndex, loss: f64, x: &Strategy) -> Vec<f64> {
    debug_assert!(gamma > 0.0);
    debug_assert!((0.0..=1.0).contains(&loss));
    let mut est = vec![0.0; x.len()];
    est[chosen.get()] = loss / (x.prob(chosen) + gamma);
    est
}
