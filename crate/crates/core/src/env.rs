//! Problem-instance synthesis: mean loss/constraint sequences with controllable
//! corruption, per-round feedback sampling, and the exact corruption level.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::strategy::{ArmIndex, RngStream};

/// How the mean loss vectors evolve over the horizon.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum LossPattern {
    /// The same mean vector every round.
    Constant { means: Vec<f64> },
    /// Per-arm sinusoid around a center, phase-shifted across arms.
    SinusoidalDrift {
        center: Vec<f64>,
        amplitude: f64,
        period: u64,
    },
    /// The cheapest arm rotates through `leaders` every `block_len` rounds;
    /// the current leader costs `low`, everyone else takes their `rest` value.
    /// With `scramble` set, the leader of each block is drawn by hashing the
    /// block index instead of cycling, so the rotation is unpredictable while
    /// staying deterministic and oblivious.
    SwitchingBestArm {
        leaders: Vec<usize>,
        low: f64,
        rest: Vec<f64>,
        block_len: u64,
        #[serde(default)]
        scramble: bool,
    },
}

/// SplitMix64 finalizer; decorrelates block indices.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// One additive change to a constraint's mean vector at a single round.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Perturbation {
    /// 1-based round index.
    pub round: u64,
    pub constraint: usize,
    /// Per-arm delta added to the base mean (clipped into `[-1, 1]`).
    pub delta: Vec<f64>,
}

/// Placement of the corruption budget over the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorruptionPreset {
    /// Contiguous window of perturbed rounds.
    Burst,
    /// Perturbed rounds spaced evenly over the horizon.
    Spread,
    /// Perturbed rounds packed at the start.
    FrontLoaded,
}

/// Stationary anchor plus a list of per-round perturbations.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorruptionSchedule {
    /// m x K stationary constraint means.
    pub base: Vec<Vec<f64>>,
    pub perturbations: Vec<Perturbation>,
    /// Requested total l1 budget; the realized level is always re-measured
    /// from the final mean sequences.
    pub target_budget: f64,
}

impl CorruptionSchedule {
    /// A schedule with no perturbations.
    pub fn stationary(base: Vec<Vec<f64>>) -> Self {
        Self {
            base,
            perturbations: Vec::new(),
            target_budget: 0.0,
        }
    }

    /// Builds a schedule that injects roughly `target` corruption into one
    /// constraint using the given per-arm delta shape.
    ///
    /// The delta is applied at full strength on all scheduled rounds except the
    /// last, which is scaled so the injected l1 mass equals `target` exactly
    /// (before clipping).
    pub fn from_preset(
        base: Vec<Vec<f64>>,
        preset: CorruptionPreset,
        target: f64,
        horizon: u64,
        constraint: usize,
        delta: Vec<f64>,
    ) -> Result<Self> {
        if target < 0.0 {
            return Err(Error::NegativeCorruption(target));
        }
        if constraint >= base.len() {
            return Err(Error::InvalidConfig(format!(
                "corruption constraint {constraint} out of range"
            )));
        }
        let norm: f64 = delta.iter().map(|d| d.abs()).sum();
        if target > 0.0 && norm <= 0.0 {
            return Err(Error::InvalidConfig("corruption delta is all zeros".into()));
        }
        let mut perturbations = Vec::new();
        if target > 0.0 {
            let full_rounds = (target / norm).floor() as u64;
            let remainder = target - full_rounds as f64 * norm;
            let count = full_rounds + u64::from(remainder > 1e-12);
            if count > horizon / 2 {
                return Err(Error::InvalidConfig(format!(
                    "corruption needs {count} perturbed rounds but the horizon \
                     only allows {} before the anchor moves",
                    horizon / 2
                )));
            }
            let rounds: Vec<u64> = match preset {
                CorruptionPreset::FrontLoaded => (1..=count).collect(),
                CorruptionPreset::Burst => {
                    let start = (horizon / 3).max(1);
                    (start..start + count).collect()
                }
                CorruptionPreset::Spread => (1..=count)
                    .map(|j| ((j * horizon) / count).max(1))
                    .collect(),
            };
            for (j, round) in rounds.iter().enumerate() {
                let scale = if j as u64 == full_rounds && remainder > 1e-12 {
                    remainder / norm
                } else {
                    1.0
                };
                perturbations.push(Perturbation {
                    round: *round,
                    constraint,
                    delta: delta.iter().map(|d| d * scale).collect(),
                });
            }
        }
        Ok(Self {
            base,
            perturbations,
            target_budget: target,
        })
    }
}

/// Full configuration for [`build_instance`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvConfig {
    pub horizon: u64,
    pub arms: usize,
    pub constraints: usize,
    pub loss_pattern: LossPattern,
    pub schedule: CorruptionSchedule,
    /// Required strict-feasibility margin; instance construction fails when no
    /// arm keeps every constraint at or below `-rho_min` in every round.
    #[serde(default = "default_rho_min")]
    pub rho_min: f64,
}

fn default_rho_min() -> f64 {
    0.05
}

/// Fully materialized mean sequences for one problem.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemInstance {
    #[serde(rename = "T")]
    pub horizon: u64,
    #[serde(rename = "K")]
    pub arms: usize,
    #[serde(rename = "m")]
    pub constraints: usize,
    /// T x K, entries in `[0, 1]`.
    pub loss_means: Vec<Vec<f64>>,
    /// m x T x K, entries in `[-1, 1]`.
    pub constraint_means: Vec<Vec<Vec<f64>>>,
}

/// What one round's sampling produced, split by feedback channel.
#[derive(Debug, Clone, PartialEq)]
pub enum LossFeedback {
    /// The whole realized loss vector.
    Full(Vec<f64>),
    /// Realized loss of the chosen arm only.
    Bandit(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ViolationFeedback {
    /// m x K realized violation vectors.
    Full(Vec<Vec<f64>>),
    /// Realized violations of the chosen arm only, one per constraint.
    Bandit(Vec<f64>),
}

/// Feedback exposed to a learner after acting at one round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundFeedback {
    pub chosen: ArmIndex,
    pub loss: LossFeedback,
    pub violations: ViolationFeedback,
}

/// Exact corruption level of an instance together with its witnesses.
#[derive(Debug, Clone, PartialEq)]
pub struct CorruptionReport {
    /// Worst-constraint corruption level.
    pub level: f64,
    /// Per-constraint totals.
    pub per_constraint: Vec<f64>,
    /// m x K anchor vectors attaining the minima.
    pub anchors: Vec<Vec<f64>>,
}

impl ProblemInstance {
    pub fn loss_mean(&self, t: u64, arm: usize) -> f64 {
        self.loss_means[(t - 1) as usize][arm]
    }

    /// Mean constraint row `i` at round `t` (1-based).
    pub fn constraint_row(&self, i: usize, t: u64) -> &[f64] {
        &self.constraint_means[i][(t - 1) as usize]
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 || self.arms == 0 || self.constraints == 0 {
            return Err(Error::InvalidConfig(
                "horizon, arms, and constraints must all be positive".into(),
            ));
        }
        let t = self.horizon as usize;
        if self.loss_means.len() != t || self.loss_means.iter().any(|r| r.len() != self.arms) {
            return Err(Error::InvalidConfig("loss_means has wrong shape".into()));
        }
        if self.constraint_means.len() != self.constraints
            || self
                .constraint_means
                .iter()
                .any(|c| c.len() != t || c.iter().any(|r| r.len() != self.arms))
        {
            return Err(Error::InvalidConfig(
                "constraint_means has wrong shape".into(),
            ));
        }
        let loss_ok = self
            .loss_means
            .iter()
            .flatten()
            .all(|v| (0.0..=1.0).contains(v));
        if !loss_ok {
            return Err(Error::InvalidConfig("loss mean outside [0, 1]".into()));
        }
        let cons_ok = self
            .constraint_means
            .iter()
            .flatten()
            .flatten()
            .all(|v| (-1.0..=1.0).contains(v));
        if !cons_ok {
            return Err(Error::InvalidConfig(
                "constraint mean outside [-1, 1]".into(),
            ));
        }
        Ok(())
    }

    /// Serializes with 17 significant digits so parsing restores bit-identical
    /// floats.
    pub fn to_json(&self) -> Result<String> {
        let mut buf = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecision);
        serde::Serialize::serialize(self, &mut ser)?;
        Ok(String::from_utf8(buf).expect("json output is utf-8"))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let inst: ProblemInstance = serde_json::from_str(text)?;
        inst.validate()?;
        Ok(inst)
    }
}

/// JSON formatter that prints every float with 17 significant digits.
struct FullPrecision;

impl serde_json::ser::Formatter for FullPrecision {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Materializes the mean sequences described by `config`.
///
/// The same config reproduces the instance bit-exactly; `_rng` is reserved for
/// stochastic patterns and currently unused.
pub fn build_instance(config: &EnvConfig, _rng: &mut RngStream) -> Result<ProblemInstance> {
    let (t, k, m) = (config.horizon, config.arms, config.constraints);
    if t == 0 || k == 0 || m == 0 {
        return Err(Error::InvalidConfig(
            "horizon, arms, and constraints must all be positive".into(),
        ));
    }
    if config.schedule.base.len() != m || config.schedule.base.iter().any(|r| r.len() != k) {
        return Err(Error::InvalidConfig(
            "constraint base must be m x K".into(),
        ));
    }

    let mut loss_means = Vec::with_capacity(t as usize);
    for round in 1..=t {
        loss_means.push(loss_row(&config.loss_pattern, round, k)?);
    }

    let mut constraint_means = vec![vec![Vec::new(); t as usize]; m];
    for i in 0..m {
        for round in 0..t as usize {
            constraint_means[i][round] = config.schedule.base[i].clone();
        }
    }
    for p in &config.schedule.perturbations {
        if p.round == 0 || p.round > t || p.constraint >= m || p.delta.len() != k {
            return Err(Error::InvalidConfig(format!(
                "perturbation at round {} is out of range",
                p.round
            )));
        }
        let row = &mut constraint_means[p.constraint][(p.round - 1) as usize];
        for (entry, delta) in row.iter_mut().zip(p.delta.iter()) {
            *entry = (*entry + delta).clamp(-1.0, 1.0);
        }
    }

    let inst = ProblemInstance {
        horizon: t,
        arms: k,
        constraints: m,
        loss_means,
        constraint_means,
    };
    inst.validate()?;

    // Enforce strict feasibility of some arm with margin rho_min.
    let mut best = f64::NEG_INFINITY;
    for a in 0..k {
        let mut worst = f64::INFINITY;
        for i in 0..m {
            for round in 0..t as usize {
                worst = worst.min(-inst.constraint_means[i][round][a]);
            }
        }
        best = best.max(worst);
    }
    if best < config.rho_min {
        return Err(Error::SlaterViolation {
            rho: best,
            required: config.rho_min,
        });
    }

    Ok(inst)
}

fn loss_row(pattern: &LossPattern, round: u64, k: usize) -> Result<Vec<f64>> {
    match pattern {
        LossPattern::Constant { means } => {
            if means.len() != k {
                return Err(Error::InvalidConfig("constant loss means must have K entries".into()));
            }
            if means.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::InvalidConfig("loss mean outside [0, 1]".into()));
            }
            Ok(means.clone())
        }
        LossPattern::SinusoidalDrift {
            center,
            amplitude,
            period,
        } => {
            if center.len() != k {
                return Err(Error::InvalidConfig("drift center must have K entries".into()));
            }
            if *period == 0 {
                return Err(Error::InvalidConfig("drift period must be positive".into()));
            }
            let row = center
                .iter()
                .enumerate()
                .map(|(a, c)| {
                    let phase = round as f64 / *period as f64 + a as f64 / k as f64;
                    (c + amplitude * (std::f64::consts::TAU * phase).sin()).clamp(0.0, 1.0)
                })
                .collect();
            Ok(row)
        }
        LossPattern::SwitchingBestArm {
            leaders,
            low,
            rest,
            block_len,
            scramble,
        } => {
            if rest.len() != k {
                return Err(Error::InvalidConfig("rest losses must have K entries".into()));
            }
            if leaders.is_empty() || leaders.iter().any(|a| *a >= k) {
                return Err(Error::InvalidConfig("leader arms out of range".into()));
            }
            if *block_len == 0 {
                return Err(Error::InvalidConfig("block length must be positive".into()));
            }
            if !(0.0..=1.0).contains(low) || rest.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::InvalidConfig("loss mean outside [0, 1]".into()));
            }
            let block = (round - 1) / block_len;
            let pick = if *scramble {
                (mix64(block) % leaders.len() as u64) as usize
            } else {
                (block as usize) % leaders.len()
            };
            let leader = leaders[pick];
            let row = (0..k)
                .map(|a| if a == leader { *low } else { rest[a] })
                .collect();
            Ok(row)
        }
    }
}

/// Draws one round of two-point realizations.
///
/// Losses land in `{0, 1}` with the prescribed mean; violations land in
/// `{-1, +1}` with `P(+1) = (1 + mean) / 2`. Entries are drawn independently
/// in a fixed order (losses by arm, then violations by constraint and arm).
pub fn sample_round(
    inst: &ProblemInstance,
    t: u64,
    rng: &mut RngStream,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    if t == 0 || t > inst.horizon {
        return Err(Error::RoundOutOfRange {
            round: t,
            horizon: inst.horizon,
        });
    }
    let losses = inst.loss_means[(t - 1) as usize]
        .iter()
        .map(|mean| if rng.next_f64() < *mean { 1.0 } else { 0.0 })
        .collect();
    let violations = (0..inst.constraints)
        .map(|i| {
            inst.constraint_means[i][(t - 1) as usize]
                .iter()
                .map(|mean| {
                    let p_plus = (1.0 + mean) / 2.0;
                    if rng.next_f64() < p_plus {
                        1.0
                    } else {
                        -1.0
                    }
                })
                .collect()
        })
        .collect();
    Ok((losses, violations))
}

/// Lower median of a slice (the `(n-1)/2`-th order statistic).
fn lower_median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).expect("means are finite"));
    values[(values.len() - 1) / 2]
}

/// Exact corruption level: per coordinate the l1-minimizing anchor is the
/// (lower) median over rounds; the level is the worst per-constraint total.
pub fn compute_corruption(inst: &ProblemInstance) -> CorruptionReport {
    let t = inst.horizon as usize;
    let mut per_constraint = Vec::with_capacity(inst.constraints);
    let mut anchors = Vec::with_capacity(inst.constraints);
    for i in 0..inst.constraints {
        let mut anchor = Vec::with_capacity(inst.arms);
        let mut total = 0.0;
        for a in 0..inst.arms {
            let mut column: Vec<f64> = (0..t).map(|r| inst.constraint_means[i][r][a]).collect();
            let med = lower_median(&mut column);
            total += column.iter().map(|v| (v - med).abs()).sum::<f64>();
            anchor.push(med);
        }
        per_constraint.push(total);
        anchors.push(anchor);
    }
    let level = per_constraint.iter().cloned().fold(0.0, f64::max);
    CorruptionReport {
        level,
        per_constraint,
        anchors,
    }
}

/// Time-averaged constraint means, one m x K matrix.
pub fn time_average_means(inst: &ProblemInstance) -> Vec<Vec<f64>> {
    let t = inst.horizon as f64;
    (0..inst.constraints)
        .map(|i| {
            (0..inst.arms)
                .map(|a| {
                    inst.constraint_means[i]
                        .iter()
                        .map(|row| row[a])
                        .sum::<f64>()
                        / t
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_config(t: u64) -> EnvConfig {
        EnvConfig {
            horizon: t,
            arms: 2,
            constraints: 1,
            loss_pattern: LossPattern::Constant {
                means: vec![0.3, 0.7],
            },
            schedule: CorruptionSchedule::stationary(vec![vec![-1.0, -1.0]]),
            rho_min: 0.05,
        }
    }

    #[test]
    fn constant_pattern_materializes() {
        let mut rng = RngStream::new(0);
        let inst = build_instance(&constant_config(10), &mut rng).unwrap();
        assert_eq!(inst.loss_means.len(), 10);
        for row in &inst.loss_means {
            assert_eq!(row, &vec![0.3, 0.7]);
        }
        for row in &inst.constraint_means[0] {
            assert_eq!(row, &vec![-1.0, -1.0]);
        }
    }

    #[test]
    fn stationary_schedule_has_zero_corruption() {
        let mut rng = RngStream::new(0);
        let inst = build_instance(&constant_config(12), &mut rng).unwrap();
        let report = compute_corruption(&inst);
        assert_eq!(report.level, 0.0);
        assert_eq!(report.anchors[0], vec![-1.0, -1.0]);
    }

    #[test]
    fn two_round_perturbation_counts_exactly() {
        let mut config = constant_config(10);
        config.schedule = CorruptionSchedule {
            base: vec![vec![0.0, 0.0]],
            perturbations: vec![
                Perturbation {
                    round: 1,
                    constraint: 0,
                    delta: vec![0.5, 0.0],
                },
                Perturbation {
                    round: 2,
                    constraint: 0,
                    delta: vec![0.5, 0.0],
                },
            ],
            target_budget: 1.0,
        };
        config.schedule.base = vec![vec![0.0, -0.5]];
        config.rho_min = 0.05;
        let mut rng = RngStream::new(0);
        let inst = build_instance(&config, &mut rng).unwrap();
        let report = compute_corruption(&inst);
        // Median over {0.5, 0.5, 0, ..., 0} is 0 for T = 10.
        assert!((report.level - 1.0).abs() < 1e-12);
        assert_eq!(report.anchors[0][0], 0.0);
    }

    #[test]
    fn invalid_dimensions_rejected() {
        let mut config = constant_config(10);
        config.horizon = 0;
        let mut rng = RngStream::new(0);
        assert!(build_instance(&config, &mut rng).is_err());
    }

    #[test]
    fn slater_margin_enforced() {
        let mut config = constant_config(10);
        config.schedule = CorruptionSchedule::stationary(vec![vec![0.2, 0.01]]);
        let mut rng = RngStream::new(0);
        let err = build_instance(&config, &mut rng).unwrap_err();
        assert!(matches!(err, Error::SlaterViolation { .. }));
    }

    #[test]
    fn boundary_means_sample_deterministically() {
        let mut config = constant_config(5);
        config.loss_pattern = LossPattern::Constant {
            means: vec![0.0, 1.0],
        };
        config.schedule = CorruptionSchedule::stationary(vec![vec![-1.0, -1.0]]);
        let mut rng = RngStream::new(0);
        let inst = build_instance(&config, &mut rng).unwrap();
        let mut draw_rng = RngStream::new(9);
        for t in 1..=5 {
            let (losses, violations) = sample_round(&inst, t, &mut draw_rng).unwrap();
            assert_eq!(losses, vec![0.0, 1.0]);
            assert_eq!(violations[0], vec![-1.0, -1.0]);
        }
    }

    #[test]
    fn sample_round_rejects_out_of_range() {
        let mut rng = RngStream::new(0);
        let inst = build_instance(&constant_config(5), &mut rng).unwrap();
        assert!(sample_round(&inst, 0, &mut rng).is_err());
        assert!(sample_round(&inst, 6, &mut rng).is_err());
    }

    #[test]
    fn violation_sampling_matches_mean() {
        let mut config = constant_config(4);
        config.schedule = CorruptionSchedule::stationary(vec![vec![0.2, -0.9]]);
        config.rho_min = 0.05;
        let mut rng = RngStream::new(0);
        let inst = build_instance(&config, &mut rng).unwrap();
        let mut draw_rng = RngStream::new(21);
        let n = 100_000;
        let mut sum = 0.0;
        for j in 0..n {
            let t = (j % 4) + 1;
            let (_, violations) = sample_round(&inst, t as u64, &mut draw_rng).unwrap();
            sum += violations[0][0];
        }
        let mean = sum / n as f64;
        assert!((0.18..=0.22).contains(&mean), "mean = {mean}");
    }

    #[test]
    fn preset_hits_target_budget() {
        for preset in [
            CorruptionPreset::Burst,
            CorruptionPreset::Spread,
            CorruptionPreset::FrontLoaded,
        ] {
            let schedule = CorruptionSchedule::from_preset(
                vec![vec![0.1, -0.8]],
                preset,
                7.3,
                200,
                0,
                vec![0.5, 0.0],
            )
            .unwrap();
            let config = EnvConfig {
                horizon: 200,
                arms: 2,
                constraints: 1,
                loss_pattern: LossPattern::Constant {
                    means: vec![0.3, 0.7],
                },
                schedule,
                rho_min: 0.05,
            };
            let mut rng = RngStream::new(0);
            let inst = build_instance(&config, &mut rng).unwrap();
            let report = compute_corruption(&inst);
            assert!(
                (report.level - 7.3).abs() < 1e-9,
                "{preset:?}: realized {}",
                report.level
            );
        }
    }

    #[test]
    fn clipped_schedule_reports_realized_level() {
        // Base 0.8 + delta 0.5 clips at 1.0, so each perturbed round only
        // realizes 0.2 of corruption.
        let schedule = CorruptionSchedule::from_preset(
            vec![vec![0.8, -0.8]],
            CorruptionPreset::FrontLoaded,
            2.0,
            100,
            0,
            vec![0.5, 0.0],
        )
        .unwrap();
        let config = EnvConfig {
            horizon: 100,
            arms: 2,
            constraints: 1,
            loss_pattern: LossPattern::Constant {
                means: vec![0.3, 0.7],
            },
            schedule,
            rho_min: 0.05,
        };
        let mut rng = RngStream::new(0);
        let inst = build_instance(&config, &mut rng).unwrap();
        let report = compute_corruption(&inst);
        assert!(report.level < 2.0 - 1e-9);
        assert!((report.level - 0.8).abs() < 1e-9, "got {}", report.level);
    }

    #[test]
    fn json_round_trip_is_bit_faithful() {
        let mut config = constant_config(7);
        config.loss_pattern = LossPattern::SinusoidalDrift {
            center: vec![0.4, 0.6],
            amplitude: 0.3,
            period: 5,
        };
        let mut rng = RngStream::new(0);
        let inst = build_instance(&config, &mut rng).unwrap();
        let text = inst.to_json().unwrap();
        let back = ProblemInstance::from_json(&text).unwrap();
        assert_eq!(inst.loss_means, back.loss_means);
        assert_eq!(inst.constraint_means, back.constraint_means);
        for (a, b) in inst
            .loss_means
            .iter()
            .flatten()
            .zip(back.loss_means.iter().flatten())
        {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
