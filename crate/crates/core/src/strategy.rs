//! Strategies on the probability simplex, arm sampling, and seeded RNG streams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on the simplex normalization check.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// Index of an arm in `[0, K)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArmIndex(pub usize);

impl ArmIndex {
    pub fn get(self) -> usize {
        self.0
    }
}

impl std::fmt::Display for ArmIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A probability vector over `K` arms.
///
/// Entries are non-negative and sum to 1 within [`SIMPLEX_TOL`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Strategy {
    probs: Vec<f64>,
}

impl Strategy {
    /// Validates and wraps a probability vector.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDimension);
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidStrategy(format!("entry {p} out of range")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::InvalidStrategy(format!("entries sum to {sum}")));
        }
        Ok(Self { probs })
    }

    /// The uniform strategy over `k` arms.
    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidDimension);
        }
        Ok(Self {
            probs: vec![1.0 / k as f64; k],
        })
    }

    /// Point mass on a single arm.
    pub fn point_mass(k: usize, arm: ArmIndex) -> Result<Self> {
        if k == 0 || arm.get() >= k {
            return Err(Error::InvalidDimension);
        }
        let mut probs = vec![0.0; k];
        probs[arm.get()] = 1.0;
        Ok(Self { probs })
    }

    /// Rescales a non-negative vector onto the simplex. Used after projection
    /// steps to absorb float drift.
    pub fn normalized(raw: &[f64]) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::InvalidDimension);
        }
        let sum: f64 = raw.iter().sum();
        if !sum.is_finite() || sum <= 0.0 || raw.iter().any(|p| *p < 0.0 || !p.is_finite()) {
            return Err(Error::InvalidStrategy(format!(
                "cannot normalize vector with sum {sum}"
            )));
        }
        Ok(Self {
            probs: raw.iter().map(|p| p / sum).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, arm: ArmIndex) -> f64 {
        self.probs[arm.get()]
    }

    /// Convex combination `(1 - w) * self + w * other`.
    pub fn mix(&self, other: &Strategy, w: f64) -> Strategy {
        debug_assert_eq!(self.len(), other.len());
        let probs = self
            .probs
            .iter()
            .zip(other.probs.iter())
            .map(|(a, b)| (1.0 - w) * a + w * b)
            .collect();
        Strategy { probs }
    }

    pub fn dot(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(self.len(), values.len());
        self.probs
            .iter()
            .zip(values.iter())
            .map(|(p, v)| p * v)
            .sum()
    }

    pub fn l1_distance(&self, other: &Strategy) -> f64 {
        self.probs
            .iter()
            .zip(other.probs.iter())
            .map(|(a, b)| (a - b).abs())
            .sum()
    }
}

/// A deterministic random stream owned by a single run.
///
/// Identical `(seed, stream)` pairs produce identical draw sequences. Substreams
/// derived with distinct tags never overlap, so parallel runs can share a base
/// seed without sharing randomness.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// An independent stream with the same seed and the given tag.
    pub fn substream(&self, tag: u64) -> RngStream {
        Self::with_stream(self.seed, tag)
    }

    /// One uniform draw from `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.gen::<u64>()
    }

    /// Uniform draw from `[0, n)`.
    pub fn next_usize(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }
}

/// The uniform strategy over `k` arms (`k >= 1`).
pub fn strategy_uniform(k: usize) -> Result<Strategy> {
    Strategy::uniform(k)
}

/// Samples an arm from `x`, consuming exactly one uniform draw.
///
/// Cumulative-sum boundary hits resolve to the lower arm index; zero-mass arms
/// are never selected.
pub fn sample_arm(x: &Strategy, rng: &mut RngStream) -> Result<ArmIndex> {
    let sum: f64 = x.probs().iter().sum();
    if (sum - 1.0).abs() > SIMPLEX_TOL {
        return Err(Error::InvalidStrategy(format!("entries sum to {sum}")));
    }
    let u = rng.next_f64();
    let mut acc = 0.0;
    let mut last_positive = None;
    for (a, p) in x.probs().iter().enumerate() {
        if *p <= 0.0 {
            continue;
        }
        acc += p;
        last_positive = Some(a);
        if u <= acc {
            return Ok(ArmIndex(a));
        }
    }
    // Float drift can leave acc slightly below 1; fall back to the last
    // positive-mass arm.
    last_positive
        .map(ArmIndex)
        .ok_or_else(|| Error::InvalidStrategy("no positive-mass arm".into()))
}
