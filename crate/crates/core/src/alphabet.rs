//! Weighted amplitude alphabets.
//!
//! An alphabet is a list of amplitudes `a^(k)` with integer weights `w^(k)`
//! sorted ascending and anchored so that `w^(0) = 0`. The amplitudes are not
//! required to be sorted: their order follows the weights.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::entropy_bits;

const SUM_TOLERANCE: f64 = 1e-12;

/// Probability vector over a set of ASK amplitudes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution")]
pub struct TargetDistribution {
    amplitudes: Vec<u32>,
    probs: Vec<f64>,
}

#[derive(Deserialize)]
struct RawDistribution {
    amplitudes: Vec<u32>,
    probs: Vec<f64>,
}

impl TryFrom<RawDistribution> for TargetDistribution {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        TargetDistribution::new(raw.amplitudes, raw.probs)
    }
}

impl TargetDistribution {
    /// Validates and wraps a distribution. Every probability must be strictly
    /// positive and the vector must sum to one within `1e-12`.
    pub fn new(amplitudes: Vec<u32>, probs: Vec<f64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidDistribution("no amplitudes".into()));
        }
        if amplitudes.len() != probs.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} amplitudes but {} probabilities",
                amplitudes.len(),
                probs.len()
            )));
        }
        check_amplitudes(&amplitudes).map_err(Error::InvalidDistribution)?;
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(Error::InvalidDistribution(format!(
                "probability {p} is not strictly positive; prune zero-probability amplitudes first"
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {sum}, not 1"
            )));
        }
        Ok(TargetDistribution { amplitudes, probs })
    }

    /// Builds a distribution from unnormalized non-negative masses, dropping
    /// amplitudes whose mass is zero.
    pub fn from_masses(amplitudes: Vec<u32>, masses: &[f64]) -> Result<Self> {
        if amplitudes.len() != masses.len() {
            return Err(Error::InvalidDistribution("length mismatch".into()));
        }
        if masses.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::InvalidDistribution(
                "masses must be finite and non-negative".into(),
            ));
        }
        let total: f64 = masses.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("total mass is zero".into()));
        }
        let (amps, probs): (Vec<u32>, Vec<f64>) = amplitudes
            .into_iter()
            .zip(masses)
            .filter(|(_, m)| **m > 0.0)
            .map(|(a, m)| (a, m / total))
            .unzip();
        // renormalize after filtering so the sum check sees one rounding step
        let s: f64 = probs.iter().sum();
        TargetDistribution::new(amps, probs.into_iter().map(|p| p / s).collect())
    }

    pub fn uniform(amplitudes: Vec<u32>) -> Result<Self> {
        let n = amplitudes.len();
        TargetDistribution::new(amplitudes, vec![1.0 / n as f64; n])
    }

    pub fn amplitudes(&self) -> &[u32] {
        &self.amplitudes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob_of(&self, amplitude: u32) -> Option<f64> {
        self.amplitudes
            .iter()
            .position(|&a| a == amplitude)
            .map(|i| self.probs[i])
    }

    /// Entropy in bits.
    pub fn entropy(&self) -> f64 {
        entropy_bits(&self.probs)
    }

    /// Mean of `a^2`.
    pub fn average_energy(&self) -> f64 {
        self.amplitudes
            .iter()
            .zip(&self.probs)
            .map(|(&a, p)| p * f64::from(a) * f64::from(a))
            .sum()
    }
}

fn check_amplitudes(amplitudes: &[u32]) -> std::result::Result<(), String> {
    for (i, &a) in amplitudes.iter().enumerate() {
        if a == 0 || a % 2 == 0 {
            return Err(format!("amplitude {a} is not a positive odd integer"));
        }
        if amplitudes[..i].contains(&a) {
            return Err(format!("amplitude {a} appears twice"));
        }
    }
    Ok(())
}

/// Amplitudes paired with ascending integer weights, `w^(0) = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawAlphabet")]
pub struct WeightedAlphabet {
    amplitudes: Vec<u32>,
    weights: Vec<u64>,
}

#[derive(Deserialize)]
struct RawAlphabet {
    amplitudes: Vec<u32>,
    weights: Vec<u64>,
}

impl TryFrom<RawAlphabet> for WeightedAlphabet {
    type Error = Error;

    fn try_from(raw: RawAlphabet) -> Result<Self> {
        WeightedAlphabet::new(raw.amplitudes, raw.weights)
    }
}

impl WeightedAlphabet {
    pub fn new(amplitudes: Vec<u32>, weights: Vec<u64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidAlphabet("no amplitudes".into()));
        }
        if amplitudes.len() != weights.len() {
            return Err(Error::InvalidAlphabet(format!(
                "{} amplitudes but {} weights",
                amplitudes.len(),
                weights.len()
            )));
        }
        check_amplitudes(&amplitudes).map_err(Error::InvalidAlphabet)?;
        if weights[0] != 0 {
            return Err(Error::InvalidAlphabet(format!(
                "first weight is {}, must be 0",
                weights[0]
            )));
        }
        if weights.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidAlphabet("weights are not ascending".into()));
        }
        Ok(WeightedAlphabet { amplitudes, weights })
    }

    /// Pairs amplitudes with arbitrary integer weights, reorders both by weight
    /// (stable, so equal weights keep their given amplitude order) and
    /// canonicalizes the weights with [`normalize_weights`].
    pub fn from_raw_weights(amplitudes: Vec<u32>, raw: &[i64]) -> Result<Self> {
        if amplitudes.len() != raw.len() {
            return Err(Error::InvalidAlphabet("length mismatch".into()));
        }
        let mut order: Vec<usize> = (0..raw.len()).collect();
        order.sort_by_key(|&k| raw[k]);
        let sorted_raw: Vec<i64> = order.iter().map(|&k| raw[k]).collect();
        let weights = normalize_weights(&sorted_raw)?;
        WeightedAlphabet::new(order.iter().map(|&k| amplitudes[k]).collect(), weights)
    }

    /// Number of amplitudes, `M/2` for an `M`-ASK alphabet.
    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitudes(&self) -> &[u32] {
        &self.amplitudes
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn amplitude(&self, k: usize) -> u32 {
        self.amplitudes[k]
    }

    pub fn weight(&self, k: usize) -> u64 {
        self.weights[k]
    }

    pub fn max_weight(&self) -> u64 {
        *self.weights.last().expect("alphabet is never empty")
    }

    pub fn index_of(&self, amplitude: u32) -> Option<usize> {
        self.amplitudes.iter().position(|&a| a == amplitude)
    }

    /// Total weight of a sequence of alphabet indices.
    pub fn sequence_weight(&self, indices: &[usize]) -> u64 {
        indices.iter().map(|&k| self.weights[k]).sum()
    }

    /// The same alphabet with every weight multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> Result<Self> {
        if factor == 0 {
            return Err(Error::InvalidParameter("scale factor must be positive".into()));
        }
        WeightedAlphabet::new(
            self.amplitudes.clone(),
            self.weights.iter().map(|w| w * factor).collect(),
        )
    }

    /// True for the energy-derived alphabet of classical ESS with `M`-ASK.
    pub fn is_classical(&self, m: u32) -> bool {
        classical_ess_alphabet(m).is_ok_and(|c| c == *self)
    }
}

/// Logarithm used for self-information in weight quantization.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    /// Natural logarithm (nats).
    #[default]
    Natural,
    /// Base-2 logarithm (bits).
    Binary,
}

impl LogBase {
    fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Binary => x.log2(),
        }
    }
}

/// What the scaled self-information is measured from before rounding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rounding {
    /// `floor(-f log P + 1/2)`, the absolute self-information is rounded.
    #[default]
    Absolute,
    /// `floor(f (log P_max - log P) + 1/2)`, rounding relative to the most
    /// probable amplitude, which always lands on weight zero.
    RelativeToMode,
}

/// Turns a target distribution into integer weights for a scaling factor `f`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightQuantizer {
    pub base: LogBase,
    pub rounding: Rounding,
}

impl WeightQuantizer {
    pub fn new(base: LogBase, rounding: Rounding) -> Self {
        WeightQuantizer { base, rounding }
    }

    /// Unanchored integer weights `omega^(k)` in the distribution's own order.
    pub fn raw_weights(&self, dist: &TargetDistribution, f: f64) -> Result<Vec<i64>> {
        if !(f.is_finite() && f > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "scaling factor must be positive, got {f}"
            )));
        }
        let info: Vec<f64> = dist.probs().iter().map(|&p| -self.base.log(p)).collect();
        let anchor = match self.rounding {
            Rounding::Absolute => 0.0,
            Rounding::RelativeToMode => info.iter().copied().fold(f64::INFINITY, f64::min),
        };
        Ok(info
            .iter()
            .map(|i| (f * (i - anchor) + 0.5).floor() as i64)
            .collect())
    }

    /// Sorts amplitudes by `omega`, ties kept in distribution order, and
    /// subtracts the smallest `omega`. No gcd reduction is applied.
    pub fn quantize(&self, dist: &TargetDistribution, f: f64) -> Result<WeightedAlphabet> {
        let omega = self.raw_weights(dist, f)?;
        let mut order: Vec<usize> = (0..omega.len()).collect();
        order.sort_by_key(|&k| omega[k]);
        let base = omega[order[0]];
        WeightedAlphabet::new(
            order.iter().map(|&k| dist.amplitudes()[k]).collect(),
            order.iter().map(|&k| (omega[k] - base) as u64).collect(),
        )
    }
}

/// Quantized self-information weights with the default quantizer
/// (natural logarithm, absolute rounding).
pub fn quantize_weights(dist: &TargetDistribution, f: f64) -> Result<WeightedAlphabet> {
    WeightQuantizer::default().quantize(dist, f)
}

/// Sorts ascending, subtracts the minimum and divides by the gcd.
pub fn normalize_weights(raw: &[i64]) -> Result<Vec<u64>> {
    let min = *raw
        .iter()
        .min()
        .ok_or_else(|| Error::InvalidParameter("empty weight vector".into()))?;
    let mut shifted: Vec<u64> = raw.iter().map(|&w| (w as i128 - min as i128) as u64).collect();
    shifted.sort_unstable();
    let g = shifted.iter().fold(0u64, |g, &w| g.gcd(&w));
    if g > 1 {
        shifted.iter_mut().for_each(|w| *w /= g);
    }
    Ok(shifted)
}

/// Classical ESS as a weighted alphabet: amplitudes `1, 3, .., M-1` with their
/// energies as weights, canonicalized. For `M = 8` the weights are `(0, 1, 3, 6)`.
pub fn classical_ess_alphabet(m: u32) -> Result<WeightedAlphabet> {
    if m < 2 || !m.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "constellation order must be even and at least 2, got {m}"
        )));
    }
    let amplitudes: Vec<u32> = (1..m).step_by(2).collect();
    let energies: Vec<i64> = amplitudes.iter().map(|&a| i64::from(a) * i64::from(a)).collect();
    WeightedAlphabet::new(amplitudes, normalize_weights(&energies)?)
}
