//! Exact statistics of the code book formed by the first `K` codewords of a
//! trellis.
//!
//! Nothing is enumerated. Every node gets a second table holding the sum of a
//! per-symbol statistic over all its completions; walking the boundary index
//! `K` like the shaper does then adds whole subtrees at once.

mod sweep;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::alphabet::{TargetDistribution, WeightedAlphabet};
use crate::ccdm::Composition;
use crate::error::{Error, Result};
use crate::numeric::{floor_log2, log2_big, ratio_to_f64};
use crate::trellis::Trellis;

pub use sweep::{
    default_factor_grid, evaluate_alphabet, evaluate_factor, sweep_factor, SweepConfig, SweepRow,
};

/// How many of the trellis sequences form the code book.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CodebookSize {
    /// `2^k` for a `k`-bit payload.
    Payload(u64),
    /// `2^floor(log2 T_0^0)`, every bit the trellis can carry.
    LargestPowerOfTwo,
    /// All `T_0^0` sequences.
    Full,
    Exact(BigUint),
}

impl CodebookSize {
    pub fn resolve(&self, trellis: &Trellis) -> Result<BigUint> {
        let size = match self {
            CodebookSize::Payload(k) => BigUint::one() << *k,
            CodebookSize::LargestPowerOfTwo => BigUint::one() << trellis.max_bits(),
            CodebookSize::Full => trellis.total().clone(),
            CodebookSize::Exact(k) => k.clone(),
        };
        if size.is_zero() || &size > trellis.total() {
            return Err(Error::IndexOutOfRange {
                index: size.to_string(),
                size: trellis.total().to_string(),
            });
        }
        Ok(size)
    }
}

/// Exact occurrence counts and energy of a prefix code book.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodebookStats {
    pub size: BigUint,
    pub sequence_len: usize,
    /// Alphabet amplitudes, in alphabet index order.
    pub amplitudes: Vec<u32>,
    /// How often each amplitude occurs over all codewords and positions.
    pub amplitude_counts: Vec<BigUint>,
    /// `Σ_codewords Σ_n a_n^2`.
    pub total_energy: BigUint,
}

impl CodebookStats {
    /// Mean of `a^2` per amplitude.
    pub fn avg_energy(&self) -> f64 {
        ratio_to_f64(&self.total_energy, &(&self.size * self.sequence_len))
    }

    /// Empirical amplitude distribution, in alphabet index order.
    pub fn amp_hist(&self) -> Vec<f64> {
        let symbols = &self.size * self.sequence_len;
        self.amplitude_counts
            .iter()
            .map(|c| ratio_to_f64(c, &symbols))
            .collect()
    }

    /// Shaping rate `log2 |C| / N` in bits per amplitude.
    pub fn rate(&self) -> f64 {
        log2_big(&self.size) / self.sequence_len as f64
    }

    /// `W(C) / |C|` with exact self-information weights `-log2 P(a)`.
    pub fn mean_weight(&self, dist: &TargetDistribution) -> Result<f64> {
        let mut mean = 0.0;
        for (amp, count) in self.amplitudes.iter().zip(&self.amplitude_counts) {
            if count.is_zero() {
                continue;
            }
            let p = dist.prob_of(*amp).ok_or_else(|| {
                Error::InvalidDistribution(format!(
                    "amplitude {amp} occurs in the code book but has no probability"
                ))
            })?;
            mean += ratio_to_f64(count, &self.size) * -p.log2();
        }
        Ok(mean)
    }

    /// Total self-information weight `W(C)` in bits.
    pub fn total_weight(&self, dist: &TargetDistribution) -> Result<f64> {
        Ok(self.mean_weight(dist)? * self.size.to_f64().unwrap_or(f64::INFINITY))
    }

    /// `D(U_A || P_A) = -log2 |C| + W(C) / |C|` in bits.
    pub fn divergence(&self, dist: &TargetDistribution) -> Result<f64> {
        Ok(self.mean_weight(dist)? - log2_big(&self.size))
    }
}

/// Statistics over the first `size` codewords of `trellis`.
pub fn codebook_prefix_stats(trellis: &Trellis, size: &BigUint) -> Result<CodebookStats> {
    if size.is_zero() || size > trellis.total() {
        return Err(Error::IndexOutOfRange {
            index: size.to_string(),
            size: trellis.total().to_string(),
        });
    }
    let alphabet = trellis.alphabet();
    let amplitude_counts: Vec<BigUint> = (0..alphabet.len())
        .map(|k| {
            let indicator: Vec<u64> = (0..alphabet.len()).map(|j| u64::from(j == k)).collect();
            prefix_additive_sum(trellis, size, &indicator)
        })
        .collect();
    let total_energy = amplitude_counts
        .iter()
        .zip(alphabet.amplitudes())
        .map(|(c, &a)| c * (u64::from(a) * u64::from(a)))
        .sum();
    Ok(CodebookStats {
        size: size.clone(),
        sequence_len: trellis.len(),
        amplitudes: alphabet.amplitudes().to_vec(),
        amplitude_counts,
        total_energy,
    })
}

/// Sum over the first `size` codewords of `Σ_n values[k_n]`.
pub fn prefix_additive_sum(trellis: &Trellis, size: &BigUint, values: &[u64]) -> BigUint {
    let k_count = trellis.alphabet().len();
    assert_eq!(values.len(), k_count);
    let len = trellis.len();
    let rows = trellis.levels().len();

    // suffix[n][row]: Σ over completions from (n, row) of the statistic
    let mut suffix: Vec<Vec<BigUint>> = vec![Vec::new(); len + 1];
    suffix[len] = vec![BigUint::zero(); rows];
    for n in (0..len).rev() {
        let (head, tail) = suffix.split_at_mut(n + 1);
        let after = &tail[0];
        head[n] = (0..rows)
            .map(|row| {
                let mut sum = BigUint::zero();
                for (k, &v) in values.iter().enumerate() {
                    let Some(succ) = trellis.successor(row, k) else {
                        break;
                    };
                    sum += &after[succ];
                    if v != 0 {
                        sum += trellis.count_at_row(n + 1, succ) * v;
                    }
                }
                sum
            })
            .collect();
    }

    let mut remaining = size.clone();
    let mut row = 0usize;
    let mut prefix = 0u64;
    let mut total = BigUint::zero();
    for n in 0..len {
        if remaining.is_zero() {
            break;
        }
        for (k, &v) in values.iter().enumerate() {
            let Some(succ) = trellis.successor(row, k) else {
                break;
            };
            let block = trellis.count_at_row(n + 1, succ);
            if &remaining >= block {
                total += block * (prefix + v) + &suffix[n + 1][succ];
                remaining -= block;
            } else {
                prefix += v;
                row = succ;
                break;
            }
        }
    }
    debug_assert!(remaining.is_zero());
    total
}

/// `D(U_A || P_A)` in bits for the first `size` codewords.
pub fn divergence(trellis: &Trellis, size: &BigUint, dist: &TargetDistribution) -> Result<f64> {
    codebook_prefix_stats(trellis, size)?.divergence(dist)
}

/// `H(P_A) - k / N` in bits per amplitude. Negative values mean the payload
/// rate exceeds the target entropy.
pub fn rate_loss(dist: &TargetDistribution, len: usize, k_bits: u64) -> f64 {
    dist.entropy() - k_bits as f64 / len as f64
}

/// Everything reported about one code book.
#[derive(Clone, Debug, Serialize)]
pub struct CodebookReport {
    pub sequence_len: usize,
    pub l_max: u64,
    pub trellis_bits: u64,
    pub codebook_bits: u64,
    pub codebook_size: String,
    pub amplitudes: Vec<u32>,
    pub weights: Vec<u64>,
    pub amp_hist: Vec<f64>,
    pub avg_energy: f64,
    pub rate: f64,
    pub target_entropy: f64,
    pub rate_loss: f64,
    pub total_weight: f64,
    pub divergence: f64,
    pub divergence_per_amplitude: f64,
}

impl CodebookReport {
    pub fn new(trellis: &Trellis, size: &CodebookSize, dist: &TargetDistribution) -> Result<Self> {
        let size = size.resolve(trellis)?;
        let stats = codebook_prefix_stats(trellis, &size)?;
        let divergence = stats.divergence(dist)?;
        let rate = stats.rate();
        Ok(CodebookReport {
            sequence_len: trellis.len(),
            l_max: trellis.l_max(),
            trellis_bits: trellis.total().bits(),
            codebook_bits: floor_log2(&size),
            codebook_size: size.to_string(),
            amplitudes: stats.amplitudes.clone(),
            weights: trellis.alphabet().weights().to_vec(),
            amp_hist: stats.amp_hist(),
            avg_energy: stats.avg_energy(),
            rate,
            target_entropy: dist.entropy(),
            rate_loss: dist.entropy() - rate,
            total_weight: stats.total_weight(dist)?,
            divergence,
            divergence_per_amplitude: divergence / trellis.len() as f64,
        })
    }
}

/// Payload sizes of CCDM and generalized ESS for the same target.
#[derive(Clone, Debug, Serialize)]
pub struct RateComparison {
    pub composition: Vec<u64>,
    pub ccdm_bits: u64,
    pub ess_l_max: u64,
    pub ess_bits: u64,
    /// `(k_ESS - k_CCDM) / N` in bits per amplitude.
    pub gap: f64,
}

/// Compares CCDM on the largest-remainder composition of `dist` with
/// generalized ESS whose sphere is just large enough to contain that type
/// class: `l_max` is the composition's total weight. `alphabet` must hold the
/// amplitudes of `dist`.
pub fn rate_comparison(
    dist: &TargetDistribution,
    alphabet: &WeightedAlphabet,
    len: usize,
) -> Result<RateComparison> {
    let composition = Composition::from_distribution(dist, len)?;
    let ccdm_bits = composition.rate_bits();
    let mut l_max = 0u64;
    for (&amp, &count) in dist.amplitudes().iter().zip(composition.counts()) {
        let k = alphabet.index_of(amp).ok_or(Error::UnknownAmplitude(amp))?;
        l_max += alphabet.weight(k) * count;
    }
    let trellis = Trellis::build(alphabet, len, l_max)?;
    let ess_bits = trellis.max_bits();
    Ok(RateComparison {
        composition: composition.counts().to_vec(),
        ccdm_bits,
        ess_l_max: l_max,
        ess_bits,
        gap: (ess_bits as f64 - ccdm_bits as f64) / len as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::classical_ess_alphabet;

    /// First `size` admissible index sequences in lexicographic order, by
    /// enumerating the full product space.
    fn brute_codebook(alphabet: &WeightedAlphabet, len: usize, l_max: u64, size: usize) -> Vec<Vec<usize>> {
        let k = alphabet.len();
        let mut out = Vec::new();
        let mut seq = vec![0usize; len];
        loop {
            if alphabet.sequence_weight(&seq) <= l_max {
                out.push(seq.clone());
                if out.len() == size {
                    return out;
                }
            }
            // odometer with the last position fastest
            let mut pos = len;
            loop {
                if pos == 0 {
                    return out;
                }
                pos -= 1;
                seq[pos] += 1;
                if seq[pos] < k {
                    break;
                }
                seq[pos] = 0;
            }
        }
    }

    #[test]
    fn toy_full_codebook_energy() {
        let a = classical_ess_alphabet(8).unwrap();
        let t = Trellis::build(&a, 2, 3).unwrap();
        let stats = codebook_prefix_stats(&t, t.total()).unwrap();
        // (1,1) (1,3) (1,5) (3,1) (3,3) (5,1)
        let energy: u64 = [2, 10, 26, 10, 18, 26].iter().sum();
        assert_eq!(stats.total_energy, BigUint::from(energy));
        assert_eq!(stats.avg_energy(), energy as f64 / 12.0);
        assert_eq!(
            stats.amplitude_counts,
            [6u32, 4, 2, 0].map(BigUint::from).to_vec()
        );
    }

    #[test]
    fn single_codeword() {
        let a = WeightedAlphabet::new(vec![3, 1, 5], vec![0, 2, 5]).unwrap();
        let t = Trellis::build(&a, 6, 7).unwrap();
        let stats = codebook_prefix_stats(&t, &BigUint::one()).unwrap();
        assert_eq!(stats.avg_energy(), 9.0);
        assert!(codebook_prefix_stats(&t, &BigUint::zero()).is_err());
        assert!(codebook_prefix_stats(&t, &(t.total() + 1u32)).is_err());
    }

    #[test]
    fn prefix_sums_match_enumeration() {
        let a = WeightedAlphabet::new(vec![1, 3, 5, 7], vec![0, 1, 1, 3]).unwrap();
        let t = Trellis::build(&a, 4, 3).unwrap();
        let total = 69;
        let all = brute_codebook(&a, 4, 3, total);
        assert_eq!(all.len(), total);
        for size in 1..=total {
            let stats = codebook_prefix_stats(&t, &BigUint::from(size)).unwrap();
            let energy: u64 = all[..size]
                .iter()
                .flatten()
                .map(|&k| u64::from(a.amplitude(k).pow(2)))
                .sum();
            assert_eq!(stats.total_energy, BigUint::from(energy), "size {size}");
        }
    }

    #[test]
    fn uniform_full_codebook_has_zero_divergence() {
        let a = WeightedAlphabet::new(vec![1, 3, 5, 7], vec![0, 0, 0, 0]).unwrap();
        let t = Trellis::build(&a, 5, 0).unwrap();
        let d = divergence(&t, t.total(), &TargetDistribution::uniform(vec![1, 3, 5, 7]).unwrap()).unwrap();
        assert!(d.abs() < 1e-12, "{d}");
    }

    #[test]
    fn divergence_needs_probabilities_for_used_amplitudes() {
        let t = Trellis::build(&classical_ess_alphabet(8).unwrap(), 2, 3).unwrap();
        let partial = TargetDistribution::new(vec![1, 3], vec![0.5, 0.5]).unwrap();
        assert!(divergence(&t, t.total(), &partial).is_err());
        // amplitude 7 never occurs, so it needs no probability
        let three = TargetDistribution::new(vec![1, 3, 5], vec![0.5, 0.3, 0.2]).unwrap();
        assert!(divergence(&t, t.total(), &three).is_ok());
    }

    #[test]
    fn rate_loss_definition() {
        let u = TargetDistribution::uniform(vec![1, 3, 5, 7]).unwrap();
        assert_eq!(rate_loss(&u, 10, 20), 0.0);
        assert!(rate_loss(&u, 10, 15) > 0.0);
    }

    #[test]
    fn energy_grows_with_sphere() {
        let a = classical_ess_alphabet(8).unwrap();
        let mut previous = 0.0;
        for l_max in 0..30 {
            let t = Trellis::build(&a, 12, l_max).unwrap();
            let e = codebook_prefix_stats(&t, t.total()).unwrap().avg_energy();
            assert!(e >= previous);
            previous = e;
        }
    }

    #[test]
    fn codebook_size_resolution() {
        let t = Trellis::build(&classical_ess_alphabet(8).unwrap(), 2, 3).unwrap();
        assert_eq!(CodebookSize::Payload(2).resolve(&t).unwrap(), BigUint::from(4u32));
        assert_eq!(CodebookSize::LargestPowerOfTwo.resolve(&t).unwrap(), BigUint::from(4u32));
        assert_eq!(CodebookSize::Full.resolve(&t).unwrap(), BigUint::from(6u32));
        assert!(CodebookSize::Payload(3).resolve(&t).is_err());
    }
}
