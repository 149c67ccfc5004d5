//! Constant-composition distribution matching.
//!
//! The code book is every permutation of one multiset of amplitudes. Indices
//! are exact lexicographic ranks among those permutations, so encoding and
//! decoding are bit-exact inverses without arithmetic-coding precision
//! concerns.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::alphabet::TargetDistribution;
use crate::codec::{bytes_to_index, index_to_bytes, SequenceIndex};
use crate::error::{Error, Result};
use crate::numeric::floor_log2;

/// Occurrence count per symbol index; the counts sum to the block length.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Composition {
    counts: Vec<u64>,
}

impl Composition {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidParameter("empty composition".into()));
        }
        Ok(Composition { counts })
    }

    /// Largest-remainder rounding of `len * P`. Leftover units go to the
    /// largest fractional parts, ties to the lower index.
    pub fn from_distribution(dist: &TargetDistribution, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidParameter("block length must be positive".into()));
        }
        let scaled: Vec<f64> = dist.probs().iter().map(|p| p * len as f64).collect();
        let mut counts: Vec<u64> = scaled.iter().map(|x| x.floor() as u64).collect();
        let assigned: u64 = counts.iter().sum();
        let leftover = (len as u64).saturating_sub(assigned) as usize;
        let mut order: Vec<usize> = (0..counts.len()).collect();
        let frac = |k: usize| scaled[k] - scaled[k].floor();
        order.sort_by(|&a, &b| frac(b).total_cmp(&frac(a)).then(a.cmp(&b)));
        for &k in order.iter().cycle().take(leftover) {
            counts[k] += 1;
        }
        Ok(Composition { counts })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Block length `N`.
    pub fn len(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `N! / Π n_k!`, built as a product of binomials.
    pub fn multinomial(&self) -> BigUint {
        let mut result = BigUint::one();
        let mut placed = 0u64;
        for &c in &self.counts {
            for j in 1..=c {
                result *= placed + j;
                result /= j;
            }
            placed += c;
        }
        result
    }

    /// `floor(log2 multinomial)`, the payload size.
    pub fn rate_bits(&self) -> u64 {
        floor_log2(&self.multinomial())
    }

    /// Lexicographic unranking: the `index`-th permutation of the multiset.
    pub fn encode(&self, index: &BigUint) -> Result<Vec<usize>> {
        let mut block = self.multinomial();
        if index >= &block {
            return Err(Error::IndexOutOfRange {
                index: index.to_string(),
                size: block.to_string(),
            });
        }
        let mut remaining = self.counts.clone();
        let mut left = self.len();
        let mut local = index.clone();
        let mut out = Vec::with_capacity(left as usize);
        while left > 0 {
            for (k, r) in remaining.iter_mut().enumerate() {
                if *r == 0 {
                    continue;
                }
                // permutations of the rest that start with symbol k
                let sub = &block * *r / left;
                if local < sub {
                    out.push(k);
                    *r -= 1;
                    left -= 1;
                    block = sub;
                    break;
                }
                local -= sub;
            }
        }
        Ok(out)
    }

    /// Lexicographic rank; rejects sequences of a different composition.
    pub fn decode(&self, sequence: &[usize]) -> Result<BigUint> {
        let mut seen = vec![0u64; self.counts.len()];
        for &k in sequence {
            *seen.get_mut(k).ok_or(Error::CompositionMismatch)? += 1;
        }
        if seen != self.counts {
            return Err(Error::CompositionMismatch);
        }
        let mut remaining = self.counts.clone();
        let mut left = self.len();
        let mut block = self.multinomial();
        let mut index = BigUint::zero();
        for &symbol in sequence {
            for &r in remaining[..symbol].iter().filter(|&&r| r > 0) {
                index += &block * r / left;
            }
            block = &block * remaining[symbol] / left;
            remaining[symbol] -= 1;
            left -= 1;
        }
        Ok(index)
    }
}

/// CCDM over a distribution's amplitudes with a fixed payload size.
#[derive(Clone, Debug)]
pub struct CcdmMatcher {
    amplitudes: Vec<u32>,
    composition: Composition,
    k_bits: u64,
}

impl CcdmMatcher {
    /// Uses the largest-remainder composition and the largest payload it carries.
    pub fn for_distribution(dist: &TargetDistribution, len: usize) -> Result<Self> {
        let composition = Composition::from_distribution(dist, len)?;
        let k_bits = composition.rate_bits();
        Ok(CcdmMatcher {
            amplitudes: dist.amplitudes().to_vec(),
            composition,
            k_bits,
        })
    }

    pub fn composition(&self) -> &Composition {
        &self.composition
    }

    pub fn amplitudes(&self) -> &[u32] {
        &self.amplitudes
    }

    pub fn k_bits(&self) -> u64 {
        self.k_bits
    }

    pub fn encode_bytes(&self, payload: &[u8]) -> Result<Vec<u32>> {
        let index = bytes_to_index(payload, self.k_bits)?;
        let seq = self.composition.encode(index.value())?;
        Ok(seq.into_iter().map(|k| self.amplitudes[k]).collect())
    }

    pub fn decode_bytes(&self, amplitudes: &[u32]) -> Result<Vec<u8>> {
        let seq = amplitudes
            .iter()
            .map(|&a| {
                self.amplitudes
                    .iter()
                    .position(|&x| x == a)
                    .ok_or(Error::UnknownAmplitude(a))
            })
            .collect::<Result<Vec<_>>>()?;
        let index = self.composition.decode(&seq)?;
        index_to_bytes(&SequenceIndex(index), self.k_bits)
    }
}
