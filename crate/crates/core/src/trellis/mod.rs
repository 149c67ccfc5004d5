//! Bounded-weight enumeration trellis.
//!
//! Node `(n, ℓ)` holds `T_n^ℓ`, the number of ways to complete a sequence
//! from stage `n` when the symbols chosen so far weigh `ℓ` in total, without
//! the total ever exceeding `l_max`. Stage `N` is the terminator where every
//! node counts one (empty) completion, so `T_0^0` is the number of sequences
//! in the sphere.

mod cache;

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::alphabet::WeightedAlphabet;
use crate::error::{Error, Result};
use crate::numeric::floor_log2;
use crate::weight_levels::WeightLevelSet;

const NO_ROW: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trellis {
    alphabet: WeightedAlphabet,
    len: usize,
    levels: WeightLevelSet,
    /// `next[row * K + k]`: row reached from `row` by symbol `k`, or `NO_ROW`.
    next: Vec<u32>,
    /// Stage-major counts, `counts[n][row]`.
    counts: Vec<Vec<BigUint>>,
}

impl Trellis {
    /// Builds the trellis for sequences of `len` symbols with total weight at
    /// most `l_max`.
    pub fn build(alphabet: &WeightedAlphabet, len: usize, l_max: u64) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidParameter("sequence length must be at least 1".into()));
        }
        let levels = WeightLevelSet::compute(alphabet, l_max);
        if levels.len() >= NO_ROW as usize {
            return Err(Error::InvalidParameter("too many weight levels".into()));
        }
        let next = successor_table(alphabet, &levels);
        let rows = levels.len();
        let k_count = alphabet.len();

        let mut counts = vec![Vec::new(); len + 1];
        counts[len] = vec![BigUint::one(); rows];
        for n in (0..len).rev() {
            let (head, tail) = counts.split_at_mut(n + 1);
            let after = &tail[0];
            head[n] = (0..rows)
                .map(|row| {
                    let mut sum = BigUint::zero();
                    for &succ in &next[row * k_count..(row + 1) * k_count] {
                        if succ != NO_ROW {
                            sum += &after[succ as usize];
                        }
                    }
                    sum
                })
                .collect();
        }
        Ok(Trellis {
            alphabet: alphabet.clone(),
            len,
            levels,
            next,
            counts,
        })
    }

    /// Sequence length `N`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn alphabet(&self) -> &WeightedAlphabet {
        &self.alphabet
    }

    pub fn levels(&self) -> &WeightLevelSet {
        &self.levels
    }

    pub fn l_max(&self) -> u64 {
        self.levels.l_max()
    }

    /// `T_0^0`, the number of sequences in the trellis.
    pub fn total(&self) -> &BigUint {
        &self.counts[0][0]
    }

    /// Largest `k` with `2^k <= T_0^0`.
    pub fn max_bits(&self) -> u64 {
        floor_log2(self.total())
    }

    /// `T_n^ℓ`, zero for levels outside the level set.
    pub fn count(&self, stage: usize, level: u64) -> &BigUint {
        static ZERO: BigUint = BigUint::ZERO;
        match self.levels.row_of(level) {
            Some(row) => &self.counts[stage][row],
            None => &ZERO,
        }
    }

    /// Counts of one stage, indexed by row.
    pub fn stage(&self, stage: usize) -> &[BigUint] {
        &self.counts[stage]
    }

    /// Row reached from `row` by appending symbol `k`, if it stays within `l_max`.
    pub fn successor(&self, row: usize, k: usize) -> Option<usize> {
        let succ = self.next[row * self.alphabet.len() + k];
        (succ != NO_ROW).then_some(succ as usize)
    }

    pub(crate) fn count_at_row(&self, stage: usize, row: usize) -> &BigUint {
        &self.counts[stage][row]
    }

    /// Number of big integers stored, `(N + 1) * |L|`.
    pub fn node_count(&self) -> usize {
        self.counts.len() * self.levels.len()
    }

    /// Energy bound of the equivalent classical ESS trellis, `8 l_max + N`.
    pub fn classical_energy_bound(&self) -> Result<u64> {
        self.require_classical()?;
        Ok(8 * self.l_max() + self.len as u64)
    }

    /// Relabels every node `(n, ℓ)` as `(n, e)` with `e = 8ℓ + n`, the prefix
    /// energy in a classical 8-ASK ESS trellis. Only defined for the classical
    /// `(0, 1, 3, 6)` alphabet.
    pub fn classical_energy_view(&self) -> Result<BTreeMap<(usize, u64), BigUint>> {
        self.require_classical()?;
        let mut view = BTreeMap::new();
        for (n, stage) in self.counts.iter().enumerate() {
            for (row, count) in stage.iter().enumerate() {
                let e = 8 * self.levels.level(row) + n as u64;
                view.insert((n, e), count.clone());
            }
        }
        Ok(view)
    }

    fn require_classical(&self) -> Result<()> {
        if self.alphabet.is_classical(8) {
            Ok(())
        } else {
            Err(Error::InvalidAlphabet(
                "energy relabeling needs the classical 8-ASK alphabet (0, 1, 3, 6)".into(),
            ))
        }
    }

    /// Checks every count against the recursion
    /// `T_n^ℓ = Σ_k T_{n+1}^{ℓ + w^(k)}` and the all-ones terminator.
    pub fn verify(&self) -> bool {
        let k_count = self.alphabet.len();
        if !self.counts[self.len].iter().all(|c| c.is_one()) {
            return false;
        }
        (0..self.len).all(|n| {
            self.counts[n].iter().enumerate().all(|(row, count)| {
                let sum: BigUint = self.next[row * k_count..(row + 1) * k_count]
                    .iter()
                    .filter(|&&s| s != NO_ROW)
                    .map(|&s| &self.counts[n + 1][s as usize])
                    .sum();
                sum == *count
            })
        })
    }

    /// Reassembles a trellis from stored parts. The level set must be the one
    /// the alphabet generates; counts are taken as stored (see [`Trellis::verify`]).
    pub(crate) fn from_parts(
        alphabet: WeightedAlphabet,
        len: usize,
        l_max: u64,
        stored_levels: Vec<u64>,
        counts: Vec<Vec<BigUint>>,
    ) -> Result<Self> {
        if len == 0 {
            return Err(Error::Cache("sequence length is zero".into()));
        }
        let levels = WeightLevelSet::compute(&alphabet, l_max);
        if levels.levels() != stored_levels.as_slice() {
            return Err(Error::Cache("level set does not match the alphabet".into()));
        }
        if counts.len() != len + 1 || counts.iter().any(|s| s.len() != levels.len()) {
            return Err(Error::Cache("count table has the wrong shape".into()));
        }
        if !counts[len].iter().all(|c| c.is_one()) {
            return Err(Error::Cache("terminator stage is not all ones".into()));
        }
        let next = successor_table(&alphabet, &levels);
        Ok(Trellis {
            alphabet,
            len,
            levels,
            next,
            counts,
        })
    }
}

fn successor_table(alphabet: &WeightedAlphabet, levels: &WeightLevelSet) -> Vec<u32> {
    let mut next = Vec::with_capacity(levels.len() * alphabet.len());
    for &level in levels.levels() {
        for &w in alphabet.weights() {
            let row = level
                .checked_add(w)
                .and_then(|l| levels.row_of(l))
                .map_or(NO_ROW, |r| r as u32);
            next.push(row);
        }
    }
    next
}

/// Number of length-`len` sequences at each exact total weight `0..=bound`.
pub fn weight_distribution(alphabet: &WeightedAlphabet, len: usize, bound: u64) -> Vec<BigUint> {
    // group equal weights so each stage does one multiply-add per distinct weight
    let mut groups: Vec<(usize, u32)> = Vec::new();
    for &w in alphabet.weights() {
        match groups.last_mut() {
            Some((gw, mult)) if *gw as u64 == w => *mult += 1,
            _ if w <= bound => groups.push((w as usize, 1)),
            _ => {}
        }
    }
    let size = bound as usize + 1;
    let mut row = vec![BigUint::zero(); size];
    row[0] = BigUint::one();
    let mut reach = 0usize;
    for _ in 0..len {
        let mut next = vec![BigUint::zero(); size];
        for (level, count) in row.iter().enumerate().take(reach + 1) {
            if count.is_zero() {
                continue;
            }
            for &(w, mult) in &groups {
                let target = level + w;
                if target >= size {
                    break;
                }
                if mult == 1 {
                    next[target] += count;
                } else {
                    next[target] += count * mult;
                }
            }
        }
        reach = (reach + groups.last().map_or(0, |g| g.0)).min(size - 1);
        row = next;
    }
    row
}

/// Smallest `l_max` whose trellis holds at least `2^k_bits` sequences, and
/// that trellis.
pub fn select_l_max(
    alphabet: &WeightedAlphabet,
    len: usize,
    k_bits: u64,
) -> Result<(u64, Trellis)> {
    if len == 0 {
        return Err(Error::InvalidParameter("sequence length must be at least 1".into()));
    }
    let all = BigUint::from(alphabet.len()).pow(len as u32);
    let needed = BigUint::one() << k_bits;
    if needed > all {
        return Err(Error::InfeasibleRate {
            k_bits,
            max_bits: floor_log2(&all),
        });
    }
    let ceiling = alphabet.max_weight() * len as u64;
    // counts at weight ℓ only depend on lighter prefixes, so a truncated
    // distribution is exact below its bound; grow the bound until it suffices
    let mut bound = alphabet.max_weight().clamp(16, ceiling.max(16)).min(ceiling);
    loop {
        let dist = weight_distribution(alphabet, len, bound);
        let mut cumulative = BigUint::zero();
        for (level, count) in dist.iter().enumerate() {
            cumulative += count;
            if cumulative >= needed {
                let l_max = level as u64;
                return Ok((l_max, Trellis::build(alphabet, len, l_max)?));
            }
        }
        if bound >= ceiling {
            unreachable!("the full trellis holds (M/2)^N >= 2^k sequences");
        }
        bound = (bound * 2).min(ceiling);
    }
}
