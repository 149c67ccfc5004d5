//! Reachable weight levels of a trellis and the level to row lookup table.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::alphabet::WeightedAlphabet;

/// Sorted set of weight levels `L ⊂ {0, .., l_max}` reachable as sums of
/// alphabet weights. The position of a level in `levels` is its trellis row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightLevelSet {
    levels: Vec<u64>,
    l_max: u64,
}

impl WeightLevelSet {
    /// Grows the level set from `{0}` by adding every weight to every known
    /// level until the set stops growing. Levels above `l_max` are dropped.
    ///
    /// There is no bound on the number of summands, so levels that need more
    /// than `N` symbols still show up here.
    pub fn compute(alphabet: &WeightedAlphabet, l_max: u64) -> Self {
        let mut levels = BTreeSet::from([0u64]);
        loop {
            let before = levels.len();
            let snapshot: Vec<u64> = levels.iter().copied().collect();
            for level in snapshot {
                for &w in alphabet.weights() {
                    if let Some(next) = level.checked_add(w).filter(|&l| l <= l_max) {
                        levels.insert(next);
                    }
                }
            }
            if levels.len() == before {
                break;
            }
        }
        WeightLevelSet {
            levels: levels.into_iter().collect(),
            l_max,
        }
    }

    pub fn levels(&self) -> &[u64] {
        &self.levels
    }

    pub fn l_max(&self) -> u64 {
        self.l_max
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Row index of `level`, or `None` if the level is unreachable.
    pub fn row_of(&self, level: u64) -> Option<usize> {
        if level > self.l_max {
            return None;
        }
        self.levels.binary_search(&level).ok()
    }

    pub fn level(&self, row: usize) -> u64 {
        self.levels[row]
    }

    pub fn contains(&self, level: u64) -> bool {
        self.row_of(level).is_some()
    }

    /// LUT size in bits: `(log2 |L| + log2 l_max) * |L|`, each term rounded up.
    pub fn lut_storage_bits(&self) -> u64 {
        let bits = |x: u64| u64::from(64 - x.leading_zeros()).max(1);
        let n = self.levels.len() as u64;
        (bits(n.saturating_sub(1)) + bits(self.l_max)) * n
    }
}
