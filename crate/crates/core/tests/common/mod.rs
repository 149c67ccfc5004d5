//! Brute-force oracles shared by the integration tests. Nothing here uses the
//! trellis; everything is plain enumeration.

#![allow(dead_code)]

use gess_core::WeightedAlphabet;
use rand::Rng;

/// Every index sequence of length `len` over `k` symbols, lexicographic.
pub fn all_sequences(k: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut seq = vec![0usize; len];
    loop {
        out.push(seq.clone());
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

/// Sequences of total weight at most `l_max`, in lexicographic order.
pub fn sphere(alphabet: &WeightedAlphabet, len: usize, l_max: u64) -> Vec<Vec<usize>> {
    all_sequences(alphabet.len(), len)
        .into_iter()
        .filter(|s| s.iter().map(|&k| alphabet.weight(k)).sum::<u64>() <= l_max)
        .collect()
}

/// Alphabet with amplitudes 1, 3, 5, .. and the given weights (shifted so
/// the smallest is zero, then sorted).
pub fn alphabet(weights: &[u64]) -> WeightedAlphabet {
    let mut w = weights.to_vec();
    w.sort_unstable();
    let base = w[0];
    w.iter_mut().for_each(|x| *x -= base);
    let amps = (0..w.len() as u32).map(|i| 2 * i + 1).collect();
    WeightedAlphabet::new(amps, w).unwrap()
}

/// A random small trellis configuration whose sequence space is enumerable.
pub fn random_small_config(rng: &mut impl Rng) -> (WeightedAlphabet, usize, u64) {
    let k = rng.gen_range(2..=4);
    let len = rng.gen_range(1..=6);
    let weights: Vec<u64> = (0..k).map(|_| rng.gen_range(0..=6)).collect();
    let a = alphabet(&weights);
    let l_max = rng.gen_range(0..=a.max_weight() * len as u64);
    (a, len, l_max)
}

/// Sum over the first `count` sphere sequences of `Σ_n values[k_n]`.
pub fn prefix_sum(seqs: &[Vec<usize>], count: usize, values: &[u64]) -> u64 {
    seqs[..count]
        .iter()
        .flat_map(|s| s.iter().map(|&k| values[k]))
        .sum()
}

/// Fixed alphabets used for exhaustive checks, including one with a
/// repeated weight.
pub fn exhaustive_family() -> Vec<(WeightedAlphabet, usize, u64)> {
    let shapes: [&[u64]; 6] = [
        &[0, 1, 3, 6],
        &[0, 1, 1, 3],
        &[0, 1, 2, 4],
        &[0, 3, 7, 14],
        &[0, 0, 0, 1],
        &[0, 2, 5],
    ];
    let mut out = Vec::new();
    for w in shapes {
        let a = alphabet(w);
        for len in 1..=6 {
            for l_max in [0, 1, 2, 3, 5, 8, 13, 21] {
                let total = sphere(&a, len, l_max).len();
                if total <= 10_000 {
                    out.push((a.clone(), len, l_max));
                }
            }
        }
    }
    out
}
