mod common;

use gess_core::analysis::{prefix_additive_sum, rate_comparison};
use gess_core::ccdm::Composition;
use gess_core::distributions::maxwell_boltzmann;
use gess_core::{
    classical_ess_alphabet, codebook_prefix_stats, divergence, quantize_weights, BigUint,
    TargetDistribution, Trellis, WeightQuantizer, LogBase, Rounding,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{all_sequences, random_small_config, sphere};

#[test]
fn prefix_statistics_match_enumeration_for_every_size() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    while checked < 60 {
        let (a, len, l_max) = random_small_config(&mut rng);
        let seqs = sphere(&a, len, l_max);
        if seqs.len() > 2_000 {
            continue;
        }
        let t = Trellis::build(&a, len, l_max).unwrap();
        let energies: Vec<u64> = a.amplitudes().iter().map(|&x| u64::from(x * x)).collect();
        let random_values: Vec<u64> = (0..a.len()).map(|_| rng.gen_range(0..1000)).collect();
        for size in 1..=seqs.len() {
            let big = BigUint::from(size);
            let stats = codebook_prefix_stats(&t, &big).unwrap();
            assert_eq!(stats.total_energy, BigUint::from(common::prefix_sum(&seqs, size, &energies)));
            for k in 0..a.len() {
                let indicator: Vec<u64> = (0..a.len()).map(|j| u64::from(j == k)).collect();
                assert_eq!(
                    stats.amplitude_counts[k],
                    BigUint::from(common::prefix_sum(&seqs, size, &indicator))
                );
            }
            assert_eq!(
                prefix_additive_sum(&t, &big, &random_values),
                BigUint::from(common::prefix_sum(&seqs, size, &random_values))
            );
        }
        checked += 1;
    }
}

/// `Σ_c U(c) log2(U(c) / P(c))` with `U` uniform over the first `size` codewords.
fn direct_divergence(seqs: &[Vec<usize>], size: usize, amps: &[u32], dist: &TargetDistribution) -> f64 {
    let u = 1.0 / size as f64;
    seqs[..size]
        .iter()
        .map(|s| {
            let log_p: f64 = s.iter().map(|&k| dist.prob_of(amps[k]).unwrap().log2()).sum();
            u * (u.log2() - log_p)
        })
        .sum()
}

#[test]
fn divergence_matches_direct_sum() {
    let dists = [
        TargetDistribution::new(vec![1, 3, 5, 7], vec![0.4, 0.3, 0.2, 0.1]).unwrap(),
        maxwell_boltzmann(&[1, 3, 5, 7], 0.1).unwrap(),
        maxwell_boltzmann(&[1, 3, 5, 7], 0.02).unwrap(),
    ];
    for dist in &dists {
        for f in [0.5, 1.0, 3.0, 6.0] {
            let a = WeightQuantizer::new(LogBase::Binary, Rounding::RelativeToMode)
                .quantize(dist, f)
                .unwrap();
            for len in [2, 4, 6] {
                for l_max in [0, 2, 5, 9, 14] {
                    let seqs = sphere(&a, len, l_max);
                    if seqs.len() > 10_000 {
                        continue;
                    }
                    let t = Trellis::build(&a, len, l_max).unwrap();
                    for size in [1, seqs.len() / 3 + 1, seqs.len()] {
                        let dp = divergence(&t, &BigUint::from(size), dist).unwrap();
                        let direct = direct_divergence(&seqs, size, a.amplitudes(), dist);
                        let scale = direct.abs().max(1e-300);
                        assert!(
                            (dp - direct).abs() / scale < 1e-9 || (dp - direct).abs() < 1e-12,
                            "f={f} N={len} l_max={l_max} K={size}: {dp} vs {direct}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn ccdm_is_exhaustively_bijective() {
    let compositions: [&[u64]; 7] = [
        &[1, 1],
        &[2, 1],
        &[3, 2, 1],
        &[3, 3, 2, 1],
        &[2, 2, 2, 2],
        &[5, 0, 3],
        &[6, 1, 1, 1],
    ];
    for counts in compositions {
        let c = Composition::new(counts.to_vec()).unwrap();
        let total = c.multinomial();
        assert!(total <= BigUint::from(10_000u32));
        let k = counts.len();
        let len = c.len() as usize;
        // every permutation of the multiset, lexicographic
        let perms: Vec<Vec<usize>> = all_sequences(k, len)
            .into_iter()
            .filter(|s| (0..k).all(|j| s.iter().filter(|&&x| x == j).count() as u64 == counts[j]))
            .collect();
        assert_eq!(BigUint::from(perms.len()), total);
        for (i, p) in perms.iter().enumerate() {
            let index = BigUint::from(i);
            assert_eq!(&c.encode(&index).unwrap(), p);
            assert_eq!(c.decode(p).unwrap(), index);
        }
        assert!(c.encode(&total).is_err());
    }
}

#[test]
fn ess_carries_more_than_ccdm() {
    let mb = maxwell_boltzmann(&[1, 3, 5, 7], 0.1).unwrap();
    for f in [1.0, 2.0, 3.0, 5.0] {
        let a = quantize_weights(&mb, f).unwrap();
        for len in [32, 64, 256] {
            let r = rate_comparison(&mb, &a, len).unwrap();
            assert!(r.ess_bits >= r.ccdm_bits, "f={f} N={len}");
        }
    }
    let r = rate_comparison(&mb, &classical_ess_alphabet(8).unwrap(), 256).unwrap();
    assert!(r.ess_bits >= r.ccdm_bits);
}
