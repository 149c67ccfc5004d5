//! Target distributions: Maxwell-Boltzmann and entropy tuning of an
//! optimized distribution.

use crate::alphabet::TargetDistribution;
use crate::error::{Error, Result};
use crate::numeric::entropy_bits;

const ENTROPY_TOLERANCE: f64 = 1e-9;

/// `P(a) ∝ exp(-λ a²)`. `λ = 0` is uniform. Amplitudes whose mass underflows
/// to zero are dropped.
pub fn maxwell_boltzmann(amplitudes: &[u32], lambda: f64) -> Result<TargetDistribution> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Maxwell-Boltzmann parameter must be non-negative, got {lambda}"
        )));
    }
    let min_energy = amplitudes.iter().map(|&a| f64::from(a).powi(2)).fold(f64::INFINITY, f64::min);
    let masses: Vec<f64> = amplitudes
        .iter()
        .map(|&a| (-lambda * (f64::from(a).powi(2) - min_energy)).exp())
        .collect();
    TargetDistribution::from_masses(amplitudes.to_vec(), &masses)
}

fn tuned_probs(probs: &[f64], lambda: f64) -> Vec<f64> {
    let exponent = 1.0 + lambda;
    let logs: Vec<f64> = probs.iter().map(|p| exponent * p.ln()).collect();
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let masses: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = masses.iter().sum();
    masses.into_iter().map(|m| m / total).collect()
}

/// `P_mod(a) ∝ P(a) · P(a)^λ`. Positive `λ` sharpens towards the mode,
/// `-1 < λ < 0` flattens towards uniform.
pub fn entropy_tune(p_opt: &TargetDistribution, lambda: f64) -> Result<TargetDistribution> {
    if !(lambda.is_finite() && lambda > -1.0) {
        return Err(Error::InvalidParameter(format!(
            "tuning parameter must lie in (-1, inf), got {lambda}"
        )));
    }
    if lambda == 0.0 {
        return Ok(p_opt.clone());
    }
    let tuned = tuned_probs(p_opt.probs(), lambda);
    TargetDistribution::from_masses(p_opt.amplitudes().to_vec(), &tuned)
}

/// Entropy of `entropy_tune(p, lambda)` in bits, without validation.
fn tuned_entropy(probs: &[f64], lambda: f64) -> f64 {
    entropy_bits(&tuned_probs(probs, lambda))
}

/// Bisection for the `λ` at which the tuned distribution has entropy
/// `target` bits, to within `1e-9` bits. Achievable targets lie strictly
/// between `log2(#modes)` and `log2(#amplitudes)`, or equal `H(p_opt)`.
pub fn find_lambda_for_entropy(p_opt: &TargetDistribution, target: f64) -> Result<f64> {
    let probs = p_opt.probs();
    let h0 = p_opt.entropy();
    if (target - h0).abs() < ENTROPY_TOLERANCE {
        return Ok(0.0);
    }
    let p_max = probs.iter().copied().fold(0.0, f64::max);
    let modes = probs.iter().filter(|&&p| p >= p_max * (1.0 - 1e-12)).count();
    let floor = (modes as f64).log2();
    let ceiling = (probs.len() as f64).log2();
    if !(target > floor && target < ceiling) {
        return Err(Error::InvalidParameter(format!(
            "entropy {target} bits is outside the reachable range ({floor}, {ceiling})"
        )));
    }

    // H is decreasing in λ
    let (mut lo, mut hi) = if target < h0 {
        let mut hi = 1.0;
        while tuned_entropy(probs, hi) > target {
            hi *= 2.0;
            if hi > 1e12 {
                return Err(Error::InvalidParameter(format!(
                    "entropy {target} bits needs an unbounded tuning parameter"
                )));
            }
        }
        (0.0, hi)
    } else {
        (-1.0, 0.0)
    };
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        let h = tuned_entropy(probs, mid);
        if (h - target).abs() < ENTROPY_TOLERANCE {
            return Ok(mid);
        }
        if h > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            break;
        }
    }
    Err(Error::NotConverged {
        iterations: 2000,
        gap: (tuned_entropy(probs, 0.5 * (lo + hi)) - target).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mb_uniform_and_limits() {
        let u = maxwell_boltzmann(&[1, 3, 5, 7], 0.0).unwrap();
        assert!(u.probs().iter().all(|&p| (p - 0.25).abs() < 1e-15));
        let sharp = maxwell_boltzmann(&[1, 3, 5, 7], 50.0).unwrap();
        assert!(sharp.prob_of(1).unwrap() > 1.0 - 1e-9);
        assert!(maxwell_boltzmann(&[1, 3], -0.1).is_err());
    }

    #[test]
    fn mb_lambda_point_one() {
        let d = maxwell_boltzmann(&[1, 3, 5, 7], 0.1).unwrap();
        let m: Vec<f64> = [0.1f64, 0.9, 2.5, 4.9].iter().map(|x| (-x).exp()).collect();
        let z: f64 = m.iter().sum();
        for (p, mass) in d.probs().iter().zip(&m) {
            assert!((p - mass / z).abs() < 1e-15);
        }
        // frozen normalization
        assert!((d.probs()[0] - 0.645_879_398_015_458_7).abs() < 1e-15);
    }

    #[test]
    fn tune_identity_and_limit() {
        let p = TargetDistribution::new(vec![1, 3, 5, 7], vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(entropy_tune(&p, 0.0).unwrap(), p);
        let sharp = entropy_tune(&p, 200.0).unwrap();
        assert!(sharp.prob_of(7).unwrap() > 1.0 - 1e-9);
        assert!(entropy_tune(&p, -1.0).is_err());
        let flat = entropy_tune(&p, -1.0 + 1e-12).unwrap();
        assert!((flat.entropy() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn lambda_search() {
        let p = TargetDistribution::new(vec![1, 3, 5, 7], vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(find_lambda_for_entropy(&p, p.entropy()).unwrap(), 0.0);
        for target in [0.3, 1.0, 1.5, 1.9, 1.99] {
            let l = find_lambda_for_entropy(&p, target).unwrap();
            let h = entropy_tune(&p, l).unwrap().entropy();
            assert!((h - target).abs() < 1e-9, "{target}: {h}");
        }
        assert!(find_lambda_for_entropy(&p, 2.0).is_err());
        assert!(find_lambda_for_entropy(&p, 0.0).is_err());
        let u = TargetDistribution::uniform(vec![1, 3, 5, 7]).unwrap();
        assert!(find_lambda_for_entropy(&u, 1.5).is_err());
    }

    fn arb_dist() -> impl Strategy<Value = TargetDistribution> {
        prop::collection::vec(0.01f64..1.0, 2..8).prop_map(|m| {
            let amps = (0..m.len() as u32).map(|i| 2 * i + 1).collect();
            TargetDistribution::from_masses(amps, &m).unwrap()
        })
    }

    proptest! {
        #[test]
        fn entropy_decreases_with_lambda(p in arb_dist(), a in -0.99f64..20.0, step in 0.0f64..5.0) {
            let h1 = entropy_tune(&p, a).unwrap().entropy();
            let h2 = entropy_tune(&p, a + step).unwrap().entropy();
            prop_assert!(h2 <= h1 + 1e-12);
        }

        #[test]
        fn tune_commutes_with_permutation(p in arb_dist(), lambda in -0.9f64..10.0) {
            let tuned = entropy_tune(&p, lambda).unwrap();
            let rev_amps: Vec<u32> = p.amplitudes().iter().rev().copied().collect();
            let rev_probs: Vec<f64> = p.probs().iter().rev().copied().collect();
            let rev = TargetDistribution::from_masses(rev_amps, &rev_probs).unwrap();
            let tuned_rev = entropy_tune(&rev, lambda).unwrap();
            for (&a, &q) in tuned.amplitudes().iter().zip(tuned.probs()) {
                prop_assert!((tuned_rev.prob_of(a).unwrap() - q).abs() < 1e-12);
            }
        }

        #[test]
        fn search_round_trip(p in arb_dist(), frac in 0.02f64..0.98) {
            let p_max = p.probs().iter().copied().fold(0.0, f64::max);
            let modes = p.probs().iter().filter(|&&x| x >= p_max * (1.0 - 1e-12)).count();
            let lo = (modes as f64).log2();
            let hi = (p.len() as f64).log2();
            prop_assume!(hi - lo > 1e-3);
            let target = lo + frac * (hi - lo);
            let l = find_lambda_for_entropy(&p, target).unwrap();
            prop_assert!(l > -1.0);
            let h = entropy_tune(&p, l).unwrap().entropy();
            prop_assert!((h - target).abs() < 1e-9);
        }
    }
}
