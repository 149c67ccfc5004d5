//! Average energy and rate loss of generalized ESS as a function of the
//! weight scaling factor `f`.

use rayon::prelude::*;
use serde::Serialize;

use super::{codebook_prefix_stats, CodebookSize};
use crate::alphabet::{TargetDistribution, WeightQuantizer, WeightedAlphabet};
use crate::error::Result;
use crate::trellis::select_l_max;

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub target: TargetDistribution,
    pub len: usize,
    /// Payload bits used to pick `l_max`.
    pub k_bits: u64,
    pub quantizer: WeightQuantizer,
    pub codebook: CodebookSize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub f: f64,
    pub amplitudes: Vec<u32>,
    pub weights: Vec<u64>,
    pub l_max: u64,
    /// Bit length of `T_0^0`.
    pub trellis_bits: u64,
    pub codebook_bits: u64,
    pub avg_energy: f64,
    /// `H(P_A)` minus the code-book rate.
    pub rate_loss: f64,
    /// `D(U_A || P_A)` in bits for the whole sequence.
    pub divergence: f64,
}

/// `f = 0.1, 0.2, .., 6.1`.
pub fn default_factor_grid() -> Vec<f64> {
    (1..=61).map(|i| f64::from(i) / 10.0).collect()
}

/// Code-book figures for a fixed alphabet, with `l_max` chosen for the payload.
pub fn evaluate_alphabet(config: &SweepConfig, alphabet: &WeightedAlphabet, f: f64) -> Result<SweepRow> {
    let (l_max, trellis) = select_l_max(alphabet, config.len, config.k_bits)?;
    let size = config.codebook.resolve(&trellis)?;
    let stats = codebook_prefix_stats(&trellis, &size)?;
    Ok(SweepRow {
        f,
        amplitudes: alphabet.amplitudes().to_vec(),
        weights: alphabet.weights().to_vec(),
        l_max,
        trellis_bits: trellis.total().bits(),
        codebook_bits: size.bits() - 1,
        avg_energy: stats.avg_energy(),
        rate_loss: config.target.entropy() - stats.rate(),
        divergence: stats.divergence(&config.target)?,
    })
}

pub fn evaluate_factor(config: &SweepConfig, f: f64) -> Result<SweepRow> {
    let alphabet = config.quantizer.quantize(&config.target, f)?;
    evaluate_alphabet(config, &alphabet, f)
}

/// Evaluates every factor, in parallel; rows come back in input order.
pub fn sweep_factor(config: &SweepConfig, factors: &[f64]) -> Result<Vec<SweepRow>> {
    factors
        .par_iter()
        .map(|&f| evaluate_factor(config, f))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::{LogBase, Rounding};
    use crate::distributions::maxwell_boltzmann;

    #[test]
    fn grid_endpoints() {
        let g = default_factor_grid();
        assert_eq!(g.len(), 61);
        assert_eq!(g[0], 0.1);
        assert_eq!(g[29], 3.0);
        assert_eq!(g[59], 6.0);
        assert_eq!(g[60], 6.1);
    }

    #[test]
    fn small_sweep_is_ordered() {
        let config = SweepConfig {
            target: maxwell_boltzmann(&[1, 3, 5, 7], 0.1).unwrap(),
            len: 32,
            k_bits: 48,
            quantizer: WeightQuantizer::new(LogBase::Binary, Rounding::RelativeToMode),
            codebook: CodebookSize::Payload(48),
        };
        let factors = [2.0, 0.5, 1.0];
        let rows = sweep_factor(&config, &factors).unwrap();
        assert_eq!(rows.iter().map(|r| r.f).collect::<Vec<_>>(), factors);
        for r in &rows {
            assert_eq!(r.codebook_bits, 48);
            assert!(r.trellis_bits >= 49);
            assert!(r.divergence >= 0.0);
            assert!(r.avg_energy > 1.0 && r.avg_energy < 49.0);
        }
    }
}
