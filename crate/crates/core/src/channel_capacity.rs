//! Peak-power-constrained AWGN channel with M-ASK input and quantized
//! output, and its capacity-achieving input distribution via Blahut-Arimoto.

use rayon::prelude::*;
use serde::Serialize;
use statrs::function::erf::erfc;

use crate::alphabet::TargetDistribution;
use crate::error::{Error, Result};

pub const DEFAULT_BINS: usize = 2048;
pub const DEFAULT_TOL: f64 = 1e-7;
pub const DEFAULT_MAX_ITER: usize = 100_000;
/// Inputs with less mass than this are outside the KKT equality check.
pub const SUPPORT_THRESHOLD: f64 = 1e-6;

const ROW_SUM_TOL: f64 = 1e-9;

/// Rows are inputs, columns are outputs.
pub type TransitionMatrix = Vec<Vec<f64>>;

#[derive(Clone, Debug, PartialEq)]
pub struct PpcChannel {
    m: u32,
    psnr_db: f64,
    sigma: f64,
    symbols: Vec<f64>,
    edges: Vec<f64>,
}

impl PpcChannel {
    pub fn new(m: u32, psnr_db: f64) -> Result<Self> {
        Self::with_bins(m, psnr_db, DEFAULT_BINS)
    }

    /// `bins` uniform bins over `[-A-6σ, A+6σ]` plus one open bin on each side.
    pub fn with_bins(m: u32, psnr_db: f64, bins: usize) -> Result<Self> {
        if m < 2 || !m.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("M must be even and at least 2, got {m}")));
        }
        if !psnr_db.is_finite() {
            return Err(Error::InvalidParameter(format!("PSNR must be finite, got {psnr_db}")));
        }
        if bins == 0 {
            return Err(Error::InvalidParameter("need at least one output bin".into()));
        }
        let a_max = f64::from(m - 1);
        let sigma = a_max / 10f64.powf(psnr_db / 10.0).sqrt();
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("PSNR {psnr_db} dB gives no usable noise level")));
        }
        let half = i64::from(m / 2);
        let symbols: Vec<f64> = (-half..half).map(|i| (2 * i + 1) as f64).collect();
        let span = a_max + 6.0 * sigma;
        let edges = (0..=bins)
            .map(|i| -span + 2.0 * span * i as f64 / bins as f64)
            .collect();
        Ok(PpcChannel { m, psnr_db, sigma, symbols, edges })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn psnr_db(&self) -> f64 {
        self.psnr_db
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `-(M-1), .., -1, 1, .., M-1`.
    pub fn symbols(&self) -> &[f64] {
        &self.symbols
    }

    /// Inner bin edges; the first and last output bins are unbounded.
    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    /// `P(y | x)` with `edges.len() + 1` outputs per row.
    pub fn transition_matrix(&self) -> TransitionMatrix {
        self.symbols
            .iter()
            .map(|&x| {
                // upper tail mass beyond each edge; differences stay accurate in both tails
                let tails: Vec<f64> = std::iter::once(1.0)
                    .chain(self.edges.iter().map(|&e| upper_tail((e - x) / self.sigma)))
                    .chain(std::iter::once(0.0))
                    .collect();
                tails.windows(2).map(|w| (w[0] - w[1]).max(0.0)).collect()
            })
            .collect()
    }

    pub fn optimize(&self, tol: f64, max_iter: usize) -> Result<CapacityResult> {
        let solution = blahut_arimoto(&self.transition_matrix(), tol, max_iter)?;
        CapacityResult::from_solution(self, solution)
    }

    /// Mutual information of the uniform input, in bits.
    pub fn uniform_information(&self) -> Result<f64> {
        let w = self.transition_matrix();
        let p = vec![1.0 / w.len() as f64; w.len()];
        mutual_information(&w, &p)
    }
}

fn upper_tail(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// Output of [`blahut_arimoto`] on an arbitrary channel.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BaSolution {
    pub input_dist: Vec<f64>,
    pub capacity_bits: f64,
    /// `max_x D(W(.|x) || q) - I`, the capacity upper/lower bound gap.
    pub gap_bits: f64,
    pub kkt_residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapacityResult {
    pub m: u32,
    pub psnr_db: f64,
    /// Over the symbols `-(M-1), .., M-1`, symmetrized.
    pub input_dist: Vec<f64>,
    pub amplitude_dist: TargetDistribution,
    pub capacity_bits: f64,
    pub kkt_residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl CapacityResult {
    fn from_solution(channel: &PpcChannel, solution: BaSolution) -> Result<Self> {
        let p = &solution.input_dist;
        let n = p.len();
        let symmetric: Vec<f64> = (0..n).map(|i| 0.5 * (p[i] + p[n - 1 - i])).collect();
        let half = n / 2;
        let amplitudes: Vec<u32> = (0..half).map(|i| 2 * i as u32 + 1).collect();
        let masses: Vec<f64> = (0..half).map(|i| 2.0 * symmetric[half + i]).collect();
        let amplitude_dist = TargetDistribution::from_masses(amplitudes, &masses)?;
        Ok(CapacityResult {
            m: channel.m,
            psnr_db: channel.psnr_db,
            input_dist: symmetric,
            amplitude_dist,
            capacity_bits: solution.capacity_bits,
            kkt_residual: solution.kkt_residual,
            iterations: solution.iterations,
            converged: solution.converged,
        })
    }
}

fn check_stochastic(w: &TransitionMatrix) -> Result<()> {
    let cols = w.first().map_or(0, Vec::len);
    if w.is_empty() || cols == 0 {
        return Err(Error::InvalidParameter("empty transition matrix".into()));
    }
    for (x, row) in w.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::InvalidParameter(format!("row {x} has {} entries, expected {cols}", row.len())));
        }
        if row.iter().any(|&v| !(v.is_finite() && v >= 0.0)) {
            return Err(Error::InvalidParameter(format!("row {x} has a negative or non-finite entry")));
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > ROW_SUM_TOL {
            return Err(Error::InvalidParameter(format!("row {x} sums to {sum}")));
        }
    }
    Ok(())
}

/// `D(W(.|x) || q)` in nats for every input, with `row_neg_entropy[x] = Σ W ln W`.
fn divergences(w: &TransitionMatrix, row_neg_entropy: &[f64], p: &[f64], log_q: &mut [f64]) -> Vec<f64> {
    log_q.iter_mut().for_each(|v| *v = 0.0);
    for (row, &px) in w.iter().zip(p) {
        for (acc, &v) in log_q.iter_mut().zip(row) {
            *acc += px * v;
        }
    }
    log_q.iter_mut().for_each(|v| *v = if *v > 0.0 { v.ln() } else { 0.0 });
    w.iter()
        .zip(row_neg_entropy)
        .map(|(row, &h)| h - row.iter().zip(log_q.iter()).map(|(&v, &l)| v * l).sum::<f64>())
        .collect()
}

fn neg_entropies(w: &TransitionMatrix) -> Vec<f64> {
    w.iter()
        .map(|row| row.iter().filter(|&&v| v > 0.0).map(|&v| v * v.ln()).sum())
        .collect()
}

/// `I(X;Y)` in bits for input distribution `p`.
pub fn mutual_information(w: &TransitionMatrix, p: &[f64]) -> Result<f64> {
    check_stochastic(w)?;
    if p.len() != w.len() {
        return Err(Error::InvalidParameter("input distribution does not match the channel".into()));
    }
    let mut log_q = vec![0.0; w[0].len()];
    let d = divergences(w, &neg_entropies(w), p, &mut log_q);
    Ok(p.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>() / std::f64::consts::LN_2)
}

fn kkt_residual(p: &[f64], d_bits: &[f64], capacity: f64) -> f64 {
    p.iter()
        .zip(d_bits)
        .map(|(&px, &dx)| {
            if px > SUPPORT_THRESHOLD {
                (dx - capacity).abs()
            } else {
                (dx - capacity).max(0.0)
            }
        })
        .fold(0.0, f64::max)
}

/// Alternating maximization from the uniform input. Stops once
/// `max_x D(W(.|x)||q) - I < tol` (bits); otherwise returns the last
/// iterate with `converged = false`.
pub fn blahut_arimoto(w: &TransitionMatrix, tol: f64, max_iter: usize) -> Result<BaSolution> {
    check_stochastic(w)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let n = w.len();
    let h = neg_entropies(w);
    let mut log_q = vec![0.0; w[0].len()];
    let mut p = vec![1.0 / n as f64; n];
    let mut iterations = 0;
    loop {
        let d = divergences(w, &h, &p, &mut log_q);
        let lower: f64 = p.iter().zip(&d).map(|(a, b)| a * b).sum();
        let upper = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let gap = (upper - lower) / std::f64::consts::LN_2;
        if gap < tol || iterations >= max_iter {
            let capacity = lower / std::f64::consts::LN_2;
            let d_bits: Vec<f64> = d.iter().map(|v| v / std::f64::consts::LN_2).collect();
            return Ok(BaSolution {
                kkt_residual: kkt_residual(&p, &d_bits, capacity),
                input_dist: p,
                capacity_bits: capacity,
                gap_bits: gap,
                iterations,
                converged: gap < tol,
            });
        }
        let mut total = 0.0;
        for (px, dx) in p.iter_mut().zip(&d) {
            *px *= (dx - upper).exp();
            total += *px;
        }
        p.iter_mut().for_each(|px| *px /= total);
        iterations += 1;
    }
}

/// One optimization per PSNR value, run in parallel.
pub fn capacity_sweep(m: u32, psnrs_db: &[f64], tol: f64, max_iter: usize) -> Result<Vec<CapacityResult>> {
    psnrs_db
        .par_iter()
        .map(|&s| PpcChannel::new(m, s)?.optimize(tol, max_iter))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bsc(eps: f64) -> TransitionMatrix {
        vec![vec![1.0 - eps, eps], vec![eps, 1.0 - eps]]
    }

    fn hb(p: f64) -> f64 {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }

    #[test]
    fn bsc_closed_form() {
        let s = blahut_arimoto(&bsc(0.1), DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!(s.converged);
        assert!((s.capacity_bits - (1.0 - hb(0.1))).abs() < 1e-9);
        assert!((s.input_dist[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn z_channel() {
        // capacity of the Z channel with crossover 1/2 is log2(5/4)
        let w = vec![vec![1.0, 0.0], vec![0.5, 0.5]];
        let s = blahut_arimoto(&w, 1e-10, DEFAULT_MAX_ITER).unwrap();
        assert!(s.converged);
        assert!((s.capacity_bits - (1.25f64).log2()).abs() < 1e-9);
        assert!((s.input_dist[1] - 0.4).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(blahut_arimoto(&vec![vec![0.5, 0.4]], 1e-7, 10).is_err());
        assert!(blahut_arimoto(&vec![vec![1.2, -0.2]], 1e-7, 10).is_err());
        assert!(blahut_arimoto(&vec![vec![1.0], vec![0.5, 0.5]], 1e-7, 10).is_err());
        assert!(blahut_arimoto(&vec![], 1e-7, 10).is_err());
    }

    #[test]
    fn reports_non_convergence() {
        let ch = PpcChannel::new(8, 18.0).unwrap();
        let s = blahut_arimoto(&ch.transition_matrix(), 1e-12, 3).unwrap();
        assert!(!s.converged);
        assert_eq!(s.iterations, 3);
    }

    #[test]
    fn channel_layout() {
        let ch = PpcChannel::new(8, 20.0).unwrap();
        assert_eq!(ch.symbols(), &[-7.0, -5.0, -3.0, -1.0, 1.0, 3.0, 5.0, 7.0]);
        assert!((ch.sigma() - 0.7).abs() < 1e-12);
        assert_eq!(ch.edges().len(), DEFAULT_BINS + 1);
        assert!((ch.edges()[0] + 7.0 + 6.0 * 0.7).abs() < 1e-12);
        assert!(PpcChannel::new(7, 20.0).is_err());
    }

    #[test]
    fn rows_are_stochastic_and_symmetric() {
        for psnr in [0.0, 18.0, 60.0] {
            let ch = PpcChannel::new(8, psnr).unwrap();
            let w = ch.transition_matrix();
            let cols = w[0].len();
            assert_eq!(cols, DEFAULT_BINS + 2);
            for row in &w {
                assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
            for x in 0..8 {
                for y in 0..cols {
                    assert!((w[x][y] - w[7 - x][cols - 1 - y]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn high_psnr_rows_concentrate() {
        // bins are about one sigma wide here, so mass spreads over a few neighbours
        let ch = PpcChannel::new(8, 60.0).unwrap();
        let sigma = ch.sigma();
        let edges = ch.edges();
        for (row, &x) in ch.transition_matrix().iter().zip(ch.symbols()) {
            let best = row
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .unwrap()
                .0;
            let width = edges[1] - edges[0];
            assert!(edges[best - 1] - width <= x && x <= edges[best] + width);
            let near: f64 = (1..edges.len())
                .filter(|&y| edges[y] > x - 6.0 * sigma && edges[y - 1] < x + 6.0 * sigma)
                .map(|y| row[y])
                .sum();
            assert!(near > 1.0 - 1e-8);
        }
    }

    #[test]
    fn noiseless_limit() {
        let r = PpcChannel::new(8, 60.0).unwrap().optimize(DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!((r.capacity_bits - 3.0).abs() < 1e-3);
        for &p in r.amplitude_dist.probs() {
            assert!((p - 0.25).abs() < 1e-3);
        }
    }

    #[test]
    fn low_psnr_prefers_outer_amplitudes() {
        let ch = PpcChannel::new(8, 18.0).unwrap();
        let r = ch.optimize(DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!(r.converged);
        assert!(r.amplitude_dist.prob_of(7).unwrap() > r.amplitude_dist.prob_of(1).unwrap());
        assert!(r.capacity_bits >= ch.uniform_information().unwrap());
        let p = &r.input_dist;
        for i in 0..8 {
            assert!((p[i] - p[7 - i]).abs() < 1e-12);
        }
    }
}
