//! Generalized enumerative sphere shaping (ESS).
//!
//! Classical ESS enumerates all amplitude sequences whose energy stays below a
//! threshold. This crate replaces the amplitude energies by arbitrary integer
//! weights, typically quantized self-information of a target distribution, so
//! the matcher can approach any discrete amplitude distribution.
//!
//! The pieces:
//!
//! * [`alphabet`]: weighted amplitude alphabets and weight quantization.
//! * [`weight_levels`]: the set of reachable weight levels and its lookup table.
//! * [`trellis`]: exact path-count trellis, `l_max` selection and a binary cache.
//! * [`codec`]: index to sequence mapping (shaping) and its inverse.
//! * [`analysis`]: exact code-book statistics over the first `K` codewords.
//! * [`distributions`]: Maxwell-Boltzmann targets and entropy tuning.
//! * [`ccdm`]: constant-composition baseline by multiset-permutation ranking.
//! * [`channel_capacity`]: peak-power-limited AWGN channel and Blahut-Arimoto.

pub mod alphabet;
pub mod analysis;
pub mod ccdm;
pub mod channel_capacity;
pub mod codec;
pub mod distributions;
mod error;
mod numeric;
pub mod trellis;
pub mod weight_levels;

pub use alphabet::{
    classical_ess_alphabet, normalize_weights, quantize_weights, LogBase, Rounding,
    TargetDistribution, WeightQuantizer, WeightedAlphabet,
};
pub use analysis::{codebook_prefix_stats, divergence, rate_loss, CodebookSize, CodebookStats};
pub use ccdm::Composition;
pub use codec::{deshape, shape, AmplitudeSequence, EssMatcher, SequenceIndex};
pub use error::{Error, ErrorKind, Result};
pub use trellis::{select_l_max, Trellis};
pub use weight_levels::WeightLevelSet;

pub use num_bigint::BigUint;
