//! Index to amplitude-sequence mapping over a [`Trellis`].
//!
//! Sequences are ranked lexicographically by their alphabet indices
//! `(k_0, .., k_{N-1})`. Equal weights become parallel edges, ordered by `k`.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::alphabet::WeightedAlphabet;
use crate::error::{Error, Result};
use crate::trellis::{select_l_max, Trellis};

/// Lexicographic rank of a sequence in a trellis.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SequenceIndex(pub BigUint);

impl SequenceIndex {
    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn into_inner(self) -> BigUint {
        self.0
    }
}

impl From<BigUint> for SequenceIndex {
    fn from(v: BigUint) -> Self {
        SequenceIndex(v)
    }
}

impl From<u64> for SequenceIndex {
    fn from(v: u64) -> Self {
        SequenceIndex(BigUint::from(v))
    }
}

/// A sequence of alphabet indices `k_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AmplitudeSequence {
    indices: Vec<usize>,
}

impl AmplitudeSequence {
    pub fn from_indices(indices: Vec<usize>) -> Self {
        AmplitudeSequence { indices }
    }

    pub fn from_amplitudes(alphabet: &WeightedAlphabet, amplitudes: &[u32]) -> Result<Self> {
        let indices = amplitudes
            .iter()
            .map(|&a| alphabet.index_of(a).ok_or(Error::UnknownAmplitude(a)))
            .collect::<Result<_>>()?;
        Ok(AmplitudeSequence { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn amplitudes(&self, alphabet: &WeightedAlphabet) -> Vec<u32> {
        self.indices.iter().map(|&k| alphabet.amplitude(k)).collect()
    }

    pub fn weight(&self, alphabet: &WeightedAlphabet) -> u64 {
        alphabet.sequence_weight(&self.indices)
    }
}

/// Maps an index `0 <= i < T_0^0` to its sequence.
///
/// At stage `n` the symbols are tried in index order; each candidate `k`
/// covers `T_{n+1}^{ℓ + w^(k)}` indices. The first candidate whose block
/// contains the remaining local index is emitted and the blocks skipped so
/// far are subtracted.
pub fn shape(trellis: &Trellis, index: &SequenceIndex) -> Result<AmplitudeSequence> {
    if index.value() >= trellis.total() {
        return Err(Error::IndexOutOfRange {
            index: index.value().to_string(),
            size: trellis.total().to_string(),
        });
    }
    let k_count = trellis.alphabet().len();
    let mut local = index.value().clone();
    let mut row = 0usize;
    let mut indices = Vec::with_capacity(trellis.len());
    for n in 0..trellis.len() {
        let mut chosen = None;
        for k in 0..k_count {
            // weights ascend, so the first dead edge ends the stage
            let Some(succ) = trellis.successor(row, k) else {
                break;
            };
            let block = trellis.count_at_row(n + 1, succ);
            if &local < block {
                chosen = Some((k, succ));
                break;
            }
            local -= block;
        }
        let (k, succ) = chosen.expect("index below T_n^ℓ always lands in some block");
        indices.push(k);
        row = succ;
    }
    debug_assert!(local.is_zero());
    Ok(AmplitudeSequence { indices })
}

/// Inverse of [`shape`].
pub fn deshape(trellis: &Trellis, sequence: &AmplitudeSequence) -> Result<SequenceIndex> {
    let alphabet = trellis.alphabet();
    if sequence.len() != trellis.len() {
        return Err(Error::SequenceLength {
            expected: trellis.len(),
            found: sequence.len(),
        });
    }
    if let Some(&k) = sequence.indices().iter().find(|&&k| k >= alphabet.len()) {
        return Err(Error::InvalidParameter(format!("alphabet index {k} out of range")));
    }
    let weight = sequence.weight(alphabet);
    if weight > trellis.l_max() {
        return Err(Error::WeightExceeded {
            weight,
            l_max: trellis.l_max(),
        });
    }
    // rows of the prefixes, then accumulate from the last stage backwards
    let mut rows = Vec::with_capacity(trellis.len());
    let mut row = 0usize;
    for &k in sequence.indices() {
        rows.push(row);
        row = trellis
            .successor(row, k)
            .expect("total weight within l_max keeps every prefix inside the trellis");
    }
    let mut index = BigUint::zero();
    for (n, &k) in sequence.indices().iter().enumerate().rev() {
        for lower in 0..k {
            if let Some(succ) = trellis.successor(rows[n], lower) {
                index += trellis.count_at_row(n + 1, succ);
            }
        }
    }
    Ok(SequenceIndex(index))
}

/// Reads bits as a binary number, first bit most significant.
pub fn bits_to_index(bits: &[bool]) -> SequenceIndex {
    let mut value = BigUint::zero();
    for &b in bits {
        value <<= 1u32;
        if b {
            value += 1u32;
        }
    }
    SequenceIndex(value)
}

/// Writes `index` as exactly `k_bits` bits, most significant first.
pub fn index_to_bits(index: &SequenceIndex, k_bits: u64) -> Result<Vec<bool>> {
    if index.value().bits() > k_bits {
        return Err(Error::IndexOutOfRange {
            index: index.value().to_string(),
            size: format!("2^{k_bits}"),
        });
    }
    Ok((0..k_bits).rev().map(|b| index.value().bit(b)).collect())
}

/// Unpacks a `k_bits` payload stored MSB-first in `ceil(k_bits / 8)` bytes.
/// Padding bits in the last byte must be zero.
pub fn bytes_to_index(bytes: &[u8], k_bits: u64) -> Result<SequenceIndex> {
    let needed = k_bits.div_ceil(8) as usize;
    if bytes.len() != needed {
        return Err(Error::InvalidParameter(format!(
            "a {k_bits}-bit payload takes {needed} bytes, got {}",
            bytes.len()
        )));
    }
    let pad = needed as u64 * 8 - k_bits;
    let value = BigUint::from_bytes_be(bytes);
    if pad > 0 && value.trailing_zeros().unwrap_or(u64::MAX) < pad {
        return Err(Error::InvalidParameter("payload padding bits are not zero".into()));
    }
    Ok(SequenceIndex(value >> pad))
}

/// Packs `index` into `ceil(k_bits / 8)` bytes, MSB first, zero padded at the end.
pub fn index_to_bytes(index: &SequenceIndex, k_bits: u64) -> Result<Vec<u8>> {
    let bits = index_to_bits(index, k_bits)?;
    let mut out = vec![0u8; k_bits.div_ceil(8) as usize];
    for (i, b) in bits.into_iter().enumerate() {
        if b {
            out[i / 8] |= 0x80 >> (i % 8);
        }
    }
    Ok(out)
}

/// `a -> M - a` on every amplitude: swaps low and high ASK amplitudes.
pub fn amplitude_remap_reverse(amplitudes: &[u32], m: u32) -> Result<Vec<u32>> {
    amplitudes
        .iter()
        .map(|&a| {
            if a % 2 == 1 && a < m {
                Ok(m - a)
            } else {
                Err(Error::InvalidParameter(format!(
                    "amplitude {a} is not an {m}-ASK amplitude"
                )))
            }
        })
        .collect()
}

/// A trellis together with a fixed payload size.
#[derive(Clone, Debug)]
pub struct EssMatcher {
    trellis: Trellis,
    k_bits: u64,
}

impl EssMatcher {
    pub fn new(trellis: Trellis, k_bits: u64) -> Result<Self> {
        if (BigUint::one() << k_bits) > *trellis.total() {
            return Err(Error::InfeasibleRate {
                k_bits,
                max_bits: trellis.max_bits(),
            });
        }
        Ok(EssMatcher { trellis, k_bits })
    }

    /// Uses the smallest `l_max` that fits `k_bits`.
    pub fn for_rate(alphabet: &WeightedAlphabet, len: usize, k_bits: u64) -> Result<Self> {
        let (_, trellis) = select_l_max(alphabet, len, k_bits)?;
        EssMatcher::new(trellis, k_bits)
    }

    pub fn trellis(&self) -> &Trellis {
        &self.trellis
    }

    pub fn k_bits(&self) -> u64 {
        self.k_bits
    }

    pub fn encode_bits(&self, bits: &[bool]) -> Result<Vec<u32>> {
        if bits.len() as u64 != self.k_bits {
            return Err(Error::InvalidParameter(format!(
                "expected {} payload bits, got {}",
                self.k_bits,
                bits.len()
            )));
        }
        let seq = shape(&self.trellis, &bits_to_index(bits))?;
        Ok(seq.amplitudes(self.trellis.alphabet()))
    }

    pub fn decode_bits(&self, amplitudes: &[u32]) -> Result<Vec<bool>> {
        index_to_bits(&self.decode_index(amplitudes)?, self.k_bits)
    }

    pub fn encode_bytes(&self, payload: &[u8]) -> Result<Vec<u32>> {
        let index = bytes_to_index(payload, self.k_bits)?;
        Ok(shape(&self.trellis, &index)?.amplitudes(self.trellis.alphabet()))
    }

    pub fn decode_bytes(&self, amplitudes: &[u32]) -> Result<Vec<u8>> {
        index_to_bytes(&self.decode_index(amplitudes)?, self.k_bits)
    }

    fn decode_index(&self, amplitudes: &[u32]) -> Result<SequenceIndex> {
        let seq = AmplitudeSequence::from_amplitudes(self.trellis.alphabet(), amplitudes)?;
        let index = deshape(&self.trellis, &seq)?;
        if index.value().bits() > self.k_bits {
            return Err(Error::IndexOutOfRange {
                index: index.value().to_string(),
                size: format!("2^{}", self.k_bits),
            });
        }
        Ok(index)
    }
}
