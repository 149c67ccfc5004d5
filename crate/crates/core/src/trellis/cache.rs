//! Portable binary trellis cache.
//!
//! All integers are little-endian.
//!
//! ```text
//! magic      4 bytes  "GESS"
//! version    u16      1
//! N          u64      sequence length
//! K          u32      alphabet size (M/2)
//! l_max      u64
//! |L|        u64      number of weight levels
//! amplitudes K x u32
//! weights    K x u64
//! levels     |L| x u64, ascending
//! counts     (N + 1) x |L| entries, stage-major, each a u32 byte length
//!            followed by the little-endian magnitude (zero has length 0)
//! ```

use std::io::{Read, Write};

use num_bigint::BigUint;

use super::Trellis;
use crate::alphabet::WeightedAlphabet;
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"GESS";
const VERSION: u16 = 1;

impl Trellis {
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(MAGIC)?;
        out.write_all(&VERSION.to_le_bytes())?;
        out.write_all(&(self.len as u64).to_le_bytes())?;
        out.write_all(&(self.alphabet.len() as u32).to_le_bytes())?;
        out.write_all(&self.l_max().to_le_bytes())?;
        out.write_all(&(self.levels.len() as u64).to_le_bytes())?;
        for &a in self.alphabet.amplitudes() {
            out.write_all(&a.to_le_bytes())?;
        }
        for &w in self.alphabet.weights() {
            out.write_all(&w.to_le_bytes())?;
        }
        for &level in self.levels.levels() {
            out.write_all(&level.to_le_bytes())?;
        }
        for stage in &self.counts {
            for count in stage {
                let bytes = if count.bits() == 0 {
                    Vec::new()
                } else {
                    count.to_bytes_le()
                };
                out.write_all(&(bytes.len() as u32).to_le_bytes())?;
                out.write_all(&bytes)?;
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut input: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Cache("bad magic".into()));
        }
        let version = u16::from_le_bytes(read_array(&mut input)?);
        if version != VERSION {
            return Err(Error::Cache(format!("unsupported version {version}")));
        }
        let len = read_u64(&mut input)?;
        let k_count = u32::from_le_bytes(read_array(&mut input)?) as usize;
        let l_max = read_u64(&mut input)?;
        let level_count = read_u64(&mut input)?;
        if k_count == 0 || level_count == 0 || level_count > l_max.saturating_add(1) {
            return Err(Error::Cache("inconsistent header".into()));
        }
        let amplitudes = (0..k_count)
            .map(|_| Ok(u32::from_le_bytes(read_array(&mut input)?)))
            .collect::<Result<Vec<_>>>()?;
        let weights = (0..k_count)
            .map(|_| read_u64(&mut input))
            .collect::<Result<Vec<_>>>()?;
        let alphabet = WeightedAlphabet::new(amplitudes, weights)
            .map_err(|e| Error::Cache(e.to_string()))?;
        let levels = (0..level_count)
            .map(|_| read_u64(&mut input))
            .collect::<Result<Vec<_>>>()?;
        let len = usize::try_from(len).map_err(|_| Error::Cache("N too large".into()))?;
        let mut counts = Vec::with_capacity(len.min(1 << 20) + 1);
        for _ in 0..=len {
            let mut stage = Vec::with_capacity(levels.len());
            for _ in 0..level_count {
                let size = u32::from_le_bytes(read_array(&mut input)?) as usize;
                let mut bytes = vec![0u8; size];
                input.read_exact(&mut bytes)?;
                stage.push(BigUint::from_bytes_le(&bytes));
            }
            counts.push(stage);
        }
        Trellis::from_parts(alphabet, len, l_max, levels, counts)
    }
}

fn read_array<const S: usize, R: Read>(input: &mut R) -> Result<[u8; S]> {
    let mut buf = [0u8; S];
    input.read_exact(&mut buf)?;
    Ok(buf)
}

fn read_u64<R: Read>(input: &mut R) -> Result<u64> {
    Ok(u64::from_le_bytes(read_array(input)?))
}
